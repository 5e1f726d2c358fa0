#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fnlab/expr.hpp"
#include "fnlab/solver.hpp"

namespace fnlab {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line)
        : std::runtime_error("config line " + std::to_string(line) + ": " + msg), line(line) {}
    int line;
};

/// Line-oriented [section] / key = value file. Values are token lists; numeric
/// tokens may be plain decimals or simple fractions like 1/64.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text);

    bool has(const std::string& sec, const std::string& key) const;
    const std::vector<std::string>& tokens(const std::string& sec, const std::string& key) const;
    std::string str(const std::string& sec, const std::string& key) const;
    std::string joined(const std::string& sec, const std::string& key) const;
    double number(const std::string& sec, const std::string& key) const;
    double number_or(const std::string& sec, const std::string& key, double fallback) const;
    std::vector<double> numbers(const std::string& sec, const std::string& key) const;
    int line_of(const std::string& sec, const std::string& key) const;

    static double parse_number(const std::string& tok, int line);

private:
    struct Entry {
        std::vector<std::string> tokens;
        int line = 0;
    };
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

/// A fully-typed experiment declaration (problem + grid + solve + experiments).
struct ExperimentConfig {
    std::string name;
    Problem problem;
    double beta_g = 0.5;
    std::vector<double> h_levels;
    SolveConfig solve;
    std::vector<std::string> experiments;
    std::string out_dir = "out";
    std::uint64_t seed = 20240501;

    // [verify]
    std::optional<Expr> exact_u;
    double linf_factor_h = 0;  ///< pass if L_inf error <= factor*h (0 = unchecked)
    double min_rate = 0;       ///< pass if empirical order >= min_rate (0 = unchecked)

    // [regularity]
    Vec2 reg_center{0, 0};
    double reg_rho = 0.5;
    int reg_k_max = 3;
    double alpha_bar = 0.99;
    double alpha_fit_min = 0, alpha_fit_max = 0;  ///< (0,0) = unchecked

    // [barrier]
    double barrier_delta = 0.25;
    double barrier_gamma = 0.5;

    // [comparison] / [assumptions]
    int comparison_pairs = 100;
    double eps0 = 1e-2;

    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_config(const ConfigFile& cf, const std::string& name);
};

} // namespace fnlab
