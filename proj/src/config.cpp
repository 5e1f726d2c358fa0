#include "fnlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fnlab {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'", 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile cf;
    std::istringstream in(text);
    std::string line, section;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", ln);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", ln);
            cf.sections_[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", ln);
        if (section.empty()) throw ConfigError("key outside any [section]", ln);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", ln);
        Entry e;
        e.line = ln;
        std::istringstream vs(val);
        std::string tok;
        while (vs >> tok) e.tokens.push_back(tok);
        cf.sections_[section][key] = std::move(e);
    }
    return cf;
}

bool ConfigFile::has(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    return s != sections_.end() && s->second.count(key) > 0;
}

const std::vector<std::string>& ConfigFile::tokens(const std::string& sec,
                                                   const std::string& key) const {
    auto s = sections_.find(sec);
    if (s == sections_.end() || !s->second.count(key))
        throw ConfigError("missing key '" + key + "' in section [" + sec + "]", 0);
    return s->second.at(key).tokens;
}

int ConfigFile::line_of(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    if (s == sections_.end() || !s->second.count(key)) return 0;
    return s->second.at(key).line;
}

std::string ConfigFile::str(const std::string& sec, const std::string& key) const {
    const auto& t = tokens(sec, key);
    if (t.size() != 1) throw ConfigError("expected a single token for '" + key + "'", line_of(sec, key));
    return t[0];
}

std::string ConfigFile::joined(const std::string& sec, const std::string& key) const {
    const auto& t = tokens(sec, key);
    std::string out;
    for (size_t k = 0; k < t.size(); ++k) out += (k ? " " : "") + t[k];
    return out;
}

double ConfigFile::parse_number(const std::string& tok, int line) {
    auto slash = tok.find('/');
    try {
        if (slash != std::string::npos) {
            double num = std::stod(tok.substr(0, slash));
            double den = std::stod(tok.substr(slash + 1));
            if (den == 0.0) throw ConfigError("division by zero in '" + tok + "'", line);
            return num / den;
        }
        size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw ConfigError("bad number '" + tok + "'", line);
        return v;
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad number '" + tok + "'", line);
    } catch (const std::out_of_range&) {
        throw ConfigError("number out of range '" + tok + "'", line);
    }
}

double ConfigFile::number(const std::string& sec, const std::string& key) const {
    return parse_number(str(sec, key), line_of(sec, key));
}

double ConfigFile::number_or(const std::string& sec, const std::string& key,
                             double fallback) const {
    return has(sec, key) ? number(sec, key) : fallback;
}

std::vector<double> ConfigFile::numbers(const std::string& sec, const std::string& key) const {
    std::vector<double> out;
    for (const auto& t : tokens(sec, key)) out.push_back(parse_number(t, line_of(sec, key)));
    return out;
}

namespace {

std::shared_ptr<const Domain> parse_domain(const ConfigFile& cf) {
    const auto& t = cf.tokens("problem", "domain");
    int ln = cf.line_of("problem", "domain");
    auto num = [&](size_t i) {
        if (i >= t.size()) throw ConfigError("domain: missing parameter", ln);
        return ConfigFile::parse_number(t[i], ln);
    };
    if (t.empty()) throw ConfigError("domain: missing kind", ln);
    if (t[0] == "ball") return std::make_shared<Domain>(Domain::ball({num(1), num(2)}, num(3)));
    if (t[0] == "annulus")
        return std::make_shared<Domain>(Domain::annulus({num(1), num(2)}, num(3), num(4)));
    if (t[0] == "ellipse")
        return std::make_shared<Domain>(Domain::ellipse({num(1), num(2)}, num(3), num(4)));
    if (t[0] == "halfgraph")
        return std::make_shared<Domain>(
            Domain::half_graph({num(1), num(2)}, num(3), num(4), num(5), num(6)));
    throw ConfigError("domain: unknown kind '" + t[0] + "'", ln);
}

OperatorSpec parse_operator(const ConfigFile& cf) {
    const auto& t = cf.tokens("problem", "operator");
    int ln = cf.line_of("problem", "operator");
    double lam = cf.number_or("problem", "lambda", 1.0);
    double Lam = cf.number_or("problem", "Lambda", lam);
    EllipticityPair e(lam, Lam);
    auto num = [&](size_t i) {
        if (i >= t.size()) throw ConfigError("operator: missing parameter", ln);
        return ConfigFile::parse_number(t[i], ln);
    };
    if (t.empty()) throw ConfigError("operator: missing kind", ln);
    if (t[0] == "pucci+") return OperatorSpec::pucci_plus_op(e);
    if (t[0] == "pucci-") return OperatorSpec::pucci_minus_op(e);
    if (t[0] == "laplace") return OperatorSpec::laplacian();
    if (t[0] == "linear_trace") {
        double a1 = num(1), a2 = num(2);
        if (!(lam <= std::min(a1, a2)) || !(std::max(a1, a2) <= Lam))
            throw ConfigError("linear_trace: coefficients outside [lambda, Lambda]", ln);
        return OperatorSpec::linear_trace(
            e, [a1, a2](Vec2) { return SymMatrix::diag({a1, a2}); });
    }
    if (t[0] == "infsup") {
        if (t.size() < 4 || (t.size() - 2) % 2 != 0)
            throw ConfigError("infsup: expected 'infsup sup|inf a1 a2 [b1 b2 ...]'", ln);
        bool sup = t[1] == "sup";
        if (!sup && t[1] != "inf") throw ConfigError("infsup: mode must be sup or inf", ln);
        std::vector<SymMatrix> fam;
        for (size_t i = 2; i + 1 < t.size(); i += 2)
            fam.push_back(SymMatrix::diag({num(i), num(i + 1)}));
        return OperatorSpec::inf_sup(e, std::move(fam), sup);
    }
    throw ConfigError("operator: unknown kind '" + t[0] + "'", ln);
}

DegeneracyLaw parse_law(const ConfigFile& cf, const Domain& dom) {
    const auto& t = cf.tokens("problem", "law");
    int ln = cf.line_of("problem", "law");
    auto num = [&](size_t i) {
        if (i >= t.size()) throw ConfigError("law: missing parameter", ln);
        return ConfigFile::parse_number(t[i], ln);
    };
    if (t.empty()) throw ConfigError("law: missing kind", ln);
    if (t[0] == "power") return DegeneracyLaw::power(num(1));
    if (t[0] == "double_phase") {
        double p = num(1), q = num(2);
        std::string aexpr = t.size() > 3 ? t[3] : "1";
        Expr a = Expr::parse(aexpr);
        double amax = 0.0;
        Aabb box = dom.bounding_box();
        for (int i = 0; i <= 16; ++i)
            for (int j = 0; j <= 16; ++j)
                amax = std::max(amax, a({box.lo.x + (box.hi.x - box.lo.x) * i / 16.0,
                                         box.lo.y + (box.hi.y - box.lo.y) * j / 16.0}));
        return DegeneracyLaw::double_phase(p, q, a.fn(), amax);
    }
    if (t[0] == "varexp") {
        std::string pexpr = t.size() > 1 ? t[1] : "1";
        Expr p = Expr::parse(pexpr);
        return DegeneracyLaw::variable_exponent(p.fn(), dom.bounding_box());
    }
    throw ConfigError("law: unknown kind '" + t[0] + "'", ln);
}

} // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    ConfigFile cf = ConfigFile::parse_file(path);
    std::string name = path;
    auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    auto dotpos = name.find_last_of('.');
    if (dotpos != std::string::npos) name = name.substr(0, dotpos);
    return from_config(cf, name);
}

ExperimentConfig ExperimentConfig::from_config(const ConfigFile& cf, const std::string& name) {
    ExperimentConfig ec;
    ec.name = name;
    ec.problem.dom = parse_domain(cf);
    ec.problem.op = parse_operator(cf);
    ec.problem.law = parse_law(cf, *ec.problem.dom);
    ec.problem.f = Expr::parse(cf.has("problem", "f") ? cf.joined("problem", "f") : "0").fn();
    ec.problem.g.g = Expr::parse(cf.has("problem", "g") ? cf.joined("problem", "g") : "0").fn();
    ec.beta_g = cf.number_or("problem", "beta_g", 0.5);
    ec.problem.g.beta_g = ec.beta_g;
    if (cf.has("problem", "xi")) {
        auto v = cf.numbers("problem", "xi");
        if (v.size() != 2) throw ConfigError("xi: expected two components", cf.line_of("problem", "xi"));
        ec.problem.xi = {v[0], v[1]};
    }
    if (cf.has("problem", "linear_correction"))
        ec.problem.g.linear_correction = cf.number("problem", "linear_correction") != 0.0;

    ec.h_levels = cf.numbers("grid", "h");
    if (ec.h_levels.empty()) throw ConfigError("grid: need at least one h", cf.line_of("grid", "h"));
    for (double h : ec.h_levels)
        if (!(h > 0)) throw ConfigError("grid: h must be positive", cf.line_of("grid", "h"));

    if (cf.has("solve", "eps_schedule")) ec.solve.eps_schedule = cf.numbers("solve", "eps_schedule");
    ec.solve.cfl = cf.number_or("solve", "cfl", 0.5);
    if (cf.has("solve", "cfl_mode")) ec.solve.local_cfl = cf.str("solve", "cfl_mode") != "global";
    ec.solve.tol_rel = cf.number_or("solve", "tol", 1e-8);
    ec.solve.max_iters = static_cast<long>(cf.number_or("solve", "max_iters", 4000000));
    if (cf.has("solve", "eta_final") && cf.str("solve", "eta_final") != "auto")
        ec.solve.eta_final = cf.number("solve", "eta_final");
    ec.solve.threads = static_cast<int>(cf.number_or("solve", "threads", 1));
    ec.solve.stencil_m = static_cast<int>(cf.number_or("solve", "stencil_m", 8));
    ec.solve.stencil_reach = static_cast<int>(cf.number_or("solve", "stencil_reach", 1));

    if (cf.has("experiments", "run")) {
        for (const auto& e : cf.tokens("experiments", "run")) {
            static const char* known[] = {"solve", "abp", "barrier", "comparison", "regularity",
                                          "assumptions"};
            bool ok = std::any_of(std::begin(known), std::end(known),
                                  [&](const char* k) { return e == k; });
            if (!ok)
                throw ConfigError("unknown experiment '" + e + "'", cf.line_of("experiments", "run"));
            ec.experiments.push_back(e);
        }
    } else {
        ec.experiments = {"solve"};
    }
    if (cf.has("output", "dir")) ec.out_dir = cf.str("output", "dir");
    if (cf.has("output", "seed")) ec.seed = static_cast<std::uint64_t>(cf.number("output", "seed"));

    if (cf.has("verify", "exact_u")) ec.exact_u = Expr::parse(cf.joined("verify", "exact_u"));
    ec.linf_factor_h = cf.number_or("verify", "linf_factor", 0.0);
    ec.min_rate = cf.number_or("verify", "min_rate", 0.0);

    if (cf.has("regularity", "center")) {
        auto v = cf.numbers("regularity", "center");
        if (v.size() != 2)
            throw ConfigError("regularity center: expected two components",
                              cf.line_of("regularity", "center"));
        ec.reg_center = {v[0], v[1]};
    }
    ec.reg_rho = cf.number_or("regularity", "rho", 0.5);
    ec.reg_k_max = static_cast<int>(cf.number_or("regularity", "k_max", 3));
    ec.alpha_bar = cf.number_or("regularity", "alpha_bar", 0.99);
    ec.alpha_fit_min = cf.number_or("regularity", "alpha_fit_min", 0.0);
    ec.alpha_fit_max = cf.number_or("regularity", "alpha_fit_max", 0.0);

    ec.barrier_delta = cf.number_or("barrier", "delta", 0.25);
    ec.barrier_gamma = cf.number_or("barrier", "gamma", 0.5);
    ec.comparison_pairs = static_cast<int>(cf.number_or("comparison", "pairs", 100));
    ec.eps0 = cf.number_or("assumptions", "eps0", 1e-2);
    return ec;
}

} // namespace fnlab
