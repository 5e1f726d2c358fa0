#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "fnlab/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fnlab: monotone finite-difference lab for gradient-degenerate "
                 "fully nonlinear Dirichlet problems"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;
    std::uint64_t seed = 0;
    auto* run = app.add_subcommand("run", "run the experiments declared in a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    run->add_option("--threads", threads, "worker threads for node-parallel maps");
    run->add_option("--seed", seed, "seed for randomized checks");

    auto* ls = app.add_subcommand("list-suites", "list bundled experiment configs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (ls->parsed()) {
        std::string dir = fnlab::default_suites_dir(argv[0]);
        auto suites = fnlab::list_suites(dir);
        if (suites.empty()) {
            std::cout << "no bundled suites found in '" << dir << "'\n";
            return 0;
        }
        for (const auto& [name, desc] : suites)
            std::cout << name << "  -  " << desc << "\n";
        return 0;
    }

    try {
        auto t0 = std::chrono::steady_clock::now();
        fnlab::ExperimentConfig cfg = fnlab::ExperimentConfig::load(config_path);
        fnlab::RunOverrides ovr;
        ovr.out_dir = out_dir;
        ovr.threads = threads;
        ovr.seed = seed;
        fnlab::RunResult res = fnlab::run_experiments(cfg, ovr);
        for (const auto& line : res.summary) std::cout << line << "\n";
        auto t1 = std::chrono::steady_clock::now();
        std::cout << "elapsed: " << std::chrono::duration<double>(t1 - t0).count() << " s\n";
        return res.exit_code;
    } catch (const fnlab::ConfigError& e) {
        std::cerr << "fnlab: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "fnlab: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fnlab: " << e.what() << "\n";
        return 1;
    }
}
