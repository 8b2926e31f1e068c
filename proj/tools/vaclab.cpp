#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "vaclab/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"vaclab: 1-D free-boundary Euler laboratory"};
    app.require_subcommand(1);

    std::string config_path, output_dir;
    int threads = 1;
    long seed = 0;  // reserved
    bool verbose = false;

    CLI::App* run = app.add_subcommand("run", "execute a scenario config");
    run->add_option("config", config_path, "path to the scenario config")->required();
    run->add_option("--output-dir", output_dir, "override the config's output directory");
    run->add_option("--threads", threads, "worker pool size for sweeps");
    run->add_option("--seed", seed, "reserved for future stochastic probes");
    run->add_flag("--verbose", verbose, "echo the run report to stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        vaclab::Scenario s = vaclab::load_scenario(config_path);
        if (!output_dir.empty()) s.output_dir = output_dir;
        s.threads = std::max(1, threads);
        vaclab::RunReport rep = vaclab::run_scenario(s);
        if (verbose) std::cout << rep.text;
        return 0;
    } catch (const vaclab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == vaclab::ErrorCode::config_invalid ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
