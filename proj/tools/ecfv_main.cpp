// Command-line driver: runs one experiment and writes its artifacts.

#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "ecfv/ecfv.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Entropy-conservative finite-volume laboratory for the 1D Euler equations"};
    ecfv::CliOptions options;
    ecfv::add_cli_options(app, options);
    CLI11_PARSE(app, argc, argv);

    ecfv::RunConfig config;
    try {
        config = ecfv::resolve_config(options);
    } catch (const ecfv::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    const auto artifacts = ecfv::run(config);
    try {
        ecfv::write_outputs(artifacts, config.output_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    std::printf("%s: %zu steps, cumulative entropy production %.6e, max conservation defect %.3e\n",
                artifacts.complete ? "complete" : "INCOMPLETE", artifacts.steps_taken,
                artifacts.cumulative_production(), artifacts.max_conservation_defect);
    if (!artifacts.complete) {
        std::fprintf(stderr, "run stopped early: %s\n", artifacts.error.c_str());
        return 1;
    }
    std::printf("outputs written to %s\n", config.output_dir.c_str());
    return 0;
}
