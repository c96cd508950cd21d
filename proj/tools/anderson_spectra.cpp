// anderson-spectra <experiment> --config file.json [--out dir] [--threads k] [--seed s]

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "anderson/errors.hpp"
#include "anderson/harness.hpp"
#include "anderson/parallel.hpp"

namespace h = anderson::harness;

int main(int argc, char** argv) {
    CLI::App app{"Spectral statistics of the 1D Anderson-Bernoulli model"};
    app.set_version_flag("--version", std::string(h::version()));

    std::string experiment;
    std::string config_path;
    std::string out_dir = ".";
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;

    std::string names;
    for (const auto& n : h::experiment_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("experiment", experiment, "One of: " + names)->required();
    app.add_option("--config,-c", config_path, "JSON experiment descriptor (or a previous summary)")->required();
    app.add_option("--out,-o", out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads,-j", threads, "Worker threads (default: $ANDERSON_SPECTRA_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed,-s", seed, "Base seed, overrides the config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : h::kExitConfig;
    }

    try {
        std::ifstream in(config_path);
        if (!in) throw anderson::InvalidArgument("cannot open config file '" + config_path + "'");
        h::Json config;
        try {
            config = h::Json::parse(in);
        } catch (const h::Json::parse_error& e) {
            throw anderson::InvalidArgument("config file '" + config_path + "' is not valid JSON: " + e.what());
        }
        const auto descriptor = h::parse_descriptor(experiment, config, seed);
        const unsigned k = anderson::resolve_thread_count(threads);
        const auto report = h::run(descriptor, out_dir, k);
        if (report.exit_code != h::kExitOk) {
            std::cerr << "anderson-spectra: " << report.error << '\n';
            return report.exit_code;
        }
        std::cout << report.csv_path.string() << '\n' << report.summary_path.string() << '\n';
        return h::kExitOk;
    } catch (const anderson::InvalidArgument& e) {
        std::cerr << "anderson-spectra: " << e.what() << '\n';
        return h::kExitConfig;
    } catch (const anderson::NumericalFailure& e) {
        std::cerr << "anderson-spectra: " << e.what() << '\n';
        return h::kExitNumeric;
    }
}
