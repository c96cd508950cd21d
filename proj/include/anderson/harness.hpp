#pragma once

// Experiment descriptors, execution and result files for the anderson-spectra
// command line tool.
//
// A descriptor is a flat JSON object of parameters for one named experiment.
// Parsing fills in every default, so the resolved descriptor written into the
// summary is enough to repeat the run.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "anderson/parallel.hpp"

namespace anderson::harness {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// validate-coupling, lyapunov, furstenberg, ids, wegner, trace, minami,
/// resonance, poisson.
const std::vector<std::string>& experiment_names();

/// Library version, with the git description of the source tree when known.
std::string_view version() noexcept;

struct ExperimentDescriptor {
    std::string experiment;
    Json config;  // resolved parameters, defaults included, with "seed"
    std::uint64_t seed = 0;
};

/// Validates `config` against the parameter table of `experiment` and fills
/// defaults. `config` may also be a previously written summary, in which case
/// its "config" member is used. A "seed" override replaces the configured seed.
///
/// Throws InvalidArgument naming the offending key for unknown experiments,
/// unknown or missing keys, and values of the wrong type.
ExperimentDescriptor parse_descriptor(std::string_view experiment, const Json& config,
                                      std::optional<std::uint64_t> seed_override = std::nullopt);

/// Text table written as CSV.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
};

/// Shortest decimal text that round-trips the double ("%.17g").
std::string format_number(double x);

struct RunOutput {
    Json results = Json::object();
    Table table;
};

/// Runs the experiment in memory. Rows already produced stay in `out` if a
/// library error is thrown part way through.
void execute(const ExperimentDescriptor& descriptor, const WorkerPool& pool, RunOutput& out);

struct RunReport {
    int exit_code = kExitOk;
    std::string error;
    Json summary;
    std::filesystem::path csv_path;
    std::filesystem::path summary_path;
};

/// Executes and writes <out_dir>/<experiment>.csv and
/// <out_dir>/<experiment>.summary.json. The summary holds the version, the
/// resolved config, the results, the status and the wall time. On a numerical
/// failure the partial table and an error summary are still written and the
/// exit code is kExitNumeric; configuration errors give kExitConfig.
RunReport run(const ExperimentDescriptor& descriptor, const std::filesystem::path& out_dir, unsigned threads);

}  // namespace anderson::harness
