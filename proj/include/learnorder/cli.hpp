#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace learnorder {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitValidation = 3;

struct RunConfig {
    // paths
    std::vector<std::string> logs; // glob patterns or files
    std::string catalog;
    std::vector<std::string> metric_files;      // numeric sidecars / compute-stats output
    std::vector<std::string> categorical_files; // categorical sidecars
    std::string out = ".";

    // image metrics
    std::vector<std::string> metrics{"entropy", "segment_count", "dct_percentage",
                                     "edge_strength_sobel"};
    double sigma = 0.5;
    double scale_k = 500.0;
    std::size_t min_size = 50;
    std::size_t window = 10;
    double energy_fraction = 0.9998;
    std::size_t downsample = 0;
    std::size_t threads = 0;
    bool seg_gray = false;
    bool skip_undecodable = false;

    // analysis
    std::size_t skip = 5;
    std::size_t bins = 50;
    std::size_t group_size = 0;
    std::string pairing = "agreement"; // agreement | epoch
    bool skip_missing = false;
    bool percent = false;
    bool no_era = false;
    bool no_pabak = false;

    // synthetic logs
    std::size_t runs = 3;
    std::size_t epochs = 40;
    std::size_t instances = 500;
    std::uint64_t seed = 7;
    std::string difficulty = "uniform"; // uniform | linspace
    double difficulty_min = 0.0;
    double difficulty_max = 1.0;
    std::string schedule = "linear";    // constant | linear | saturating
    double ramp = 20.0;
    double plateau = 1.0;
    double forget = 0.0;
};

// Each returns an exit code and reports failures on `err`.
int cmd_compute_stats(const RunConfig& config, std::ostream& err);
int cmd_analyze(const RunConfig& config, std::ostream& err);
int cmd_correlate(const RunConfig& config, std::ostream& err);
int cmd_synth(const RunConfig& config, std::ostream& err);

// Parses `args` (without the program name) and dispatches. An optional
// `--config <file>` of key=value lines supplies defaults that explicit
// flags override.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace learnorder
