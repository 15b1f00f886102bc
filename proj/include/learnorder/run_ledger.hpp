#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace learnorder {

// One resolved correctness bit: did `run_id` classify `instance_id`
// correctly (exact match) at `epoch`.
struct PredictionRecord {
    std::string run_id;
    std::int64_t epoch = 0;
    std::string instance_id;
    bool correct = false;

    friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

// K x T x N boolean tensor with canonical orderings: runs and instances
// lexicographic, epochs ascending.
class CorrectnessCube {
public:
    // `bits` is row-major [run][epoch][instance]. Throws Error(InvalidArgument)
    // on size mismatches, empty axes, unsorted or duplicated labels.
    CorrectnessCube(std::vector<std::string> runs, std::vector<std::int64_t> epochs,
                    std::vector<std::string> instances, std::vector<std::uint8_t> bits);

    std::size_t num_runs() const noexcept { return runs_.size(); }
    std::size_t num_epochs() const noexcept { return epochs_.size(); }
    std::size_t num_instances() const noexcept { return instances_.size(); }

    const std::vector<std::string>& runs() const noexcept { return runs_; }
    const std::vector<std::int64_t>& epochs() const noexcept { return epochs_; }
    const std::vector<std::string>& instances() const noexcept { return instances_; }

    bool at(std::size_t run, std::size_t epoch, std::size_t instance) const noexcept {
        return bits_[(run * epochs_.size() + epoch) * instances_.size() + instance] != 0;
    }

    // Correctness bits of one run at one epoch position, indexed by instance.
    std::span<const std::uint8_t> row(std::size_t run, std::size_t epoch) const noexcept {
        return {bits_.data() + (run * epochs_.size() + epoch) * instances_.size(),
                instances_.size()};
    }

    // Fraction of instances that `run` classifies correctly at epoch position `epoch`.
    double accuracy(std::size_t run, std::size_t epoch) const noexcept;

    // Sub-cube restricted to the given run positions (kept in canonical order).
    CorrectnessCube select_runs(std::span<const std::size_t> run_positions) const;

    friend bool operator==(const CorrectnessCube&, const CorrectnessCube&) = default;

private:
    std::vector<std::string> runs_;
    std::vector<std::int64_t> epochs_;
    std::vector<std::string> instances_;
    std::vector<std::uint8_t> bits_;
};

// JSON-lines run log: one object per line with exactly the keys
// run/epoch/instance/correct. Blank lines are ignored.
// Throws Error(MalformedRecord) or Error(DuplicateRecord); messages carry
// `source:line`.
std::vector<PredictionRecord> parse_run_log(std::istream& in, std::string_view source = "<log>");

std::vector<PredictionRecord> read_run_log_file(const std::filesystem::path& path);

// Builds the cube from the records of every run (grouping is by each
// record's run_id, so the outer split is only a convenience for callers
// that parsed files separately). Requires at least two runs.
// Throws TooFewRuns, DuplicateRecord, RaggedLogs, MissingTriple.
CorrectnessCube assemble_cube(const std::vector<std::vector<PredictionRecord>>& records_by_run);

void write_record(std::ostream& out, const PredictionRecord& record);

// Every bit of the cube as run-log lines, run-major then epoch then instance.
void serialize_cube(std::ostream& out, const CorrectnessCube& cube);

// Per-epoch learning-rate shape for the synthetic generator. Values are
// clamped to [0,1] and non-decreasing in the epoch.
struct LearningSchedule {
    enum class Kind { Constant, Linear, Saturating };

    Kind kind = Kind::Linear;
    double scale = 1.0;       // Constant: the value; Linear/Saturating: the plateau
    double ramp_epochs = 10;  // Linear: epochs to reach the plateau; Saturating: time constant

    double operator()(std::int64_t epoch) const noexcept;
};

struct SynthConfig {
    std::size_t num_runs = 3;
    std::size_t num_epochs = 10;
    std::vector<double> difficulty; // one per instance, clamped to [0,1]
    LearningSchedule schedule;
    double forget_probability = 0.0;
    std::uint64_t seed = 0;
};

struct RunLog {
    std::string run_id;
    std::vector<PredictionRecord> records; // epoch-major, instances in id order
};

// Instance n flips to correct in run k at the first epoch where a seeded
// uniform draw falls below schedule(t) * (1 - difficulty[n]). Once correct
// it is forgotten with `forget_probability` per epoch (0 keeps it learned).
// Throws EmptyDifficulty, TooFewRuns, InvalidArgument.
std::vector<RunLog> generate_synthetic_logs(const SynthConfig& config);

// Zero-padded ids so lexicographic order equals numeric order.
std::string synthetic_instance_id(std::size_t index, std::size_t count);
std::string synthetic_run_id(std::size_t index, std::size_t count);

struct CatalogEntry {
    std::string instance_id;
    std::optional<std::string> image_path;
    std::map<std::string, std::string> categories; // only non-empty cells
};

// CSV with header `instance,image_path,<category columns...>`.
class InstanceCatalog {
public:
    InstanceCatalog() = default;

    void add(CatalogEntry entry); // throws MalformedCSV on a duplicate id

    const std::vector<CatalogEntry>& entries() const noexcept { return entries_; }
    const std::vector<std::string>& category_names() const noexcept { return category_names_; }
    void set_category_names(std::vector<std::string> names) { category_names_ = std::move(names); }

    const CatalogEntry* find(std::string_view instance_id) const;

    // Directory that relative image paths are resolved against.
    std::filesystem::path base_dir;

private:
    std::vector<CatalogEntry> entries_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::vector<std::string> category_names_;
};

InstanceCatalog parse_catalog(std::istream& in, std::string_view source = "<catalog>");

// Relative image paths resolve against the catalog file's directory.
InstanceCatalog read_catalog_file(const std::filesystem::path& path);

} // namespace learnorder
