#include "learnorder/run_ledger.hpp"

#include "learnorder/csv.hpp"
#include "learnorder/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <unordered_map>

namespace learnorder {

using nlohmann::json;

CorrectnessCube::CorrectnessCube(std::vector<std::string> runs, std::vector<std::int64_t> epochs,
                                 std::vector<std::string> instances,
                                 std::vector<std::uint8_t> bits)
    : runs_(std::move(runs)),
      epochs_(std::move(epochs)),
      instances_(std::move(instances)),
      bits_(std::move(bits)) {
    if (runs_.size() < 2) {
        throw Error(ErrorCode::TooFewRuns,
                    fmt::format("a cube needs at least 2 runs, got {}", runs_.size()));
    }
    if (epochs_.empty() || instances_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "cube needs at least one epoch and one instance");
    }
    if (bits_.size() != runs_.size() * epochs_.size() * instances_.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("cube holds {} bits, expected {}x{}x{}", bits_.size(),
                                runs_.size(), epochs_.size(), instances_.size()));
    }
    auto strictly_sorted = [](const auto& v) {
        return std::adjacent_find(v.begin(), v.end(),
                                  [](const auto& a, const auto& b) { return !(a < b); }) ==
               v.end();
    };
    if (!strictly_sorted(runs_) || !strictly_sorted(epochs_) || !strictly_sorted(instances_)) {
        throw Error(ErrorCode::InvalidArgument, "cube labels must be unique and canonically sorted");
    }
    for (auto& b : bits_) b = b ? 1 : 0;
}

double CorrectnessCube::accuracy(std::size_t run, std::size_t epoch) const noexcept {
    const auto bits = row(run, epoch);
    const auto hits = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
    return static_cast<double>(hits) / static_cast<double>(bits.size());
}

CorrectnessCube CorrectnessCube::select_runs(std::span<const std::size_t> run_positions) const {
    std::vector<std::size_t> order(run_positions.begin(), run_positions.end());
    std::sort(order.begin(), order.end());
    std::vector<std::string> runs;
    std::vector<std::uint8_t> bits;
    bits.reserve(order.size() * epochs_.size() * instances_.size());
    for (std::size_t k : order) {
        if (k >= runs_.size()) throw Error(ErrorCode::InvalidArgument, "run position out of range");
        runs.push_back(runs_[k]);
        for (std::size_t t = 0; t < epochs_.size(); ++t) {
            const auto r = row(k, t);
            bits.insert(bits.end(), r.begin(), r.end());
        }
    }
    return CorrectnessCube(std::move(runs), epochs_, instances_, std::move(bits));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

[[noreturn]] void malformed(std::string_view source, std::size_t line, const std::string& what) {
    throw Error(ErrorCode::MalformedRecord, fmt::format("{}:{}: {}", source, line, what));
}

PredictionRecord record_from_json(const json& obj, std::string_view source, std::size_t line) {
    if (!obj.is_object()) malformed(source, line, "expected a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (key != "run" && key != "epoch" && key != "instance" && key != "correct") {
            malformed(source, line, fmt::format("unknown key '{}'", key));
        }
    }
    for (const char* key : {"run", "epoch", "instance", "correct"}) {
        if (!obj.contains(key)) malformed(source, line, fmt::format("missing key '{}'", key));
    }
    const auto& run = obj["run"];
    const auto& epoch = obj["epoch"];
    const auto& instance = obj["instance"];
    const auto& correct = obj["correct"];
    if (!run.is_string()) malformed(source, line, "'run' must be a string");
    if (!instance.is_string()) malformed(source, line, "'instance' must be a string");
    if (!correct.is_boolean()) malformed(source, line, "'correct' must be a boolean");
    if (!epoch.is_number_integer()) malformed(source, line, "'epoch' must be an integer");

    PredictionRecord rec;
    if (epoch.is_number_unsigned()) {
        const auto value = epoch.get<std::uint64_t>();
        if (value > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
            malformed(source, line, "'epoch' out of range");
        }
        rec.epoch = static_cast<std::int64_t>(value);
    } else {
        rec.epoch = epoch.get<std::int64_t>();
        if (rec.epoch < 0) malformed(source, line, "'epoch' must be non-negative");
    }
    rec.run_id = run.get<std::string>();
    rec.instance_id = instance.get<std::string>();
    rec.correct = correct.get<bool>();
    if (rec.run_id.empty()) malformed(source, line, "'run' must be non-empty");
    if (rec.instance_id.empty()) malformed(source, line, "'instance' must be non-empty");
    return rec;
}

struct TripleKey {
    std::string run;
    std::int64_t epoch;
    std::string instance;
    auto operator<=>(const TripleKey&) const = default;
};

} // namespace

std::vector<PredictionRecord> parse_run_log(std::istream& in, std::string_view source) {
    std::vector<PredictionRecord> records;
    std::map<TripleKey, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            malformed(source, line_no, fmt::format("invalid JSON ({})", e.what()));
        }
        auto rec = record_from_json(obj, source, line_no);
        auto [it, inserted] = seen.emplace(TripleKey{rec.run_id, rec.epoch, rec.instance_id}, line_no);
        if (!inserted) {
            throw Error(ErrorCode::DuplicateRecord,
                        fmt::format("{}:{}: ({}, {}, {}) already recorded on line {}", source,
                                    line_no, rec.run_id, rec.epoch, rec.instance_id, it->second));
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PredictionRecord> read_run_log_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open run log '{}'", path.string()));
    return parse_run_log(in, path.string());
}

// ---------------------------------------------------------------------------
// Assembly

CorrectnessCube assemble_cube(const std::vector<std::vector<PredictionRecord>>& records_by_run) {
    struct RunCoverage {
        std::set<std::int64_t> epochs;
        std::set<std::string> instances;
    };
    std::map<std::string, RunCoverage> coverage;
    for (const auto& group : records_by_run) {
        for (const auto& rec : group) {
            auto& cov = coverage[rec.run_id];
            cov.epochs.insert(rec.epoch);
            cov.instances.insert(rec.instance_id);
        }
    }
    if (coverage.size() < 2) {
        throw Error(ErrorCode::TooFewRuns,
                    fmt::format("need at least 2 runs, found {}", coverage.size()));
    }

    const auto& [first_run, reference] = *coverage.begin();
    for (const auto& [run, cov] : coverage) {
        if (cov.epochs != reference.epochs) {
            throw Error(ErrorCode::RaggedLogs,
                        fmt::format("run '{}' covers {} epochs but run '{}' covers {} (epoch sets differ)",
                                    run, cov.epochs.size(), first_run, reference.epochs.size()));
        }
        if (cov.instances != reference.instances) {
            throw Error(ErrorCode::RaggedLogs,
                        fmt::format("run '{}' covers {} instances but run '{}' covers {} (instance sets differ)",
                                    run, cov.instances.size(), first_run,
                                    reference.instances.size()));
        }
    }

    std::vector<std::string> runs;
    for (const auto& entry : coverage) runs.push_back(entry.first);
    std::vector<std::int64_t> epochs(reference.epochs.begin(), reference.epochs.end());
    std::vector<std::string> instances(reference.instances.begin(), reference.instances.end());

    std::unordered_map<std::string, std::size_t> run_pos, instance_pos;
    std::unordered_map<std::int64_t, std::size_t> epoch_pos;
    for (std::size_t i = 0; i < runs.size(); ++i) run_pos.emplace(runs[i], i);
    for (std::size_t i = 0; i < epochs.size(); ++i) epoch_pos.emplace(epochs[i], i);
    for (std::size_t i = 0; i < instances.size(); ++i) instance_pos.emplace(instances[i], i);

    const std::size_t T = epochs.size();
    const std::size_t N = instances.size();
    std::vector<std::uint8_t> bits(runs.size() * T * N, 0);
    std::vector<std::uint8_t> seen(bits.size(), 0);
    for (const auto& group : records_by_run) {
        for (const auto& rec : group) {
            const std::size_t idx = (run_pos.at(rec.run_id) * T + epoch_pos.at(rec.epoch)) * N +
                                    instance_pos.at(rec.instance_id);
            if (seen[idx]) {
                throw Error(ErrorCode::DuplicateRecord,
                            fmt::format("({}, {}, {}) recorded more than once", rec.run_id,
                                        rec.epoch, rec.instance_id));
            }
            seen[idx] = 1;
            bits[idx] = rec.correct ? 1 : 0;
        }
    }
    if (auto gap = std::find(seen.begin(), seen.end(), 0); gap != seen.end()) {
        const auto idx = static_cast<std::size_t>(gap - seen.begin());
        throw Error(ErrorCode::MissingTriple,
                    fmt::format("run '{}' has no record for epoch {} instance '{}'",
                                runs[idx / (T * N)], epochs[(idx / N) % T], instances[idx % N]));
    }
    return CorrectnessCube(std::move(runs), std::move(epochs), std::move(instances),
                           std::move(bits));
}

void write_record(std::ostream& out, const PredictionRecord& record) {
    out << "{\"run\":" << json(record.run_id).dump() << ",\"epoch\":" << record.epoch
        << ",\"instance\":" << json(record.instance_id).dump()
        << ",\"correct\":" << (record.correct ? "true" : "false") << "}\n";
}

void serialize_cube(std::ostream& out, const CorrectnessCube& cube) {
    for (std::size_t k = 0; k < cube.num_runs(); ++k) {
        for (std::size_t t = 0; t < cube.num_epochs(); ++t) {
            for (std::size_t n = 0; n < cube.num_instances(); ++n) {
                write_record(out, {cube.runs()[k], cube.epochs()[t], cube.instances()[n],
                                   cube.at(k, t, n)});
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Synthetic logs

double LearningSchedule::operator()(std::int64_t epoch) const noexcept {
    const double t = static_cast<double>(std::max<std::int64_t>(epoch, 0));
    double value = scale;
    switch (kind) {
    case Kind::Constant: break;
    case Kind::Linear:
        value = ramp_epochs > 0 ? scale * std::min(1.0, (t + 1.0) / ramp_epochs) : scale;
        break;
    case Kind::Saturating:
        value = ramp_epochs > 0 ? scale * (1.0 - std::exp(-(t + 1.0) / ramp_epochs)) : scale;
        break;
    }
    return std::clamp(value, 0.0, 1.0);
}

namespace {

std::string padded(char prefix, std::size_t index, std::size_t count) {
    const std::size_t digits = std::max<std::size_t>(1, fmt::formatted_size("{}", count > 0 ? count - 1 : 0));
    return fmt::format("{}{:0{}}", prefix, index, digits);
}

// 53-bit uniform in [0,1) from the raw engine output; independent of the
// standard library's distribution implementations.
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

std::string synthetic_instance_id(std::size_t index, std::size_t count) {
    return padded('i', index, count);
}

std::string synthetic_run_id(std::size_t index, std::size_t count) {
    return padded('r', index, count);
}

std::vector<RunLog> generate_synthetic_logs(const SynthConfig& config) {
    if (config.difficulty.empty()) {
        throw Error(ErrorCode::EmptyDifficulty, "difficulty list must be non-empty");
    }
    if (config.num_runs < 2) {
        throw Error(ErrorCode::TooFewRuns,
                    fmt::format("need at least 2 runs, got {}", config.num_runs));
    }
    if (config.num_epochs < 1) {
        throw Error(ErrorCode::InvalidArgument, "need at least 1 epoch");
    }
    if (!(config.forget_probability >= 0.0 && config.forget_probability <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "forget probability must lie in [0,1]");
    }
    for (double d : config.difficulty) {
        if (!std::isfinite(d)) throw Error(ErrorCode::InvalidArgument, "difficulty must be finite");
    }

    const std::size_t N = config.difficulty.size();
    std::vector<RunLog> logs;
    logs.reserve(config.num_runs);
    for (std::size_t k = 0; k < config.num_runs; ++k) {
        std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                          static_cast<std::uint32_t>(config.seed >> 32),
                          static_cast<std::uint32_t>(k), 0x5eedu};
        std::mt19937_64 rng(seq);

        RunLog log;
        log.run_id = synthetic_run_id(k, config.num_runs);
        log.records.reserve(config.num_epochs * N);
        std::vector<bool> learned(N, false);
        for (std::size_t t = 0; t < config.num_epochs; ++t) {
            const auto epoch = static_cast<std::int64_t>(t);
            const double rate = config.schedule(epoch);
            for (std::size_t n = 0; n < N; ++n) {
                const double learn_draw = unit_draw(rng);
                const double forget_draw = unit_draw(rng);
                if (learned[n]) {
                    if (forget_draw < config.forget_probability) learned[n] = false;
                } else {
                    const double ease = 1.0 - std::clamp(config.difficulty[n], 0.0, 1.0);
                    if (learn_draw < rate * ease) learned[n] = true;
                }
                log.records.push_back({log.run_id, epoch, synthetic_instance_id(n, N), learned[n]});
            }
        }
        logs.push_back(std::move(log));
    }
    return logs;
}

// ---------------------------------------------------------------------------
// Catalog

void InstanceCatalog::add(CatalogEntry entry) {
    if (index_.count(entry.instance_id)) {
        throw Error(ErrorCode::MalformedCSV,
                    fmt::format("duplicate catalog instance '{}'", entry.instance_id));
    }
    index_.emplace(entry.instance_id, entries_.size());
    entries_.push_back(std::move(entry));
}

const CatalogEntry* InstanceCatalog::find(std::string_view instance_id) const {
    auto it = index_.find(instance_id);
    return it == index_.end() ? nullptr : &entries_[it->second];
}

InstanceCatalog parse_catalog(std::istream& in, std::string_view source) {
    const auto doc = csv::read(in, source);
    if (doc.header.size() < 2 || doc.header[0] != "instance" || doc.header[1] != "image_path") {
        throw Error(ErrorCode::MalformedCSV,
                    fmt::format("{}: header must start with 'instance,image_path'", source));
    }
    InstanceCatalog catalog;
    catalog.set_category_names({doc.header.begin() + 2, doc.header.end()});
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        const auto& row = doc.rows[r];
        if (row[0].empty()) {
            throw Error(ErrorCode::MalformedCSV,
                        fmt::format("{}:{}: empty instance id", source, doc.line_numbers[r]));
        }
        CatalogEntry entry;
        entry.instance_id = row[0];
        if (!row[1].empty()) entry.image_path = row[1];
        for (std::size_t c = 2; c < row.size(); ++c) {
            if (!row[c].empty()) entry.categories.emplace(doc.header[c], row[c]);
        }
        catalog.add(std::move(entry));
    }
    return catalog;
}

InstanceCatalog read_catalog_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open catalog '{}'", path.string()));
    auto catalog = parse_catalog(in, path.string());
    catalog.base_dir = path.parent_path();
    return catalog;
}

} // namespace learnorder
