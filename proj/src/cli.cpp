#include "learnorder/cli.hpp"

#include "learnorder/agreement.hpp"
#include "learnorder/correlation.hpp"
#include "learnorder/csv.hpp"
#include "learnorder/error.hpp"
#include "learnorder/metric_table.hpp"
#include "learnorder/report.hpp"
#include "learnorder/run_ledger.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <glob.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace learnorder {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
    out << content;
    if (!out) throw Error(ErrorCode::Io, fmt::format("failed writing '{}'", path.string()));
}

template <typename Writer>
void write_with(const fs::path& path, Writer&& writer) {
    std::ostringstream buffer;
    writer(buffer);
    write_file(path, buffer.str());
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::path path(dir.empty() ? "." : dir);
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec || !fs::is_directory(path)) {
        throw Error(ErrorCode::Io, fmt::format("cannot create output directory '{}'", path.string()));
    }
    return path;
}

std::vector<fs::path> expand_logs(const std::vector<std::string>& patterns) {
    std::set<std::string> files;
    for (const auto& pattern : patterns) {
        glob_t g{};
        const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
        if (rc == 0) {
            for (std::size_t i = 0; i < g.gl_pathc; ++i) files.insert(g.gl_pathv[i]);
        }
        globfree(&g);
        if (rc == GLOB_NOMATCH) {
            throw Error(ErrorCode::Io, fmt::format("no run logs match '{}'", pattern));
        }
        if (rc != 0) throw Error(ErrorCode::Io, fmt::format("cannot expand '{}'", pattern));
    }
    if (files.empty()) throw Error(ErrorCode::Io, "no run logs given (--logs)");
    return {files.begin(), files.end()};
}

CorrectnessCube load_cube(const RunConfig& config) {
    std::vector<std::vector<PredictionRecord>> groups;
    for (const auto& path : expand_logs(config.logs)) groups.push_back(read_run_log_file(path));
    return assemble_cube(groups);
}

void warn(std::ostream& err, const std::string& message) { err << "warning: " << message << '\n'; }

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        fn();
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_io_error(e.code()) ? kExitIo : kExitValidation;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternal;
    }
}

} // namespace

int cmd_compute_stats(const RunConfig& config, std::ostream& err) {
    return guarded(err, [&] {
        if (config.metrics.empty()) throw Error(ErrorCode::InvalidArgument, "no metrics selected");
        const auto catalog = read_catalog_file(config.catalog);
        CorpusMetricOptions options;
        options.metrics.clear();
        for (const auto& name : config.metrics) {
            const auto metric = parse_image_metric(name);
            if (!metric) throw Error(ErrorCode::InvalidArgument, fmt::format("unknown metric '{}'", name));
            options.metrics.push_back(*metric);
        }
        options.entropy_window = config.window;
        options.energy_fraction = config.energy_fraction;
        options.segmentation = {config.sigma, config.scale_k, config.min_size};
        options.segment_gray = config.seg_gray;
        options.downsample = config.downsample;
        options.skip_undecodable = config.skip_undecodable;
        options.threads = config.threads;
        options.warn = [&err](const std::string& m) { warn(err, m); };
        const auto table = compute_corpus_metrics(catalog, options);
        const auto dir = prepare_out_dir(config.out);
        write_with(dir / "metrics.csv", [&](std::ostream& o) { write_metric_table(o, table); });
    });
}

int cmd_analyze(const RunConfig& config, std::ostream& err) {
    return guarded(err, [&] {
        const auto cube = load_cube(config);
        const auto series = agreement_series(cube);
        const auto dir = prepare_out_dir(config.out);
        write_with(dir / "agreement.csv",
                   [&](std::ostream& o) { write_agreement_csv(o, series, config.percent); });
        AgreementPlotOptions plot;
        plot.show_expected_random = !config.no_era;
        plot.show_pabak = !config.no_pabak;
        write_file(dir / "agreement.svg", render_agreement_svg(series, plot));
        if (config.group_size > 0) {
            const auto groups = split_into_groups(cube, config.group_size);
            const auto stats = agreement_std_over_groups(groups, config.group_size);
            write_with(dir / "agreement_groups.csv",
                       [&](std::ostream& o) { write_group_stats_csv(o, stats, config.percent); });
        }
    });
}

int cmd_correlate(const RunConfig& config, std::ostream& err) {
    return guarded(err, [&] {
        if (config.pairing != "agreement" && config.pairing != "epoch") {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("unknown pairing '{}' (agreement|epoch)", config.pairing));
        }
        const auto pairing = config.pairing == "epoch" ? CorrelationPairing::EpochIndex
                                                       : CorrelationPairing::Agreement;
        const auto policy =
            config.skip_missing ? CoveragePolicy::IgnoreMissing : CoveragePolicy::Strict;

        MetricTable table;
        for (const auto& f : config.metric_files) table.merge(read_sidecar_file(f, MetricKind::Numeric));
        for (const auto& f : config.categorical_files) {
            table.merge(read_sidecar_file(f, MetricKind::Categorical));
        }
        if (!config.catalog.empty()) table.merge(catalog_categories(read_catalog_file(config.catalog)));
        if (table.empty()) {
            throw Error(ErrorCode::InvalidArgument,
                        "no metrics to correlate (--metrics, --categorical or --catalog)");
        }

        const auto cube = load_cube(config);
        const auto series = agreement_series(cube);
        const auto dir = prepare_out_dir(config.out);

        std::vector<CorrelationRow> rows;
        for (const auto& name : table.numeric_names()) {
            const auto stem = file_stem(name);
            const auto agreed = agreed_set_metric_series(cube, table, name, config.skip, policy);
            write_with(dir / fmt::format("agreed_{}.csv", stem),
                       [&](std::ostream& o) { write_agreed_series_csv(o, agreed); });

            CorrelationRow row;
            row.metric_name = name;
            try {
                row.report = correlate_agreement_with_metric(series, agreed, pairing);
                row.n = row.report->n;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::ConstantSeries && e.code() != ErrorCode::TooFewPoints) throw;
                warn(err, fmt::format("metric '{}': {}", name, e.what()));
                for (std::size_t i = 0; i < agreed.mean.size(); ++i) {
                    const auto it = std::find(series.epochs.begin(), series.epochs.end(), agreed.epochs[i]);
                    const auto pos = static_cast<std::size_t>(it - series.epochs.begin());
                    if (agreed.mean[i] && it != series.epochs.end() && series.tpa[pos]) ++row.n;
                }
            }
            write_file(dir / fmt::format("overlay_{}.svg", stem),
                       render_overlay_svg(series, agreed, row.report));
            rows.push_back(std::move(row));

            if (!table.numeric(name).empty()) {
                const auto hist = metric_histogram(table, name, config.bins);
                write_with(dir / fmt::format("histogram_{}.csv", stem),
                           [&](std::ostream& o) { write_histogram_csv(o, hist); });
                write_file(dir / fmt::format("histogram_{}.svg", stem),
                           render_histogram_svg(hist, name));
            }
        }
        write_with(dir / "correlation.csv", [&](std::ostream& o) { write_correlation_csv(o, rows); });

        for (const auto& name : table.categorical_names()) {
            CategoricalLearnedSeries learned;
            try {
                learned = categorical_learned_fraction(cube, table.categorical(name), name);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::MissingCategory || !config.skip_missing) throw;
                warn(err, fmt::format("category '{}' skipped: {}", name, e.what()));
                continue;
            }
            const auto stem = file_stem(name);
            write_with(dir / fmt::format("categorical_{}.csv", stem),
                       [&](std::ostream& o) { write_categorical_csv(o, learned, config.percent); });
            write_file(dir / fmt::format("categorical_{}.svg", stem), render_categorical_svg(learned));
        }
    });
}

int cmd_synth(const RunConfig& config, std::ostream& err) {
    return guarded(err, [&] {
        if (config.runs < 2) throw Error(ErrorCode::TooFewRuns, "--runs must be at least 2");
        if (config.epochs < 1 || config.instances < 1) {
            throw Error(ErrorCode::InvalidArgument, "--epochs and --instances must be positive");
        }
        if (!(config.difficulty_min >= 0.0 && config.difficulty_min <= config.difficulty_max &&
              config.difficulty_max <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument,
                        "difficulty range must satisfy 0 <= min <= max <= 1");
        }
        if (!(config.ramp > 0.0) || !(config.plateau > 0.0 && config.plateau <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "--ramp must be positive and --plateau in (0,1]");
        }

        SynthConfig synth;
        synth.num_runs = config.runs;
        synth.num_epochs = config.epochs;
        synth.seed = config.seed;
        synth.forget_probability = config.forget;
        synth.schedule.scale = config.plateau;
        synth.schedule.ramp_epochs = config.ramp;
        if (config.schedule == "constant") {
            synth.schedule.kind = LearningSchedule::Kind::Constant;
        } else if (config.schedule == "linear") {
            synth.schedule.kind = LearningSchedule::Kind::Linear;
        } else if (config.schedule == "saturating") {
            synth.schedule.kind = LearningSchedule::Kind::Saturating;
        } else {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("unknown schedule '{}' (constant|linear|saturating)", config.schedule));
        }

        const double lo = config.difficulty_min, hi = config.difficulty_max;
        synth.difficulty.resize(config.instances);
        if (config.difficulty == "uniform") {
            std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                              static_cast<std::uint32_t>(config.seed >> 32), 0xd1ffu};
            std::mt19937_64 rng(seq);
            for (auto& d : synth.difficulty) {
                d = lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
            }
        } else if (config.difficulty == "linspace") {
            for (std::size_t n = 0; n < config.instances; ++n) {
                synth.difficulty[n] =
                    config.instances == 1
                        ? lo
                        : lo + (hi - lo) * static_cast<double>(n) /
                                   static_cast<double>(config.instances - 1);
            }
        } else {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("unknown difficulty distribution '{}' (uniform|linspace)",
                                    config.difficulty));
        }

        const auto logs = generate_synthetic_logs(synth);
        const auto dir = prepare_out_dir(config.out);
        for (const auto& log : logs) {
            write_with(dir / (log.run_id + ".jsonl"), [&](std::ostream& o) {
                for (const auto& rec : log.records) write_record(o, rec);
            });
        }
        MetricTable sidecar;
        for (std::size_t n = 0; n < config.instances; ++n) {
            sidecar.set_numeric("difficulty", synthetic_instance_id(n, config.instances),
                                synth.difficulty[n]);
        }
        write_with(dir / "difficulty.csv", [&](std::ostream& o) { write_metric_table(o, sidecar); });
    });
}

// ---------------------------------------------------------------------------
// Argument parsing

namespace {

bool truthy(std::string value) {
    std::transform(value.begin(), value.end(), value.begin(), ::tolower);
    return value == "1" || value == "true" || value == "yes" || value == "on";
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Appends `--key value` for each config entry not given explicitly.
// Unknown keys and unreadable files raise Error.
void apply_config_file(CLI::App* sub, std::vector<std::string>& args, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open config file '{}'", path));
    std::set<std::string> explicit_keys;
    for (const auto& a : args) {
        if (a.rfind("--", 0) == 0) explicit_keys.insert(a.substr(2, a.find('=') - 2));
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("{}:{}: expected key=value", path, line_no));
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        while (!key.empty() && key[0] == '-') key.erase(0, 1);
        if (key == "config") continue;
        const auto* opt = sub->get_option_no_throw("--" + key);
        if (!opt) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("{}:{}: unknown key '{}' for '{}'", path, line_no, key,
                                    sub->get_name()));
        }
        if (explicit_keys.count(key)) continue;
        if (opt->get_expected_min() == 0) {
            if (truthy(value)) args.push_back("--" + key);
        } else {
            args.push_back("--" + key);
            args.push_back(value);
        }
    }
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Classifier agreement and image-statistics analysis", "learnorder"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    auto add_common_out = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
        sub->add_option("--config", "key=value file with defaults for this subcommand");
    };
    auto add_logs = [&](CLI::App* sub) {
        sub->add_option("--logs", cfg.logs, "Run log files or glob patterns (.jsonl)")
            ->required()
            ->delimiter(',');
    };

    auto* stats = app.add_subcommand("compute-stats", "Compute per-image statistics for a catalog");
    stats->add_option("--catalog", cfg.catalog, "Instance catalog CSV")->required();
    stats->add_option("--metrics", cfg.metrics,
                      "entropy, segment_count, dct_percentage, edge_strength_sobel")
        ->delimiter(',')
        ->capture_default_str();
    stats->add_option("--sigma", cfg.sigma, "Segmentation smoothing sigma")->capture_default_str();
    stats->add_option("--scale-k", cfg.scale_k, "Segmentation scale k")->capture_default_str();
    stats->add_option("--min-size", cfg.min_size, "Segmentation minimum component size")
        ->capture_default_str();
    stats->add_option("--window", cfg.window, "Local entropy window")->capture_default_str();
    stats->add_option("--energy-fraction", cfg.energy_fraction, "DCT energy fraction")
        ->capture_default_str();
    stats->add_option("--downsample", cfg.downsample,
                      "Resample to NxN before entropy and DCT (0 = off)")
        ->capture_default_str();
    stats->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();
    stats->add_flag("--seg-gray", cfg.seg_gray, "Segment the grayscale image instead of RGB");
    stats->add_flag("--skip-undecodable", cfg.skip_undecodable, "Skip images that fail to load");
    add_common_out(stats);

    auto* analyze = app.add_subcommand("analyze", "Per-epoch agreement statistics and plot");
    add_logs(analyze);
    analyze->add_option("--group-size", cfg.group_size,
                        "Also report mean/std over consecutive groups of this many runs")
        ->capture_default_str();
    analyze->add_flag("--percent", cfg.percent, "Write CSV values in percent");
    analyze->add_flag("--no-era", cfg.no_era, "Omit the expected random agreement curve");
    analyze->add_flag("--no-pabak", cfg.no_pabak, "Omit the PABAK curve");
    add_common_out(analyze);

    auto* correlate = app.add_subcommand("correlate", "Correlate agreement with per-instance metrics");
    add_logs(correlate);
    correlate->add_option("--metrics", cfg.metric_files, "Numeric metric CSV files")->delimiter(',');
    correlate->add_option("--categorical", cfg.categorical_files, "Categorical metric CSV files")
        ->delimiter(',');
    correlate->add_option("--catalog", cfg.catalog, "Catalog whose category columns are analysed");
    correlate->add_option("--skip", cfg.skip, "Leading epochs left out")->capture_default_str();
    correlate->add_option("--bins", cfg.bins, "Histogram bins")->capture_default_str();
    correlate->add_option("--pairing", cfg.pairing, "agreement | epoch")->capture_default_str();
    correlate->add_flag("--skip-missing", cfg.skip_missing,
                        "Tolerate instances without a metric value");
    correlate->add_flag("--percent", cfg.percent, "Write categorical CSV values in percent");
    add_common_out(correlate);

    auto* synth = app.add_subcommand("synth", "Generate synthetic run logs with planted difficulty");
    synth->add_option("--runs", cfg.runs, "Number of runs")->capture_default_str();
    synth->add_option("--epochs", cfg.epochs, "Number of epochs")->capture_default_str();
    synth->add_option("--instances", cfg.instances, "Number of instances")->capture_default_str();
    synth->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    synth->add_option("--difficulty", cfg.difficulty, "uniform | linspace")->capture_default_str();
    synth->add_option("--difficulty-min", cfg.difficulty_min)->capture_default_str();
    synth->add_option("--difficulty-max", cfg.difficulty_max)->capture_default_str();
    synth->add_option("--schedule", cfg.schedule, "constant | linear | saturating")
        ->capture_default_str();
    synth->add_option("--ramp", cfg.ramp, "Epochs to plateau (linear) or time constant (saturating)")
        ->capture_default_str();
    synth->add_option("--plateau", cfg.plateau, "Maximum per-epoch learning rate")->capture_default_str();
    synth->add_option("--forget", cfg.forget, "Per-epoch forget probability")->capture_default_str();
    add_common_out(synth);

    // key=value defaults for the chosen subcommand
    if (!args.empty()) {
        CLI::App* chosen = nullptr;
        for (auto* sub : {stats, analyze, correlate, synth}) {
            if (sub->get_name() == args.front()) chosen = sub;
        }
        if (chosen) {
            std::string config_path;
            for (std::size_t i = 1; i < args.size(); ++i) {
                if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
                if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
            }
            if (!config_path.empty()) {
                try {
                    apply_config_file(chosen, args, config_path);
                } catch (const Error& e) {
                    err << "error: " << e.what() << '\n';
                    return is_io_error(e.code()) ? kExitIo : kExitValidation;
                }
            }
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    if (stats->parsed()) return cmd_compute_stats(cfg, err);
    if (analyze->parsed()) return cmd_analyze(cfg, err);
    if (correlate->parsed()) return cmd_correlate(cfg, err);
    return cmd_synth(cfg, err);
}

} // namespace learnorder
