#include "learnorder/metric_table.hpp"

#include "learnorder/csv.hpp"
#include "learnorder/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <ostream>
#include <set>
#include <thread>

namespace learnorder {

void MetricTable::add_column(const std::string& metric, MetricKind kind) {
    if (metric.empty()) throw Error(ErrorCode::InvalidArgument, "metric name must be non-empty");
    const bool numeric = numeric_.count(metric) > 0;
    const bool categorical = categorical_.count(metric) > 0;
    if ((kind == MetricKind::Numeric && categorical) ||
        (kind == MetricKind::Categorical && numeric)) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("metric '{}' cannot be both numeric and categorical", metric));
    }
    if (kind == MetricKind::Numeric && !numeric) {
        numeric_.emplace(metric, NumericColumn{});
        numeric_order_.push_back(metric);
    } else if (kind == MetricKind::Categorical && !categorical) {
        categorical_.emplace(metric, CategoricalColumn{});
        categorical_order_.push_back(metric);
    }
}

void MetricTable::set_numeric(const std::string& metric, const std::string& instance,
                              double value) {
    if (!std::isfinite(value)) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("non-finite value for metric '{}' instance '{}'", metric, instance));
    }
    add_column(metric, MetricKind::Numeric);
    if (!numeric_.find(metric)->second.emplace(instance, value).second) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("metric '{}' already has a value for instance '{}'", metric,
                                instance));
    }
}

void MetricTable::set_categorical(const std::string& metric, const std::string& instance,
                                  std::string value) {
    add_column(metric, MetricKind::Categorical);
    if (!categorical_.find(metric)->second.emplace(instance, std::move(value)).second) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("metric '{}' already has a value for instance '{}'", metric,
                                instance));
    }
}

void MetricTable::merge(const MetricTable& other) {
    for (const auto& name : other.numeric_order_) {
        add_column(name, MetricKind::Numeric);
        for (const auto& [instance, value] : other.numeric(name)) set_numeric(name, instance, value);
    }
    for (const auto& name : other.categorical_order_) {
        add_column(name, MetricKind::Categorical);
        for (const auto& [instance, value] : other.categorical(name)) {
            set_categorical(name, instance, value);
        }
    }
}

bool MetricTable::has_numeric(std::string_view metric) const {
    return numeric_.find(metric) != numeric_.end();
}

bool MetricTable::has_categorical(std::string_view metric) const {
    return categorical_.find(metric) != categorical_.end();
}

const MetricTable::NumericColumn& MetricTable::numeric(std::string_view metric) const {
    auto it = numeric_.find(metric);
    if (it == numeric_.end()) {
        throw Error(ErrorCode::EmptyMetric, fmt::format("no numeric metric '{}'", metric));
    }
    return it->second;
}

const MetricTable::CategoricalColumn& MetricTable::categorical(std::string_view metric) const {
    auto it = categorical_.find(metric);
    if (it == categorical_.end()) {
        throw Error(ErrorCode::EmptyMetric, fmt::format("no categorical metric '{}'", metric));
    }
    return it->second;
}

std::optional<double> MetricTable::value(std::string_view metric, std::string_view instance) const {
    auto col = numeric_.find(metric);
    if (col == numeric_.end()) return std::nullopt;
    auto it = col->second.find(instance);
    if (it == col->second.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> MetricTable::instances() const {
    std::set<std::string> ids;
    for (const auto& [name, col] : numeric_) {
        for (const auto& entry : col) ids.insert(entry.first);
    }
    for (const auto& [name, col] : categorical_) {
        for (const auto& entry : col) ids.insert(entry.first);
    }
    return {ids.begin(), ids.end()};
}

MetricTable ingest_sidecar_metrics(std::istream& in, MetricKind kind, std::string_view source) {
    const auto doc = csv::read(in, source);
    if (doc.header.empty() || doc.header[0] != "instance") {
        throw Error(ErrorCode::MalformedCSV,
                    fmt::format("{}: header must start with 'instance'", source));
    }
    std::set<std::string> names;
    for (std::size_t c = 1; c < doc.header.size(); ++c) {
        if (doc.header[c].empty() || !names.insert(doc.header[c]).second) {
            throw Error(ErrorCode::MalformedCSV,
                        fmt::format("{}: empty or repeated metric column '{}'", source,
                                    doc.header[c]));
        }
    }

    MetricTable table;
    std::set<std::string> seen;
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        const auto& row = doc.rows[r];
        const auto line = doc.line_numbers[r];
        if (row[0].empty()) {
            throw Error(ErrorCode::MalformedCSV, fmt::format("{}:{}: empty instance id", source, line));
        }
        if (!seen.insert(row[0]).second) {
            throw Error(ErrorCode::MalformedCSV,
                        fmt::format("{}:{}: instance '{}' listed twice", source, line, row[0]));
        }
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (row[c].empty()) continue;
            if (kind == MetricKind::Numeric) {
                const auto v = csv::parse_real(row[c]);
                if (!v) {
                    throw Error(ErrorCode::NonNumericCell,
                                fmt::format("{}:{}: '{}' in column '{}' is not a finite number",
                                            source, line, row[c], doc.header[c]));
                }
                table.set_numeric(doc.header[c], row[0], *v);
            } else {
                table.set_categorical(doc.header[c], row[0], row[c]);
            }
        }
    }
    return table;
}

MetricTable read_sidecar_file(const std::filesystem::path& path, MetricKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open metric file '{}'", path.string()));
    return ingest_sidecar_metrics(in, kind, path.string());
}

void write_metric_table(std::ostream& out, const MetricTable& table) {
    csv::Row header{"instance"};
    for (const auto& n : table.numeric_names()) header.push_back(n);
    for (const auto& n : table.categorical_names()) header.push_back(n);
    csv::write_row(out, header);
    for (const auto& id : table.instances()) {
        csv::Row row{id};
        for (const auto& n : table.numeric_names()) {
            const auto& col = table.numeric(n);
            auto it = col.find(id);
            row.push_back(it == col.end() ? std::string() : csv::format_real(it->second));
        }
        for (const auto& n : table.categorical_names()) {
            const auto& col = table.categorical(n);
            auto it = col.find(id);
            row.push_back(it == col.end() ? std::string() : it->second);
        }
        csv::write_row(out, row);
    }
}

MetricTable catalog_categories(const InstanceCatalog& catalog) {
    MetricTable table;
    for (const auto& entry : catalog.entries()) {
        for (const auto& [name, value] : entry.categories) {
            table.set_categorical(name, entry.instance_id, value);
        }
    }
    return table;
}

std::string_view metric_column_name(ImageMetric metric) {
    switch (metric) {
    case ImageMetric::Entropy: return "entropy";
    case ImageMetric::SegmentCount: return "segment_count";
    case ImageMetric::DctPercentage: return "dct_percentage";
    case ImageMetric::EdgeStrength: return "edge_strength_sobel";
    }
    return "";
}

std::optional<ImageMetric> parse_image_metric(std::string_view name) {
    if (name == "entropy") return ImageMetric::Entropy;
    if (name == "segment_count" || name == "segments") return ImageMetric::SegmentCount;
    if (name == "dct_percentage" || name == "dct") return ImageMetric::DctPercentage;
    if (name == "edge_strength_sobel" || name == "edges") return ImageMetric::EdgeStrength;
    return std::nullopt;
}

ImageMetricValues compute_image_metrics(const RgbImage& image, const CorpusMetricOptions& options) {
    ImageMetricValues out;
    const GrayImage gray = to_grayscale(image);
    std::optional<GrayImage> reduced;
    auto small = [&]() -> const GrayImage& {
        if (options.downsample == 0) return gray;
        if (!reduced) reduced = resample(gray, options.downsample, options.downsample);
        return *reduced;
    };
    for (const auto metric : options.metrics) {
        double v = 0.0;
        switch (metric) {
        case ImageMetric::Entropy: v = mean_local_entropy(small(), options.entropy_window); break;
        case ImageMetric::SegmentCount:
            v = static_cast<double>(options.segment_gray
                                        ? segment_count(gray, options.segmentation)
                                        : segment_count(image, options.segmentation));
            break;
        case ImageMetric::DctPercentage: {
            const auto dct = dct_energy_percentage(small(), options.energy_fraction);
            out.dct_degenerate = dct.degenerate;
            v = dct.fraction;
            break;
        }
        case ImageMetric::EdgeStrength: v = edge_strength_sum(gray); break;
        }
        out.values.emplace_back(metric, v);
    }
    return out;
}

MetricTable compute_corpus_metrics(const InstanceCatalog& catalog,
                                   const CorpusMetricOptions& options) {
    if (options.metrics.empty()) throw Error(ErrorCode::InvalidArgument, "no metrics selected");
    for (std::size_t i = 0; i < options.metrics.size(); ++i) {
        for (std::size_t j = i + 1; j < options.metrics.size(); ++j) {
            if (options.metrics[i] == options.metrics[j]) {
                throw Error(ErrorCode::InvalidArgument, "metric selected twice");
            }
        }
    }
    const auto& entries = catalog.entries();
    struct Slot {
        std::optional<ImageMetricValues> values;
        std::exception_ptr error;
    };
    std::vector<Slot> slots(entries.size());

    auto work = [&](std::size_t i) {
        const auto& entry = entries[i];
        try {
            if (!entry.image_path) {
                throw Error(ErrorCode::ImageDecodeError,
                            fmt::format("instance '{}' has no image_path", entry.instance_id));
            }
            std::filesystem::path path(*entry.image_path);
            if (path.is_relative() && !catalog.base_dir.empty()) path = catalog.base_dir / path;
            RgbImage image;
            try {
                image = load_image(path);
            } catch (const Error& e) {
                throw Error(e.code(), fmt::format("instance '{}': {}", entry.instance_id, e.detail()));
            }
            slots[i].values = compute_image_metrics(image, options);
        } catch (...) {
            slots[i].error = std::current_exception();
        }
    };

    std::size_t threads = options.threads ? options.threads : std::thread::hardware_concurrency();
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, entries.size()));
    if (threads == 1) {
        for (std::size_t i = 0; i < entries.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < entries.size(); i = next++) work(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    MetricTable table;
    for (const auto metric : options.metrics) {
        table.add_column(std::string(metric_column_name(metric)), MetricKind::Numeric);
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (slots[i].error) {
            bool skippable = false;
            try {
                std::rethrow_exception(slots[i].error);
            } catch (const Error& e) {
                skippable = options.skip_undecodable && (e.code() == ErrorCode::ImageDecodeError ||
                                                         e.code() == ErrorCode::UnsupportedFormat);
                if (!skippable) throw;
                if (options.warn) options.warn(fmt::format("skipping: {}", e.what()));
            }
            continue;
        }
        const auto& values = *slots[i].values;
        if (values.dct_degenerate && options.warn) {
            options.warn(fmt::format("DegenerateFlat: instance '{}' has zero DCT energy",
                                     entries[i].instance_id));
        }
        for (const auto& [metric, v] : values.values) {
            table.set_numeric(std::string(metric_column_name(metric)), entries[i].instance_id, v);
        }
    }
    return table;
}

} // namespace learnorder
