#pragma once

#include "learnorder/image_stats.hpp"
#include "learnorder/run_ledger.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace learnorder {

enum class MetricKind { Numeric, Categorical };

// Per-instance metric values. Column order is insertion order and is the
// order used for serialisation.
class MetricTable {
public:
    using NumericColumn = std::map<std::string, double, std::less<>>;
    using CategoricalColumn = std::map<std::string, std::string, std::less<>>;

    // Throws InvalidArgument on a duplicate (metric, instance) pair or a
    // non-finite value; a metric name may not be both numeric and categorical.
    void set_numeric(const std::string& metric, const std::string& instance, double value);
    void set_categorical(const std::string& metric, const std::string& instance,
                         std::string value);

    // Declares an (initially empty) column; no-op when it already exists.
    void add_column(const std::string& metric, MetricKind kind);

    // Adds every column of `other`; same duplicate rules as the setters.
    void merge(const MetricTable& other);

    const std::vector<std::string>& numeric_names() const noexcept { return numeric_order_; }
    const std::vector<std::string>& categorical_names() const noexcept {
        return categorical_order_;
    }

    bool has_numeric(std::string_view metric) const;
    bool has_categorical(std::string_view metric) const;
    const NumericColumn& numeric(std::string_view metric) const;        // throws EmptyMetric
    const CategoricalColumn& categorical(std::string_view metric) const; // throws EmptyMetric

    std::optional<double> value(std::string_view metric, std::string_view instance) const;

    // Sorted union of all instance ids with at least one value.
    std::vector<std::string> instances() const;

    bool empty() const noexcept { return numeric_order_.empty() && categorical_order_.empty(); }

private:
    std::map<std::string, NumericColumn, std::less<>> numeric_;
    std::map<std::string, CategoricalColumn, std::less<>> categorical_;
    std::vector<std::string> numeric_order_;
    std::vector<std::string> categorical_order_;
};

// `instance,<metric names...>` CSV. Empty cells mean "no value". Numeric
// cells must parse as finite reals (NonNumericCell); structural problems
// raise MalformedCSV.
MetricTable ingest_sidecar_metrics(std::istream& in, MetricKind kind,
                                   std::string_view source = "<sidecar>");
MetricTable read_sidecar_file(const std::filesystem::path& path, MetricKind kind);

// Numeric columns first, then categorical; rows in instance order; reals
// with 9 significant digits.
void write_metric_table(std::ostream& out, const MetricTable& table);

// Catalog category columns as categorical metrics.
MetricTable catalog_categories(const InstanceCatalog& catalog);

enum class ImageMetric { Entropy, SegmentCount, DctPercentage, EdgeStrength };

// Output column names: entropy, segment_count, dct_percentage, edge_strength_sobel.
std::string_view metric_column_name(ImageMetric metric);
// Accepts the column names plus short aliases (segments, dct, edges).
std::optional<ImageMetric> parse_image_metric(std::string_view name);

struct CorpusMetricOptions {
    std::vector<ImageMetric> metrics{ImageMetric::Entropy, ImageMetric::SegmentCount,
                                     ImageMetric::DctPercentage, ImageMetric::EdgeStrength};
    std::size_t entropy_window = 10;
    double energy_fraction = 0.9998;
    SegmentationParams segmentation;
    bool segment_gray = false;      // segment the luma instead of RGB
    std::size_t downsample = 0;     // >0: entropy and DCT computed on a downsample x downsample copy
    bool skip_undecodable = false;  // omit instances whose image fails to load
    std::size_t threads = 0;        // 0: hardware concurrency
    std::function<void(const std::string&)> warn; // optional diagnostics sink
};

// Metrics for every catalog entry, computed on the original images.
// Throws ImageDecodeError naming the instance unless skip_undecodable.
MetricTable compute_corpus_metrics(const InstanceCatalog& catalog,
                                   const CorpusMetricOptions& options = {});

struct ImageMetricValues {
    std::vector<std::pair<ImageMetric, double>> values;
    bool dct_degenerate = false;
};

ImageMetricValues compute_image_metrics(const RgbImage& image, const CorpusMetricOptions& options);

} // namespace learnorder
