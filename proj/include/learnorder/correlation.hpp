#pragma once

#include "learnorder/agreement.hpp"
#include "learnorder/metric_table.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace learnorder {

enum class CoveragePolicy {
    Strict,        // every cube instance must carry the metric (MetricCoverageGap)
    IgnoreMissing, // instances without a value drop out of the means
};

struct AgreedSetMetricSeries {
    std::string metric_name;
    std::vector<std::int64_t> epochs;         // cube epochs after the warm-up skip
    std::vector<std::optional<double>> mean;  // nullopt when the agreed set is empty
    std::vector<std::size_t> count;           // agreed instances contributing to the mean
};

// Mean metric value over the instances all runs classify correctly, for
// every epoch position >= skip.
AgreedSetMetricSeries agreed_set_metric_series(const CorrectnessCube& cube,
                                               const MetricTable& table,
                                               const std::string& metric_name,
                                               std::size_t skip = 5,
                                               CoveragePolicy policy = CoveragePolicy::Strict);

// Regularised incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// P(T <= t) for Student's t with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

struct PearsonResult {
    double r = 0.0;
    double p = 1.0; // two-tailed, t = r sqrt((n-2)/(1-r^2)) on n-2 degrees of freedom
};

// Throws LengthMismatch, TooFewPoints (n < 3), ConstantSeries.
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

// Two-tailed p-value of a sample correlation r over n points.
double pearson_p_value(double r, std::size_t n);

enum class CorrelationPairing {
    Agreement,  // TPa against agreed-set metric means
    EpochIndex, // epoch number against agreed-set metric means
};

inline constexpr double kBracketPValue = 0.001;

struct CorrelationReport {
    std::string metric_name;
    double r = 0.0;
    double p = 1.0;
    bool bracketed = true; // p >= 0.001
    std::size_t n = 0;     // epochs entering r
};

// Pairs the series by epoch and drops any epoch where either side is
// undefined. Propagates pearson errors.
CorrelationReport correlate_agreement_with_metric(
    const AgreementSeries& series, const AgreedSetMetricSeries& agreed,
    CorrelationPairing pairing = CorrelationPairing::Agreement);

// "r=0.93", or "[r=0.93]" when bracketed.
std::string format_r_annotation(const CorrelationReport& report);

struct Histogram {
    std::vector<double> edges;       // bins + 1 ascending edges
    std::vector<std::size_t> counts; // bins
};

// Equal-width bins over [min, max]; the max lands in the last bin. A
// constant sample uses the range [v - 0.5, v + 0.5].
// Throws EmptyMetric on no values, InvalidArgument on zero bins.
Histogram histogram(std::span<const double> values, std::size_t bins = 50);
Histogram metric_histogram(const MetricTable& table, const std::string& metric_name,
                           std::size_t bins = 50);

} // namespace learnorder
