#include "learnorder/correlation.hpp"

#include "learnorder/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace learnorder {

AgreedSetMetricSeries agreed_set_metric_series(const CorrectnessCube& cube,
                                               const MetricTable& table,
                                               const std::string& metric_name, std::size_t skip,
                                               CoveragePolicy policy) {
    const auto& column = table.numeric(metric_name);
    std::vector<std::optional<double>> value_of(cube.num_instances());
    for (std::size_t n = 0; n < cube.num_instances(); ++n) {
        auto it = column.find(cube.instances()[n]);
        if (it != column.end()) {
            value_of[n] = it->second;
        } else if (policy == CoveragePolicy::Strict) {
            throw Error(ErrorCode::MetricCoverageGap,
                        fmt::format("metric '{}' has no value for instance '{}'", metric_name,
                                    cube.instances()[n]));
        }
    }

    AgreedSetMetricSeries out;
    out.metric_name = metric_name;
    for (std::size_t t = skip; t < cube.num_epochs(); ++t) {
        const auto mask = agreed_mask(cube, t);
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t n = 0; n < mask.size(); ++n) {
            if (mask[n] && value_of[n]) {
                sum += *value_of[n];
                ++count;
            }
        }
        out.epochs.push_back(cube.epochs()[t]);
        out.count.push_back(count);
        if (count) {
            out.mean.emplace_back(sum / static_cast<double>(count));
        } else {
            out.mean.emplace_back();
        }
    }
    return out;
}

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "incomplete beta needs positive shape parameters");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "incomplete beta argument outside [0,1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0.0)) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
    return t >= 0 ? 1.0 - tail : tail;
}

double pearson_p_value(double r, std::size_t n) {
    if (n < 3) throw Error(ErrorCode::TooFewPoints, "p-value needs at least 3 points");
    const double dof = static_cast<double>(n - 2);
    const double ar = std::min(std::abs(r), 1.0);
    if (ar == 1.0) return 0.0;
    // dof / (dof + t^2) simplifies to 1 - r^2.
    const double x = (1.0 - ar) * (1.0 + ar);
    return std::clamp(regularized_incomplete_beta(0.5 * dof, 0.5, x), 0.0, 1.0);
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    fmt::format("series lengths differ ({} vs {})", x.size(), y.size()));
    }
    const std::size_t n = x.size();
    if (n < 3) throw Error(ErrorCode::TooFewPoints, fmt::format("need at least 3 points, got {}", n));
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw Error(ErrorCode::ConstantSeries, "correlation undefined for a constant series");
    }
    PearsonResult out;
    out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    out.p = pearson_p_value(out.r, n);
    return out;
}

CorrelationReport correlate_agreement_with_metric(const AgreementSeries& series,
                                                  const AgreedSetMetricSeries& agreed,
                                                  CorrelationPairing pairing) {
    std::map<std::int64_t, std::optional<double>> tpa_at;
    for (std::size_t i = 0; i < series.size(); ++i) tpa_at.emplace(series.epochs[i], series.tpa[i]);

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < agreed.epochs.size(); ++i) {
        if (!agreed.mean[i]) continue;
        const auto epoch = agreed.epochs[i];
        auto it = tpa_at.find(epoch);
        if (it == tpa_at.end() || !it->second) continue;
        xs.push_back(pairing == CorrelationPairing::Agreement ? *it->second
                                                              : static_cast<double>(epoch));
        ys.push_back(*agreed.mean[i]);
    }
    const auto res = pearson(xs, ys);
    CorrelationReport report;
    report.metric_name = agreed.metric_name;
    report.r = res.r;
    report.p = res.p;
    report.bracketed = res.p >= kBracketPValue;
    report.n = xs.size();
    return report;
}

std::string format_r_annotation(const CorrelationReport& report) {
    const auto text = fmt::format("r={:.2f}", report.r);
    return report.bracketed ? "[" + text + "]" : text;
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
    if (values.empty()) throw Error(ErrorCode::EmptyMetric, "histogram of an empty metric");
    if (bins == 0) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
    h.edges.back() = hi;
    h.counts.assign(bins, 0);
    for (double v : values) {
        auto idx = static_cast<std::size_t>(
            std::floor((v - lo) / (hi - lo) * static_cast<double>(bins)));
        ++h.counts[std::min(idx, bins - 1)];
    }
    return h;
}

Histogram metric_histogram(const MetricTable& table, const std::string& metric_name,
                           std::size_t bins) {
    const auto& column = table.numeric(metric_name);
    std::vector<double> values;
    values.reserve(column.size());
    for (const auto& entry : column) values.push_back(entry.second);
    return histogram(values, bins);
}

} // namespace learnorder
