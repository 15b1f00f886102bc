#pragma once

#include "learnorder/agreement.hpp"
#include "learnorder/correlation.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace learnorder {

// CSV writers. `percent` multiplies agreement-type values by 100.
void write_agreement_csv(std::ostream& out, const AgreementSeries& series, bool percent = false);
// Reads the agreement CSV back (values as written, no percent rescaling).
AgreementSeries read_agreement_csv(std::istream& in, std::string_view source = "<agreement>");

void write_group_stats_csv(std::ostream& out, const GroupAgreementStats& stats, bool percent = false);
void write_agreed_series_csv(std::ostream& out, const AgreedSetMetricSeries& series);

struct CorrelationRow {
    std::string metric_name;
    std::optional<CorrelationReport> report; // nullopt: correlation undefined
    std::size_t n = 0;
};
void write_correlation_csv(std::ostream& out, const std::vector<CorrelationRow>& rows);
void write_categorical_csv(std::ostream& out, const CategoricalLearnedSeries& series,
                           bool percent = false);
void write_histogram_csv(std::ostream& out, const Histogram& hist);

namespace palette {
inline constexpr const char* kAgreement = "#1f4e9c";
inline constexpr const char* kAccuracy = "#c0392b";
inline constexpr const char* kMetric = "#7b3294";
inline constexpr const char* kExpectedRandom = "#2e8b57";
inline constexpr const char* kPabak = "#e67e22";
} // namespace palette

struct AgreementPlotOptions {
    bool show_expected_random = true;
    bool show_pabak = true;
    std::string title = "True positive agreement";
};

// Agreement curve, lower bound with the gap between them shaded, accuracy
// mean with a +-std band, optional expected-random and PABAK curves; y axis
// in percent. Undefined TPa epochs split the curve.
std::string render_agreement_svg(const AgreementSeries& series,
                                 const AgreementPlotOptions& options = {});

// Agreement (left axis, percent) against agreed-set metric means (right
// axis) over the post-warm-up epochs, annotated with r.
std::string render_overlay_svg(const AgreementSeries& series, const AgreedSetMetricSeries& agreed,
                               const std::optional<CorrelationReport>& report);

std::string render_histogram_svg(const Histogram& hist, const std::string& metric_name);

// One learned-fraction curve per category value, in percent.
std::string render_categorical_svg(const CategoricalLearnedSeries& series);

// Filesystem-safe stem for a metric name.
std::string file_stem(std::string_view metric_name);

} // namespace learnorder
