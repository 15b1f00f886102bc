#include "learnorder/report.hpp"

#include "learnorder/csv.hpp"
#include "learnorder/error.hpp"
#include "learnorder/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace learnorder {

namespace {

double scaled(double v, bool percent) { return percent ? v * 100.0 : v; }

std::optional<double> scaled(const std::optional<double>& v, bool percent) {
    if (!v) return std::nullopt;
    return scaled(*v, percent);
}

// Consecutive runs of defined points.
std::vector<std::vector<svg::Point>> defined_segments(const std::vector<std::int64_t>& xs,
                                                      const std::vector<std::optional<double>>& ys,
                                                      double scale) {
    std::vector<std::vector<svg::Point>> segments;
    std::vector<svg::Point> current;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ys[i]) {
            current.emplace_back(static_cast<double>(xs[i]), *ys[i] * scale);
        } else if (!current.empty()) {
            segments.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) segments.push_back(std::move(current));
    return segments;
}

const char* const kCategoryColours[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

} // namespace

void write_agreement_csv(std::ostream& out, const AgreementSeries& s, bool percent) {
    csv::write_row(out, {"epoch", "tpa", "lower_bound", "expected_random", "pabak",
                         "accuracy_mean", "accuracy_std"});
    for (std::size_t t = 0; t < s.size(); ++t) {
        csv::write_row(out, {std::to_string(s.epochs[t]), csv::format_optional(scaled(s.tpa[t], percent)),
                             csv::format_real(scaled(s.lower_bound[t], percent)),
                             csv::format_real(scaled(s.expected_random[t], percent)),
                             csv::format_real(scaled(s.pabak[t], percent)),
                             csv::format_real(scaled(s.accuracy_mean[t], percent)),
                             csv::format_real(scaled(s.accuracy_std[t], percent))});
    }
}

AgreementSeries read_agreement_csv(std::istream& in, std::string_view source) {
    const auto doc = csv::read(in, source);
    const csv::Row expected{"epoch", "tpa", "lower_bound", "expected_random", "pabak",
                            "accuracy_mean", "accuracy_std"};
    if (doc.header != expected) {
        throw Error(ErrorCode::MalformedCSV, fmt::format("{}: unexpected agreement header", source));
    }
    AgreementSeries s;
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        const auto& row = doc.rows[r];
        auto real = [&](std::size_t c) {
            const auto v = csv::parse_real(row[c]);
            if (!v) {
                throw Error(ErrorCode::NonNumericCell,
                            fmt::format("{}:{}: bad value '{}'", source, doc.line_numbers[r], row[c]));
            }
            return *v;
        };
        const double epoch = real(0);
        if (epoch < 0 || epoch != std::floor(epoch)) {
            throw Error(ErrorCode::MalformedCSV,
                        fmt::format("{}:{}: epoch must be a non-negative integer", source,
                                    doc.line_numbers[r]));
        }
        s.epochs.push_back(static_cast<std::int64_t>(epoch));
        if (row[1].empty()) {
            s.tpa.emplace_back();
        } else {
            s.tpa.emplace_back(real(1));
        }
        s.lower_bound.push_back(real(2));
        s.expected_random.push_back(real(3));
        s.pabak.push_back(real(4));
        s.accuracy_mean.push_back(real(5));
        s.accuracy_std.push_back(real(6));
    }
    return s;
}

void write_group_stats_csv(std::ostream& out, const GroupAgreementStats& g, bool percent) {
    csv::write_row(out, {"epoch", "tpa_mean", "tpa_std", "lower_bound_mean", "lower_bound_std",
                         "expected_random_mean", "expected_random_std", "groups_with_tpa"});
    for (std::size_t t = 0; t < g.epochs.size(); ++t) {
        csv::write_row(out, {std::to_string(g.epochs[t]),
                             csv::format_optional(scaled(g.tpa_mean[t], percent)),
                             csv::format_optional(scaled(g.tpa_std[t], percent)),
                             csv::format_real(scaled(g.lb_mean[t], percent)),
                             csv::format_real(scaled(g.lb_std[t], percent)),
                             csv::format_real(scaled(g.era_mean[t], percent)),
                             csv::format_real(scaled(g.era_std[t], percent)),
                             std::to_string(g.tpa_defined[t])});
    }
}

void write_agreed_series_csv(std::ostream& out, const AgreedSetMetricSeries& s) {
    csv::write_row(out, {"epoch", "mean", "count"});
    for (std::size_t i = 0; i < s.epochs.size(); ++i) {
        csv::write_row(out, {std::to_string(s.epochs[i]), csv::format_optional(s.mean[i]),
                             std::to_string(s.count[i])});
    }
}

void write_correlation_csv(std::ostream& out, const std::vector<CorrelationRow>& rows) {
    csv::write_row(out, {"metric", "r", "p", "bracketed", "n"});
    for (const auto& row : rows) {
        if (row.report) {
            csv::write_row(out, {row.metric_name, csv::format_real(row.report->r),
                                 csv::format_real(row.report->p),
                                 row.report->bracketed ? "true" : "false",
                                 std::to_string(row.report->n)});
        } else {
            csv::write_row(out, {row.metric_name, "", "", "", std::to_string(row.n)});
        }
    }
}

void write_categorical_csv(std::ostream& out, const CategoricalLearnedSeries& s, bool percent) {
    csv::Row header{"epoch"};
    for (const auto& [value, fractions] : s.fractions) header.push_back(value);
    csv::write_row(out, header);
    for (std::size_t t = 0; t < s.epochs.size(); ++t) {
        csv::Row row{std::to_string(s.epochs[t])};
        for (const auto& [value, fractions] : s.fractions) {
            row.push_back(csv::format_real(scaled(fractions[t], percent)));
        }
        csv::write_row(out, row);
    }
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
    csv::write_row(out, {"bin_low", "bin_high", "count"});
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        csv::write_row(out, {csv::format_real(h.edges[i]), csv::format_real(h.edges[i + 1]),
                             std::to_string(h.counts[i])});
    }
}

std::string render_agreement_svg(const AgreementSeries& s, const AgreementPlotOptions& options) {
    svg::Chart chart;
    chart.set_title(options.title);
    const double xmin = s.epochs.empty() ? 0.0 : static_cast<double>(s.epochs.front());
    const double xmax = s.epochs.empty() ? 1.0 : static_cast<double>(s.epochs.back());
    chart.set_x_axis(xmin, xmax, "epoch");
    double ymin = 0.0;
    if (options.show_pabak) {
        for (double p : s.pabak) ymin = std::min(ymin, p * 100.0);
        ymin = std::floor(ymin / 10.0) * 10.0;
    }
    chart.set_y_axis(ymin, 100.0, "percent");

    // shaded gap between lower bound and agreement
    std::size_t seg = 0;
    for (std::size_t i = 0; i < s.size();) {
        if (!s.tpa[i]) {
            ++i;
            continue;
        }
        std::vector<double> xs, lo, hi;
        for (; i < s.size() && s.tpa[i]; ++i) {
            xs.push_back(static_cast<double>(s.epochs[i]));
            lo.push_back(s.lower_bound[i] * 100.0);
            hi.push_back(*s.tpa[i] * 100.0);
        }
        chart.add_band(fmt::format("agreement-gap-{}", seg++), xs, lo, hi, palette::kAgreement, 0.22);
    }
    {
        std::vector<double> xs, lo, hi;
        for (std::size_t i = 0; i < s.size(); ++i) {
            xs.push_back(static_cast<double>(s.epochs[i]));
            lo.push_back(std::clamp((s.accuracy_mean[i] - s.accuracy_std[i]) * 100.0, ymin, 100.0));
            hi.push_back(std::clamp((s.accuracy_mean[i] + s.accuracy_std[i]) * 100.0, ymin, 100.0));
        }
        chart.add_band("accuracy-std", xs, lo, hi, palette::kAccuracy, 0.25);
    }

    auto curve = [&](const std::vector<double>& ys) {
        std::vector<svg::Point> pts;
        for (std::size_t i = 0; i < s.size(); ++i) {
            pts.emplace_back(static_cast<double>(s.epochs[i]), ys[i] * 100.0);
        }
        return pts;
    };
    chart.add_polyline("lower_bound", curve(s.lower_bound), {palette::kAgreement, 1.5, "6 4"});
    chart.add_polyline("accuracy_mean", curve(s.accuracy_mean), {palette::kAccuracy, 2.0, ""});
    if (options.show_expected_random) {
        chart.add_polyline("expected_random", curve(s.expected_random),
                           {palette::kExpectedRandom, 1.5, "2 3"});
    }
    if (options.show_pabak) {
        chart.add_polyline("pabak", curve(s.pabak), {palette::kPabak, 1.5, "8 3 2 3"});
    }
    for (const auto& segment : defined_segments(s.epochs, s.tpa, 100.0)) {
        chart.add_polyline("tpa", segment, {palette::kAgreement, 2.5, ""});
    }

    chart.add_legend_entry("agreement (TPa)", palette::kAgreement);
    chart.add_legend_entry("lower bound", palette::kAgreement, "6 4");
    chart.add_legend_entry("accuracy mean +- std", palette::kAccuracy);
    if (options.show_expected_random) {
        chart.add_legend_entry("expected random", palette::kExpectedRandom, "2 3");
    }
    if (options.show_pabak) chart.add_legend_entry("PABAK", palette::kPabak, "8 3 2 3");
    return chart.render();
}

std::string render_overlay_svg(const AgreementSeries& s, const AgreedSetMetricSeries& agreed,
                               const std::optional<CorrelationReport>& report) {
    svg::Chart chart;
    chart.set_title(fmt::format("Agreement vs. {}", agreed.metric_name));
    const double xmin = agreed.epochs.empty() ? 0.0 : static_cast<double>(agreed.epochs.front());
    const double xmax = agreed.epochs.empty() ? 1.0 : static_cast<double>(agreed.epochs.back());
    chart.set_x_axis(xmin, xmax, "epoch");
    chart.set_y_axis(0.0, 100.0, "agreement (percent)");

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& m : agreed.mean) {
        if (!m) continue;
        lo = any ? std::min(lo, *m) : *m;
        hi = any ? std::max(hi, *m) : *m;
        any = true;
    }
    const double pad = (hi - lo) * 0.05;
    chart.set_y2_axis(lo - pad, hi + pad, fmt::format("mean {} of agreed instances", agreed.metric_name));

    std::vector<std::int64_t> xs;
    std::vector<std::optional<double>> tpa;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.epochs[i] < xmin || s.epochs[i] > xmax) continue;
        xs.push_back(s.epochs[i]);
        tpa.push_back(s.tpa[i]);
    }
    for (const auto& segment : defined_segments(xs, tpa, 100.0)) {
        chart.add_polyline("tpa", segment, {palette::kAgreement, 2.5, ""});
    }
    for (const auto& segment : defined_segments(agreed.epochs, agreed.mean, 1.0)) {
        chart.add_polyline("metric_mean", segment, {palette::kMetric, 2.5, ""}, svg::Axis::Right);
    }
    chart.add_note("r-annotation", report ? format_r_annotation(*report) : std::string("r undefined"),
                   12, 22, "#000000");
    chart.add_legend_entry("agreement (TPa)", palette::kAgreement);
    chart.add_legend_entry(agreed.metric_name, palette::kMetric);
    return chart.render();
}

std::string render_histogram_svg(const Histogram& h, const std::string& metric_name) {
    svg::Chart chart;
    chart.set_title(fmt::format("Histogram of {}", metric_name));
    chart.set_x_axis(h.edges.front(), h.edges.back(), metric_name);
    const std::size_t peak = h.counts.empty() ? 1 : *std::max_element(h.counts.begin(), h.counts.end());
    chart.set_y_axis(0.0, static_cast<double>(std::max<std::size_t>(peak, 1)), "count");
    std::vector<double> heights(h.counts.begin(), h.counts.end());
    chart.add_bars("counts", h.edges, heights, palette::kMetric);
    return chart.render();
}

std::string render_categorical_svg(const CategoricalLearnedSeries& s) {
    svg::Chart chart;
    chart.set_title(fmt::format("Agreed fraction per {}", s.category_name));
    const double xmin = s.epochs.empty() ? 0.0 : static_cast<double>(s.epochs.front());
    const double xmax = s.epochs.empty() ? 1.0 : static_cast<double>(s.epochs.back());
    chart.set_x_axis(xmin, xmax, "epoch");
    chart.set_y_axis(0.0, 100.0, "learned by all runs (percent)");
    std::size_t colour = 0;
    for (const auto& [value, fractions] : s.fractions) {
        const char* c = kCategoryColours[colour++ % std::size(kCategoryColours)];
        std::vector<svg::Point> pts;
        for (std::size_t t = 0; t < s.epochs.size(); ++t) {
            pts.emplace_back(static_cast<double>(s.epochs[t]), fractions[t] * 100.0);
        }
        chart.add_polyline(value, pts, {c, 2.0, ""});
        chart.add_legend_entry(fmt::format("{} (n={})", value, s.totals.at(value)), c);
    }
    return chart.render();
}

std::string file_stem(std::string_view metric_name) {
    std::string out;
    for (char c : metric_name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '_' || c == '-' || c == '.';
        out.push_back(ok ? c : '_');
    }
    if (out.empty() || out == "." || out == "..") out = "_" + out;
    return out;
}

} // namespace learnorder
