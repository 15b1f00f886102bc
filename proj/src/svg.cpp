#include "learnorder/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace learnorder::svg {

namespace {

std::string coord(double v) {
    if (std::abs(v) < 0.0005) v = 0.0;
    return fmt::format("{:.3f}", v);
}

std::string tick_label(double v, double step) {
    if (std::abs(v) < step * 1e-9) v = 0.0;
    const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
    return fmt::format("{:.{}f}", v, std::max(decimals, 0));
}

std::string points_attr(const Chart& chart, const std::vector<Point>& points, Axis axis) {
    std::string out;
    for (const auto& [x, y] : points) {
        if (!out.empty()) out.push_back(' ');
        out += coord(chart.map_x(x));
        out.push_back(',');
        out += coord(chart.map_y(y, axis));
    }
    return out;
}

} // namespace

std::string escape_xml(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::vector<double> nice_ticks(double min, double max, std::size_t target) {
    if (!(max > min)) return {min};
    const double raw = (max - min) / static_cast<double>(std::max<std::size_t>(target, 1));
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    const double first = std::ceil(min / step - 1e-9) * step;
    for (double v = first; v <= max + step * 1e-9; v += step) ticks.push_back(v);
    return ticks;
}

Chart::Chart(double width, double height) : width_(width), height_(height) {}

void Chart::set_x_axis(double min, double max, std::string label) {
    if (!(max > min)) {
        min -= 0.5;
        max += 0.5;
    }
    x_ = {min, max, std::move(label), true};
}

void Chart::set_y_axis(double min, double max, std::string label) {
    if (!(max > min)) {
        min -= 0.5;
        max += 0.5;
    }
    y_ = {min, max, std::move(label), true};
}

void Chart::set_y2_axis(double min, double max, std::string label) {
    if (!(max > min)) {
        const double pad = std::max(std::abs(min) * 0.05, 0.5);
        min -= pad;
        max += pad;
    }
    y2_ = {min, max, std::move(label), true};
}

double Chart::map_x(double v) const {
    return left_ + (v - x_.min) / (x_.max - x_.min) * plot_width();
}

double Chart::map_y(double v, Axis axis) const {
    const Range& r = axis == Axis::Right ? y2_ : y_;
    return top_ + plot_height() - (v - r.min) / (r.max - r.min) * plot_height();
}

void Chart::add_polyline(std::string name, const std::vector<Point>& points, const Stroke& stroke,
                         Axis axis) {
    if (points.empty()) return;
    std::string dash = stroke.dash.empty()
                           ? std::string()
                           : fmt::format(" stroke-dasharray=\"{}\"", stroke.dash);
    elements_.push_back(fmt::format(
        "<polyline class=\"series\" data-series=\"{}\" data-axis=\"{}\" fill=\"none\" "
        "stroke=\"{}\" stroke-width=\"{}\"{} points=\"{}\"/>",
        escape_xml(name), axis == Axis::Right ? "right" : "left", stroke.color,
        coord(stroke.width), dash, points_attr(*this, points, axis)));
}

void Chart::add_band(std::string name, const std::vector<double>& xs,
                     const std::vector<double>& lower, const std::vector<double>& upper,
                     std::string fill, double opacity, Axis axis) {
    if (xs.empty()) return;
    std::vector<Point> outline;
    for (std::size_t i = 0; i < xs.size(); ++i) outline.emplace_back(xs[i], upper[i]);
    for (std::size_t i = xs.size(); i-- > 0;) outline.emplace_back(xs[i], lower[i]);
    elements_.push_back(fmt::format(
        "<polygon class=\"band\" data-series=\"{}\" fill=\"{}\" fill-opacity=\"{}\" "
        "stroke=\"none\" points=\"{}\"/>",
        escape_xml(name), fill, coord(opacity), points_attr(*this, outline, axis)));
}

void Chart::add_bars(std::string name, const std::vector<double>& edges,
                     const std::vector<double>& heights, std::string fill) {
    std::string group = fmt::format("<g class=\"bars\" data-series=\"{}\" fill=\"{}\">",
                                    escape_xml(name), fill);
    for (std::size_t i = 0; i < heights.size(); ++i) {
        const double x0 = map_x(edges[i]), x1 = map_x(edges[i + 1]);
        const double y0 = map_y(0.0), y1 = map_y(heights[i]);
        group += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>", coord(x0),
                             coord(std::min(y0, y1)), coord(std::max(x1 - x0, 0.0)),
                             coord(std::abs(y0 - y1)));
    }
    group += "</g>";
    elements_.push_back(std::move(group));
}

void Chart::add_note(std::string id, std::string text, double dx, double dy, std::string color) {
    elements_.push_back(fmt::format(
        "<text id=\"{}\" x=\"{}\" y=\"{}\" font-size=\"14\" fill=\"{}\">{}</text>",
        escape_xml(id), coord(left_ + dx), coord(top_ + dy), color, escape_xml(text)));
}

void Chart::add_legend_entry(std::string label, std::string color, std::string dash) {
    legend_.push_back({std::move(label), {std::move(color), std::move(dash)}});
}

std::string Chart::render() const {
    std::string out;
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\">\n",
        coord(width_), coord(height_));
    out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", coord(width_),
                       coord(height_));
    if (!title_.empty()) {
        out += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
                           coord(width_ / 2), escape_xml(title_));
    }

    const double x0 = left_, x1 = left_ + plot_width();
    const double y0 = top_, y1 = top_ + plot_height();
    out += fmt::format(
        "<g id=\"plot-area\" data-left=\"{}\" data-top=\"{}\" data-width=\"{}\" data-height=\"{}\" "
        "data-x-min=\"{}\" data-x-max=\"{}\" data-y-min=\"{}\" data-y-max=\"{}\"",
        coord(left_), coord(top_), coord(plot_width()), coord(plot_height()),
        fmt::format("{:.17g}", x_.min), fmt::format("{:.17g}", x_.max),
        fmt::format("{:.17g}", y_.min), fmt::format("{:.17g}", y_.max));
    if (y2_.enabled) {
        out += fmt::format(" data-y2-min=\"{:.17g}\" data-y2-max=\"{:.17g}\"", y2_.min, y2_.max);
    }
    out += ">\n";

    // grid and ticks
    const auto xt = nice_ticks(x_.min, x_.max, 8);
    const double xstep = xt.size() > 1 ? xt[1] - xt[0] : 1.0;
    for (double v : xt) {
        const double px = map_x(v);
        out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#e6e6e6\"/>\n",
                           coord(px), coord(y0), coord(y1));
        out += fmt::format(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n", coord(px),
            coord(y1 + 16), tick_label(v, xstep));
    }
    const auto yt = nice_ticks(y_.min, y_.max, 6);
    const double ystep = yt.size() > 1 ? yt[1] - yt[0] : 1.0;
    for (double v : yt) {
        const double py = map_y(v);
        out += fmt::format("<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#e6e6e6\"/>\n",
                           coord(py), coord(x0), coord(x1));
        out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
                           coord(x0 - 6), coord(py + 4), tick_label(v, ystep));
    }
    if (y2_.enabled) {
        const auto t2 = nice_ticks(y2_.min, y2_.max, 6);
        const double step2 = t2.size() > 1 ? t2[1] - t2[0] : 1.0;
        for (double v : t2) {
            out += fmt::format(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"start\" font-size=\"11\" fill=\"#7b3294\">{}</text>\n",
                coord(x1 + 6), coord(map_y(v, Axis::Right) + 4), tick_label(v, step2));
        }
    }
    out += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\"/>\n",
        coord(x0), coord(y0), coord(plot_width()), coord(plot_height()));
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
        coord((x0 + x1) / 2), coord(height_ - 14), escape_xml(x_.label));
    out += fmt::format(
        "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" font-size=\"13\" "
        "transform=\"rotate(-90 18 {0})\">{1}</text>\n",
        coord((y0 + y1) / 2), escape_xml(y_.label));
    if (y2_.enabled) {
        const double rx = width_ - 14;
        out += fmt::format(
            "<text x=\"{0}\" y=\"{1}\" text-anchor=\"middle\" font-size=\"13\" fill=\"#7b3294\" "
            "transform=\"rotate(90 {0} {1})\">{2}</text>\n",
            coord(rx), coord((y0 + y1) / 2), escape_xml(y2_.label));
    }

    for (const auto& e : elements_) {
        out += e;
        out.push_back('\n');
    }
    out += "</g>\n";

    if (!legend_.empty()) {
        out += "<g id=\"legend\" font-size=\"12\">\n";
        double ly = top_ + 14;
        const double lx = x1 - 170;
        for (const auto& [label, style] : legend_) {
            const auto& [color, dash] = style;
            out += fmt::format(
                "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"3\"{4}/>\n",
                coord(lx), coord(lx + 22), coord(ly), color,
                dash.empty() ? std::string() : fmt::format(" stroke-dasharray=\"{}\"", dash));
            out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", coord(lx + 28), coord(ly + 4),
                               escape_xml(label));
            ly += 18;
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace learnorder::svg
