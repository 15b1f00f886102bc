#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace learnorder::svg {

using Point = std::pair<double, double>;

enum class Axis { Left, Right };

struct Stroke {
    std::string color = "#000000";
    double width = 2.0;
    std::string dash; // SVG stroke-dasharray, empty for solid
};

// Minimal line/area/bar chart writer. Coordinates are given in data space
// and mapped onto the plot rectangle; the mapping is recorded as data-*
// attributes on the plot group so emitted curves can be read back.
class Chart {
public:
    Chart(double width = 760, double height = 460);

    void set_title(std::string title) { title_ = std::move(title); }
    void set_x_axis(double min, double max, std::string label);
    void set_y_axis(double min, double max, std::string label);
    void set_y2_axis(double min, double max, std::string label);

    void add_polyline(std::string name, const std::vector<Point>& points, const Stroke& stroke,
                      Axis axis = Axis::Left);
    // Filled region between two curves sharing x positions.
    void add_band(std::string name, const std::vector<double>& xs, const std::vector<double>& lower,
                  const std::vector<double>& upper, std::string fill, double opacity,
                  Axis axis = Axis::Left);
    // Bars spanning [edges[i], edges[i+1]) with height heights[i].
    void add_bars(std::string name, const std::vector<double>& edges,
                  const std::vector<double>& heights, std::string fill);
    // Text placed relative to the plot rectangle's top-left corner, in pixels.
    void add_note(std::string id, std::string text, double dx, double dy, std::string color);
    void add_legend_entry(std::string label, std::string color, std::string dash = {});

    std::string render() const;

    double map_x(double v) const;
    double map_y(double v, Axis axis = Axis::Left) const;

private:
    struct Range {
        double min = 0.0, max = 1.0;
        std::string label;
        bool enabled = false;
    };

    double width_, height_;
    double left_ = 72, right_ = 76, top_ = 44, bottom_ = 56;
    std::string title_;
    Range x_, y_, y2_;
    std::vector<std::string> elements_;
    std::vector<std::pair<std::string, std::pair<std::string, std::string>>> legend_;

    double plot_width() const { return width_ - left_ - right_; }
    double plot_height() const { return height_ - top_ - bottom_; }
};

std::string escape_xml(std::string_view text);

// Round tick positions (1/2/5 x 10^k spacing) covering [min, max].
std::vector<double> nice_ticks(double min, double max, std::size_t target = 6);

} // namespace learnorder::svg
