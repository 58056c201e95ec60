#pragma once

#include "wwmon/series.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace wwmon::svg {

struct Line {
    DailySeries series;
    std::string colour = "#1f77b4";
    bool dashed = false;
};

/// Shaded band between two series on the same grid.
struct Ribbon {
    DailySeries lower;
    DailySeries upper;
    std::string colour = "#1f77b4";
};

/// Markers; flagged points are drawn in the alarm colour.
struct Points {
    DailySeries series;
    std::vector<bool> flagged;
    std::string colour = "#2ca02c";
    std::string alarm_colour = "#d62728";
};

struct TimePlot {
    std::string title;
    std::string y_label;
    std::vector<Ribbon> ribbons;
    std::vector<Line> lines;
    std::vector<Points> points;
    int width = 900;
    int height = 420;
};

void write(std::ostream& out, const TimePlot& plot);

struct Bar {
    std::string label;
    double value = 0.0;
};

void write_bars(std::ostream& out, const std::string& title, const std::vector<Bar>& bars, int width = 900,
                int height = 420);

}  // namespace wwmon::svg
