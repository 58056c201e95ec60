#pragma once

#include "wwmon/date.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace wwmon {

/// Marker for a day without a value. Every consumer treats NaN as missing.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/// Regularly spaced daily series. values[i] belongs to start_date + i.
struct DailySeries {
    Date start_date;
    std::vector<double> values;
    std::string label;

    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] bool empty() const { return values.empty(); }
    [[nodiscard]] Date date_at(std::size_t i) const {
        return start_date + static_cast<std::int64_t>(i);
    }
    [[nodiscard]] Date end_date() const { return date_at(values.empty() ? 0 : values.size() - 1); }
    [[nodiscard]] std::size_t count_present() const;

    /// Copy of the days in [first, last], clipped to the series.
    [[nodiscard]] DailySeries slice(Date first, Date last) const;

    bool operator==(const DailySeries& other) const;
};

namespace stats {

double mean(std::span<const double> x);

/// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> x);

/// Quantile by linear interpolation between order statistics:
/// h = (n - 1) q, result = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
/// `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double q);

/// Same rule on unsorted input. The argument is taken by value and sorted.
double quantile(std::vector<double> x, double q);

}  // namespace stats

}  // namespace wwmon
