#include "wwmon/series.hpp"

#include "wwmon/error.hpp"

#include <algorithm>
#include <numeric>

namespace wwmon {

std::size_t DailySeries::count_present() const {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [](double v) { return !is_missing(v); }));
}

DailySeries DailySeries::slice(Date first, Date last) const {
    DailySeries out{first < start_date ? start_date : first, {}, label};
    if (values.empty() || last < first) return out;
    const Date stop = last < end_date() ? last : end_date();
    for (Date d = out.start_date; d <= stop; d = d + 1) {
        out.values.push_back(values[static_cast<std::size_t>(d - start_date)]);
    }
    return out;
}

bool DailySeries::operator==(const DailySeries& other) const {
    if (start_date != other.start_date || label != other.label ||
        values.size() != other.values.size()) {
        return false;
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double a = values[i];
        const double b = other.values[i];
        if (is_missing(a) != is_missing(b)) return false;
        if (!is_missing(a) && a != b) return false;
    }
    return true;
}

namespace stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw Error("stats", "mean of empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
    if (x.size() < 2) throw Error("stats", "standard deviation needs at least 2 values");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error("stats", "quantile of empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw Error("stats", "quantile level outside [0, 1]");
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::vector<double> x, double q) {
    std::sort(x.begin(), x.end());
    return quantile_sorted(x, q);
}

}  // namespace stats

}  // namespace wwmon
