#include "wwmon/dissimilarity.hpp"

#include "wwmon/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wwmon {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y, std::size_t min_len) {
    if (x.size() != y.size()) {
        throw Error("dissimilarity", "length mismatch (" + std::to_string(x.size()) + " vs " +
                                         std::to_string(y.size()) + ")");
    }
    if (x.size() < min_len) {
        throw Error("dissimilarity", "series need at least " + std::to_string(min_len) + " values");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw Error("dissimilarity", "missing or non-finite value at index " + std::to_string(i));
        }
    }
}

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

}  // namespace

std::string_view to_string(Measure m) {
    switch (m) {
        case Measure::l2: return "l2";
        case Measure::corr: return "corr";
        case Measure::crosscorr: return "crosscorr";
    }
    return "l2";
}

std::optional<Measure> parse_measure(std::string_view s) {
    if (s == "l2") return Measure::l2;
    if (s == "corr") return Measure::corr;
    if (s == "crosscorr") return Measure::crosscorr;
    return std::nullopt;
}

std::size_t default_max_lag(std::size_t n) {
    if (n < 2) return 1;
    const auto k = static_cast<std::size_t>(std::floor(10.0 * std::log10(static_cast<double>(n))));
    return std::clamp<std::size_t>(k, 1, n - 1);
}

double l2_distance(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y, 1);
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) ss += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(ss);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y, 3);
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) throw Error("dissimilarity", "correlation undefined for a constant series");
    // sqrt(sxx * syy) keeps r == 1 exactly when x == y.
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double corr_dissimilarity(std::span<const double> x, std::span<const double> y) {
    return 2.0 * (1.0 - pearson(x, y));
}

double cross_correlation(std::span<const double> x, std::span<const double> y, std::size_t k) {
    check_pair(x, y, 2);
    const std::size_t n = x.size();
    if (k >= n) throw Error("dissimilarity", "lag must be below the series length");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double vx = 0.0;
    double vy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
    }
    if (vx <= 0.0 || vy <= 0.0) throw Error("dissimilarity", "cross-correlation undefined for a constant series");
    double c = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) c += (x[t + k] - mx) * (y[t] - my);
    return c / std::sqrt(vx * vy);
}

double crosscorr_dissimilarity(std::span<const double> x, std::span<const double> y,
                               std::size_t max_lag) {
    const double r = pearson(x, y);
    const std::size_t n = x.size();
    const std::size_t lags = max_lag == 0 ? default_max_lag(n) : max_lag;
    if (lags < 1 || lags >= n) throw Error("dissimilarity", "max_lag must satisfy 1 <= K < N");
    double denom = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) denom += cross_correlation(x, y, k);
    if (!(denom > 0.0)) {
        throw Error("dissimilarity", "cross-correlation sum is not positive; measure undefined for this pair");
    }
    return std::sqrt((1.0 - r) / denom);
}

double dissimilarity(std::span<const double> x, std::span<const double> y,
                     const DissimilarityConfig& cfg) {
    switch (cfg.measure) {
        case Measure::l2: return l2_distance(x, y);
        case Measure::corr: return corr_dissimilarity(x, y);
        case Measure::crosscorr: return crosscorr_dissimilarity(x, y, cfg.max_lag);
    }
    return l2_distance(x, y);
}

}  // namespace wwmon
