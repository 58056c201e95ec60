#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wwmon {

enum class Measure { l2, corr, crosscorr };

std::string_view to_string(Measure m);
std::optional<Measure> parse_measure(std::string_view s);

struct DissimilarityConfig {
    Measure measure = Measure::l2;
    /// Lag horizon K for the cross-correlation measure; 0 selects floor(10 log10 N).
    std::size_t max_lag = 0;
};

/// floor(10 log10 n), clamped to [1, n - 1].
std::size_t default_max_lag(std::size_t n);

double l2_distance(std::span<const double> x, std::span<const double> y);

/// Pearson correlation. Throws on constant input.
double pearson(std::span<const double> x, std::span<const double> y);

/// 2 (1 - r).
double corr_dissimilarity(std::span<const double> x, std::span<const double> y);

/// Sample cross-correlation at lag k: sum_{t} (x[t+k] - mx)(y[t] - my) / (n sx sy),
/// with sx, sy the 1/n standard deviations.
double cross_correlation(std::span<const double> x, std::span<const double> y, std::size_t k);

/// sqrt((1 - r) / sum_{k=1..K} CC_k). Throws when the denominator is not positive.
double crosscorr_dissimilarity(std::span<const double> x, std::span<const double> y,
                               std::size_t max_lag = 0);

double dissimilarity(std::span<const double> x, std::span<const double> y,
                     const DissimilarityConfig& cfg);

}  // namespace wwmon
