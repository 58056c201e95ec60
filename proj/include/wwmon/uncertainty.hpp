#pragma once

#include "wwmon/aggregation.hpp"
#include "wwmon/arma.hpp"
#include "wwmon/excretion.hpp"
#include "wwmon/series.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>

namespace wwmon {

struct BootstrapConfig {
    std::size_t replications = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    ArmaOrder model_order{1, 0, 3};
};

struct PercentileInterval {
    DailySeries lower;
    DailySeries upper;
    /// Point estimate the interval surrounds (fitted values or per-day median).
    DailySeries center;
    double level = 0.95;
};

/// Per-day (alpha/2, 1 - alpha/2) quantiles of the plants' per-capita rates.
/// Days with fewer than two plants are missing.
PercentileInterval method2_pointwise_interval(const ExcretorsPanel& panel, double alpha);

/// Residual bootstrap around fixed fitted values: each replicate adds an iid
/// resample of the centred residuals to `fitted`; the interval is the per-day
/// empirical quantile pair across replicates. Replicate b draws from its own
/// stream seeded by (seed, b).
PercentileInterval bootstrap_percentile_interval(std::span<const double> fitted,
                                                 std::span<const double> residuals,
                                                 const BootstrapConfig& cfg, Date start = {});

/// Fits the configured ARIMA to the curve, then bootstraps its residuals.
PercentileInterval bootstrap_percentile_ci(const NationalCurve& curve, const BootstrapConfig& cfg);

/// date,lower,center,upper
void write_interval_csv(std::ostream& out, const PercentileInterval& iv);

}  // namespace wwmon
