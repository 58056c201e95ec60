#include "wwmon/uncertainty.hpp"

#include "wwmon/error.hpp"
#include "wwmon/ingest.hpp"

#include <algorithm>
#include <ostream>
#include <random>

namespace wwmon {

PercentileInterval method2_pointwise_interval(const ExcretorsPanel& panel, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("uncertainty", "alpha must lie in (0, 1)");
    PercentileInterval iv;
    iv.level = 1.0 - alpha;
    iv.lower = daily_rate_quantile(panel, alpha / 2.0, 2);
    iv.upper = daily_rate_quantile(panel, 1.0 - alpha / 2.0, 2);
    iv.center = daily_rate_quantile(panel, 0.5, 2);
    iv.lower.label = "lower";
    iv.upper.label = "upper";
    iv.center.label = "median";
    return iv;
}

PercentileInterval bootstrap_percentile_interval(std::span<const double> fitted,
                                                 std::span<const double> residuals,
                                                 const BootstrapConfig& cfg, Date start) {
    if (fitted.empty()) throw Error("uncertainty", "no fitted values");
    if (residuals.empty()) throw Error("uncertainty", "no residuals to resample");
    if (cfg.replications < 100) throw Error("uncertainty", "at least 100 replications are required");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw Error("uncertainty", "alpha must lie in (0, 1)");

    // Sorted first so the result does not depend on the residuals' order.
    std::vector<double> pool(residuals.begin(), residuals.end());
    std::sort(pool.begin(), pool.end());
    const double centre = stats::mean(pool);
    for (double& r : pool) r -= centre;

    const std::size_t T = fitted.size();
    const std::size_t B = cfg.replications;
    // replicate-major: draws[t * B + b]
    std::vector<double> draws(T * B);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t b = 0; b < B; ++b) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(b)};
        std::mt19937_64 rng(seq);
        for (std::size_t t = 0; t < T; ++t) draws[t * B + b] = fitted[t] + pool[pick(rng)];
    }

    PercentileInterval iv;
    iv.level = 1.0 - cfg.alpha;
    iv.lower = {start, std::vector<double>(T), "lower"};
    iv.upper = {start, std::vector<double>(T), "upper"};
    iv.center = {start, std::vector<double>(fitted.begin(), fitted.end()), "fitted"};
    for (std::size_t t = 0; t < T; ++t) {
        std::span<double> day(draws.data() + t * B, B);
        std::sort(day.begin(), day.end());
        iv.lower.values[t] = stats::quantile_sorted(day, cfg.alpha / 2.0);
        iv.upper.values[t] = stats::quantile_sorted(day, 1.0 - cfg.alpha / 2.0);
    }
    return iv;
}

PercentileInterval bootstrap_percentile_ci(const NationalCurve& curve, const BootstrapConfig& cfg) {
    const auto& y = curve.series.values;
    for (double v : y) {
        if (is_missing(v)) throw Error("uncertainty", "curve has missing days; trim it first");
    }
    const auto& o = cfg.model_order;
    const ArmaModel model = fit_arma_css(y, o.p, o.d, o.q);
    const ArmaResiduals res = arma_residuals(model, y);

    std::vector<double> fitted(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) fitted[t] = y[t] - res.values[t];
    std::span<const double> pool(res.values.data() + res.burn_in, res.values.size() - res.burn_in);
    return bootstrap_percentile_interval(fitted, pool, cfg, curve.series.start_date);
}

void write_interval_csv(std::ostream& out, const PercentileInterval& iv) {
    out << "date,lower,center,upper\n";
    for (std::size_t t = 0; t < iv.lower.size(); ++t) {
        out << iv.lower.date_at(t).iso() << ',' << csv::format_double(iv.lower.values[t]) << ','
            << csv::format_double(iv.center.values[t]) << ',' << csv::format_double(iv.upper.values[t])
            << '\n';
    }
}

}  // namespace wwmon
