#pragma once

#include "wwmon/excretion.hpp"
#include "wwmon/series.hpp"

#include <iosfwd>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace wwmon {

enum class AggregationMethod { method1, method2 };

std::string_view to_string(AggregationMethod m);
std::optional<AggregationMethod> parse_aggregation_method(std::string_view s);

enum class QuantileRule {
    /// h = (n - 1) q, interpolate between neighbouring order statistics.
    linear_order_statistics,
};

std::string_view to_string(QuantileRule r);

struct AggregationConfig {
    AggregationMethod method = AggregationMethod::method1;
    double quantile_level = 0.5;
    QuantileRule quantile_rule = QuantileRule::linear_order_statistics;
};

struct NationalCurve {
    DailySeries series;
    AggregationMethod method = AggregationMethod::method1;
    std::vector<int> n_plants_per_day;
    QuantileRule quantile_rule = QuantileRule::linear_order_statistics;
    double quantile_level = 0.5;
};

/// 1e5 * sum(E) / sum(residents) over the plants present on each day.
NationalCurve aggregate_method1(const ExcretorsPanel& panel);

/// Per-day quantile of the per-capita rates of the plants present.
NationalCurve aggregate_method2(const ExcretorsPanel& panel, const AggregationConfig& cfg = {});

/// Dispatches on cfg.method.
NationalCurve aggregate(const ExcretorsPanel& panel, const AggregationConfig& cfg);

/// Divides by the curve maximum.
NationalCurve normalize_curve(const NationalCurve& curve);

/// Per-day quantile of per-capita rates at `level`; days without plants are missing.
DailySeries daily_rate_quantile(const ExcretorsPanel& panel, double level,
                                std::size_t min_plants = 1);

/// 0.25 and 0.75 per-day quantiles of per-capita rates.
std::pair<DailySeries, DailySeries> iqr_band(const ExcretorsPanel& panel);

/// date,value,n_plants with "NA" for missing values.
void write_curve_csv(std::ostream& out, const NationalCurve& curve);

/// Reads the date,value[,n_plants] layout. Dates must be consecutive.
NationalCurve read_curve_csv(std::istream& in);
NationalCurve read_curve_csv(const std::string& path);

}  // namespace wwmon
