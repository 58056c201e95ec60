#include "wwmon/aggregation.hpp"

#include "wwmon/error.hpp"
#include "wwmon/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

namespace wwmon {

std::string_view to_string(AggregationMethod m) {
    return m == AggregationMethod::method1 ? "method1" : "method2";
}

std::optional<AggregationMethod> parse_aggregation_method(std::string_view s) {
    if (s == "1" || s == "method1") return AggregationMethod::method1;
    if (s == "2" || s == "method2") return AggregationMethod::method2;
    return std::nullopt;
}

std::string_view to_string(QuantileRule) { return "linear_order_statistics"; }

NationalCurve aggregate_method1(const ExcretorsPanel& panel) {
    NationalCurve c;
    c.method = AggregationMethod::method1;
    c.series = {panel.start_date, std::vector<double>(panel.length, kMissing), "method1"};
    c.n_plants_per_day.assign(panel.length, 0);
    for (std::size_t t = 0; t < panel.length; ++t) {
        double e_sum = 0.0;
        double r_sum = 0.0;
        int n = 0;
        for (const auto& id : panel.plant_ids) {
            const double e = panel.per_plant.at(id).values[t];
            if (is_missing(e)) continue;
            e_sum += e;
            r_sum += static_cast<double>(panel.residents.at(id));
            ++n;
        }
        c.n_plants_per_day[t] = n;
        if (n > 0) c.series.values[t] = 1e5 * e_sum / r_sum;
    }
    return c;
}

DailySeries daily_rate_quantile(const ExcretorsPanel& panel, double level, std::size_t min_plants) {
    DailySeries out{panel.start_date, std::vector<double>(panel.length, kMissing), {}};
    std::vector<double> day;
    day.reserve(panel.plant_ids.size());
    for (std::size_t t = 0; t < panel.length; ++t) {
        day.clear();
        for (const auto& id : panel.plant_ids) {
            const double y = panel.per_capita.at(id).values[t];
            if (!is_missing(y)) day.push_back(y);
        }
        if (day.size() < std::max<std::size_t>(min_plants, 1)) continue;
        std::sort(day.begin(), day.end());
        out.values[t] = stats::quantile_sorted(day, level);
    }
    return out;
}

NationalCurve aggregate_method2(const ExcretorsPanel& panel, const AggregationConfig& cfg) {
    if (!(cfg.quantile_level > 0.0 && cfg.quantile_level < 1.0)) {
        throw Error("aggregation", "quantile_level must lie in (0, 1)");
    }
    NationalCurve c;
    c.method = AggregationMethod::method2;
    c.quantile_level = cfg.quantile_level;
    c.quantile_rule = cfg.quantile_rule;
    c.series = daily_rate_quantile(panel, cfg.quantile_level);
    c.series.label = "method2";
    c.n_plants_per_day.assign(panel.length, 0);
    for (std::size_t t = 0; t < panel.length; ++t) {
        for (const auto& id : panel.plant_ids) {
            if (!is_missing(panel.per_capita.at(id).values[t])) ++c.n_plants_per_day[t];
        }
    }
    return c;
}

NationalCurve aggregate(const ExcretorsPanel& panel, const AggregationConfig& cfg) {
    return cfg.method == AggregationMethod::method1 ? aggregate_method1(panel)
                                                    : aggregate_method2(panel, cfg);
}

NationalCurve normalize_curve(const NationalCurve& curve) {
    double max = -1.0;
    for (double v : curve.series.values) {
        if (!is_missing(v)) max = std::max(max, v);
    }
    if (!(max > 0.0)) throw Error("aggregation", "cannot normalize an all-zero or all-missing curve");
    NationalCurve out = curve;
    for (double& v : out.series.values) {
        if (!is_missing(v)) v /= max;
    }
    return out;
}

std::pair<DailySeries, DailySeries> iqr_band(const ExcretorsPanel& panel) {
    auto lower = daily_rate_quantile(panel, 0.25);
    auto upper = daily_rate_quantile(panel, 0.75);
    lower.label = "q25";
    upper.label = "q75";
    return {std::move(lower), std::move(upper)};
}

void write_curve_csv(std::ostream& out, const NationalCurve& curve) {
    out << "date,value,n_plants\n";
    for (std::size_t i = 0; i < curve.series.size(); ++i) {
        out << curve.series.date_at(i).iso() << ',' << csv::format_double(curve.series.values[i])
            << ',' << (i < curve.n_plants_per_day.size() ? curve.n_plants_per_day[i] : 0) << '\n';
    }
}

NationalCurve read_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("aggregation", "curve file is empty");
    const auto header = csv::split_line(line, ',');
    auto find = [&](std::string_view name) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto date_col = find("date");
    const auto value_col = find("value");
    const auto n_col = find("n_plants");
    if (!date_col || !value_col) throw Error("aggregation", "curve file needs date and value columns");

    NationalCurve c;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row;
        const auto cells = csv::split_line(line, ',');
        if (cells.size() <= std::max(*date_col, *value_col)) {
            throw Error("aggregation", "row " + std::to_string(row) + ": too few cells");
        }
        auto d = Date::parse(cells[*date_col]);
        if (!d) throw Error("aggregation", "row " + std::to_string(row) + ": unparseable date");
        if (c.series.values.empty()) {
            c.series.start_date = *d;
        } else if (*d != c.series.end_date() + 1) {
            throw Error("aggregation", "row " + std::to_string(row) + ": dates are not consecutive");
        }
        double v = kMissing;
        if (cells[*value_col] != "NA" && !cells[*value_col].empty()) {
            auto parsed = csv::parse_double(cells[*value_col]);
            if (!parsed) throw Error("aggregation", "row " + std::to_string(row) + ": unparseable value");
            v = *parsed;
        }
        c.series.values.push_back(v);
        int n = is_missing(v) ? 0 : 1;
        if (n_col && *n_col < cells.size()) {
            auto parsed = csv::parse_double(cells[*n_col]);
            if (parsed) n = static_cast<int>(*parsed);
        }
        c.n_plants_per_day.push_back(n);
    }
    if (c.series.values.empty()) throw Error("aggregation", "curve file has no rows");
    return c;
}

NationalCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("aggregation", "cannot open '" + path + "'");
    return read_curve_csv(in);
}

}  // namespace wwmon
