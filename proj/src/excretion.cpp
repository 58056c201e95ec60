#include "wwmon/excretion.hpp"

#include "wwmon/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace wwmon {

ExcretorEstimate fictitious_excretors(double concentration, double inflow,
                                      const ExcretionConfig& cfg) {
    if (!std::isfinite(concentration) || !std::isfinite(inflow)) {
        throw Error("excretion", "non-finite concentration or inflow");
    }
    if (concentration < 0.0) throw Error("excretion", "concentration must be >= 0");
    if (inflow <= 0.0) throw Error("excretion", "inflow must be > 0");
    if (!(cfg.shedding_per_person > 0.0) || !std::isfinite(cfg.shedding_per_person)) {
        throw Error("excretion", "shedding_per_person must be positive and finite");
    }
    const double load = concentration * inflow * ExcretionConfig::kLitreFactor;
    return {load / cfg.shedding_per_person, load};
}

double per_capita_rate(double excretors, std::int64_t residents) {
    if (residents <= 0) throw Error("excretion", "residents must be > 0");
    return 1e5 * excretors / static_cast<double>(residents);
}

DailySeries interpolate_daily(std::span<const std::pair<Date, double>> samples, std::string label) {
    if (samples.empty()) throw Error("excretion", "interpolation needs at least one sample");

    // Average same-date replicates.
    std::map<Date, std::pair<double, int>> by_date;
    for (const auto& [d, v] : samples) {
        if (!std::isfinite(v)) throw Error("excretion", "non-finite sample value on " + d.iso());
        auto& acc = by_date[d];
        acc.first += v;
        acc.second += 1;
    }
    std::vector<std::pair<Date, double>> points;
    points.reserve(by_date.size());
    for (const auto& [d, acc] : by_date) points.emplace_back(d, acc.first / acc.second);

    DailySeries out{points.front().first, {}, std::move(label)};
    out.values.reserve(static_cast<std::size_t>(points.back().first - points.front().first) + 1);
    out.values.push_back(points.front().second);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto [d0, v0] = points[i - 1];
        const auto [d1, v1] = points[i];
        const auto gap = d1 - d0;
        for (std::int64_t k = 1; k < gap; ++k) {
            const double g = static_cast<double>(gap);
            const double v = (v0 * (g - static_cast<double>(k)) + v1 * static_cast<double>(k)) / g;
            out.values.push_back(std::clamp(v, std::min(v0, v1), std::max(v0, v1)));
        }
        out.values.push_back(v1);
    }
    return out;
}

ExcretorsPanel build_excretors_panel(const PanelDataset& ds, const ExcretionConfig& cfg) {
    if (ds.plants.empty()) throw Error("excretion", "dataset has no plants");

    std::map<std::string, std::vector<std::pair<Date, double>>> points;
    for (const auto& s : ds.samples) {
        if (!ds.find_plant(s.plant_id)) {
            throw Error("excretion", "sample references unknown plant '" + s.plant_id + "'");
        }
        points[s.plant_id].emplace_back(s.date,
                                        fictitious_excretors(s.concentration, s.inflow, cfg).excretors);
    }

    ExcretorsPanel panel;
    std::map<std::string, DailySeries> own;
    for (const auto& p : ds.plants) {
        auto it = points.find(p.plant_id);
        if (it == points.end()) {
            throw Error("excretion", "plant '" + p.plant_id + "' has no samples");
        }
        if (p.residents <= 0) throw Error("excretion", "plant '" + p.plant_id + "' has residents <= 0");
        own.emplace(p.plant_id, interpolate_daily(it->second, p.plant_id));
        panel.plant_ids.push_back(p.plant_id);
        panel.residents[p.plant_id] = p.residents;
    }
    std::sort(panel.plant_ids.begin(), panel.plant_ids.end());

    Date first = own.begin()->second.start_date;
    Date last = own.begin()->second.end_date();
    for (const auto& [id, s] : own) {
        first = std::min(first, s.start_date);
        last = std::max(last, s.end_date());
    }
    panel.start_date = first;
    panel.length = static_cast<std::size_t>(last - first) + 1;

    for (auto& [id, s] : own) {
        DailySeries e{first, std::vector<double>(panel.length, kMissing), id};
        DailySeries y{first, std::vector<double>(panel.length, kMissing), id};
        const auto offset = static_cast<std::size_t>(s.start_date - first);
        const std::int64_t r = panel.residents[id];
        for (std::size_t i = 0; i < s.size(); ++i) {
            e.values[offset + i] = s.values[i];
            y.values[offset + i] = per_capita_rate(s.values[i], r);
        }
        panel.per_plant.emplace(id, std::move(e));
        panel.per_capita.emplace(id, std::move(y));
    }
    return panel;
}

void write_panel_series_csv(std::ostream& out, const ExcretorsPanel& panel) {
    out << "plant_id,date,excretors,per_capita\n";
    for (const auto& id : panel.plant_ids) {
        const auto& e = panel.per_plant.at(id);
        const auto& y = panel.per_capita.at(id);
        for (std::size_t i = 0; i < panel.length; ++i) {
            if (is_missing(e.values[i])) continue;
            out << id << ',' << panel.date_at(i).iso() << ',' << csv::format_double(e.values[i])
                << ',' << csv::format_double(y.values[i]) << '\n';
        }
    }
}

}  // namespace wwmon
