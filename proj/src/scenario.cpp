#include "wwmon/scenario.hpp"

#include "wwmon/error.hpp"

#include <algorithm>
#include <map>

namespace wwmon {

namespace {

// Scenario grid: rows are frequencies, columns volumes.
const std::map<std::pair<SamplingVolume, SamplingFrequency>, std::string>& id_table() {
    using V = SamplingVolume;
    using F = SamplingFrequency;
    static const std::map<std::pair<V, F>, std::string> table = {
        {{V::all48, F::twice_per_week}, "Reference"},
        {{V::initial24, F::twice_per_week}, "S6"},
        {{V::largest_per_state9, F::twice_per_week}, "S4"},
        {{V::largest1, F::twice_per_week}, "S2"},
        {{V::all48, F::once_per_week}, "S10"},
        {{V::initial24, F::once_per_week}, "S5"},
        {{V::largest_per_state9, F::once_per_week}, "S3"},
        {{V::largest1, F::once_per_week}, "S1"},
        {{V::all48, F::once_per_two_weeks}, "S11"},
        {{V::initial24, F::once_per_two_weeks}, "S9"},
        {{V::largest_per_state9, F::once_per_two_weeks}, "S8"},
        {{V::largest1, F::once_per_two_weeks}, "S7"},
    };
    return table;
}

bool larger(const PlantMeta& a, const PlantMeta& b) {
    if (a.residents != b.residents) return a.residents > b.residents;
    return a.plant_id < b.plant_id;
}

std::set<std::string> select_plants(const PanelDataset& ds, SamplingVolume v) {
    std::set<std::string> keep;
    switch (v) {
        case SamplingVolume::all48:
            for (const auto& p : ds.plants) keep.insert(p.plant_id);
            break;
        case SamplingVolume::initial24:
            for (const auto& p : ds.plants) {
                if (p.in_initial_program) keep.insert(p.plant_id);
            }
            if (keep.empty()) throw Error("scenario", "no plant belongs to the initial program");
            break;
        case SamplingVolume::largest_per_state9: {
            std::map<std::string, const PlantMeta*> best;
            for (const auto& p : ds.plants) {
                auto& slot = best[p.state];
                if (!slot || larger(p, *slot)) slot = &p;
            }
            for (const auto& [state, p] : best) keep.insert(p->plant_id);
            break;
        }
        case SamplingVolume::largest1: {
            const PlantMeta* best = nullptr;
            for (const auto& p : ds.plants) {
                if (!best || larger(p, *best)) best = &p;
            }
            if (best) keep.insert(best->plant_id);
            break;
        }
    }
    if (keep.empty()) throw Error("scenario", "volume rule selects no plants");
    return keep;
}

PanelDataset restrict(const PanelDataset& ds, const std::set<std::string>& plants,
                      std::vector<SampleRecord> samples) {
    std::vector<PlantMeta> kept;
    for (const auto& p : ds.plants) {
        if (plants.contains(p.plant_id)) kept.push_back(p);
    }
    return make_panel(std::move(kept), std::move(samples));
}

}  // namespace

std::string_view to_string(SamplingVolume v) {
    switch (v) {
        case SamplingVolume::all48: return "all48";
        case SamplingVolume::initial24: return "initial24";
        case SamplingVolume::largest_per_state9: return "largest_per_state9";
        case SamplingVolume::largest1: return "largest1";
    }
    return "all48";
}

std::string_view to_string(SamplingFrequency f) {
    switch (f) {
        case SamplingFrequency::twice_per_week: return "twice_per_week";
        case SamplingFrequency::once_per_week: return "once_per_week";
        case SamplingFrequency::once_per_two_weeks: return "once_per_two_weeks";
    }
    return "twice_per_week";
}

std::string sampling_scenario_id(SamplingVolume v, SamplingFrequency f) { return id_table().at({v, f}); }

std::vector<SamplingScenario> sampling_scenario_grid() {
    std::vector<SamplingScenario> grid;
    for (const auto& [key, id] : id_table()) grid.push_back({key.first, key.second, id});
    auto order = [](const std::string& id) { return id == "Reference" ? 0 : std::stoi(id.substr(1)); };
    std::sort(grid.begin(), grid.end(), [&](const auto& a, const auto& b) {
        return order(a.scenario_id) < order(b.scenario_id);
    });
    return grid;
}

std::vector<SewerScenario> sewer_scenario_grid() {
    std::vector<SewerScenario> grid;
    int id = 1;
    for (SewerType t : kSewerTypes) {
        for (SizeClass size : {SizeClass::large, SizeClass::small}) {
            grid.push_back({{t}, size, "S" + std::to_string(id++)});
        }
    }
    return grid;
}

const std::string& scenario_id(const Scenario& s) {
    return std::visit([](const auto& v) -> const std::string& { return v.scenario_id; }, s);
}

std::string describe(const Scenario& s) {
    if (const auto* sampling = std::get_if<SamplingScenario>(&s)) {
        return std::string(to_string(sampling->volume)) + "/" + std::string(to_string(sampling->frequency));
    }
    const auto& sewer = std::get<SewerScenario>(s);
    std::string types;
    for (SewerType t : sewer.sewer_types) {
        if (!types.empty()) types += "+";
        types += to_string(t);
    }
    return types + (sewer.size == SizeClass::large ? "/>=100000" : "/<100000");
}

PanelDataset apply_sampling_scenario(const PanelDataset& ds, const SamplingScenario& sc) {
    const auto plants = select_plants(ds, sc.volume);

    // Earliest sampling date per (plant, block); all replicates of that date survive.
    auto block_of = [&](Date d) -> std::int64_t {
        switch (sc.frequency) {
            case SamplingFrequency::twice_per_week: return d - Date{};
            case SamplingFrequency::once_per_week: {
                const auto w = iso_week(d);
                return static_cast<std::int64_t>(w.year) * 100 + w.week;
            }
            case SamplingFrequency::once_per_two_weeks: {
                const auto offset = d - ds.date_span.first;
                return offset >= 0 ? offset / 14 : -((-offset + 13) / 14);
            }
        }
        return 0;
    };
    std::map<std::pair<std::string, std::int64_t>, Date> first_in_block;
    for (const auto& s : ds.samples) {
        if (!plants.contains(s.plant_id)) continue;
        auto [it, inserted] = first_in_block.try_emplace({s.plant_id, block_of(s.date)}, s.date);
        if (!inserted && s.date < it->second) it->second = s.date;
    }
    std::vector<SampleRecord> kept;
    for (const auto& s : ds.samples) {
        if (!plants.contains(s.plant_id)) continue;
        if (first_in_block.at({s.plant_id, block_of(s.date)}) == s.date) kept.push_back(s);
    }
    return restrict(ds, plants, std::move(kept));
}

PanelDataset apply_sewer_scenario(const PanelDataset& ds, const SewerScenario& sc) {
    std::set<std::string> plants;
    for (const auto& p : ds.plants) {
        const bool large = p.residents >= kLargePlantResidents;
        const bool size_ok = (sc.size == SizeClass::large) == large;
        if (size_ok && sc.sewer_types.contains(p.sewer_type)) plants.insert(p.plant_id);
    }
    if (plants.empty()) throw Error("scenario", "sewer scenario " + sc.scenario_id + " selects no plants");
    std::vector<SampleRecord> kept;
    for (const auto& s : ds.samples) {
        if (plants.contains(s.plant_id)) kept.push_back(s);
    }
    return restrict(ds, plants, std::move(kept));
}

PanelDataset apply_scenario(const PanelDataset& ds, const Scenario& sc) {
    if (const auto* sampling = std::get_if<SamplingScenario>(&sc)) return apply_sampling_scenario(ds, *sampling);
    return apply_sewer_scenario(ds, std::get<SewerScenario>(sc));
}

NationalCurve national_curve(const PanelDataset& ds, const AggregationConfig& agg,
                             const ExcretionConfig& exc) {
    return aggregate(build_excretors_panel(ds, exc), agg);
}

AlignedPair align_curves(const DailySeries& reference, const DailySeries& other) {
    AlignedPair out;
    bool started = false;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const Date d = reference.date_at(i);
        const double a = reference.values[i];
        if (is_missing(a)) continue;
        const auto j = d - other.start_date;
        const double b = (j >= 0 && static_cast<std::size_t>(j) < other.size())
                             ? other.values[static_cast<std::size_t>(j)]
                             : kMissing;
        if (is_missing(b)) {
            out.reduced = true;
            continue;
        }
        if (!started) {
            out.first = d;
            started = true;
        }
        out.last = d;
        out.x.push_back(a);
        out.y.push_back(b);
    }
    if (!started) throw Error("scenario", "curves share no common days");
    return out;
}

std::vector<ScenarioResult> rank_scenarios(const PanelDataset& ds, const std::vector<Scenario>& scenarios,
                                           const RankOptions& opt) {
    const NationalCurve reference = national_curve(ds, opt.aggregation, opt.excretion);
    std::vector<ScenarioResult> results;
    results.reserve(scenarios.size());
    for (const auto& sc : scenarios) {
        ScenarioResult r;
        r.scenario_id = scenario_id(sc);
        r.description = describe(sc);
        try {
            r.curve = national_curve(apply_scenario(ds, sc), opt.aggregation, opt.excretion);
            const auto pair = align_curves(reference.series, r.curve.series);
            r.compared_days = pair.x.size();
            for (Measure m : opt.measures) {
                try {
                    r.dissimilarity_by_measure[m] = dissimilarity(pair.x, pair.y, {m, opt.max_lag});
                } catch (const Error& e) {
                    r.errors[m] = e.what();
                }
            }
        } catch (const Error& e) {
            for (Measure m : opt.measures) r.errors[m] = e.what();
        }
        results.push_back(std::move(r));
    }
    std::stable_sort(results.begin(), results.end(), [&](const auto& a, const auto& b) {
        auto ia = a.dissimilarity_by_measure.find(opt.sort_by);
        auto ib = b.dissimilarity_by_measure.find(opt.sort_by);
        const bool ha = ia != a.dissimilarity_by_measure.end();
        const bool hb = ib != b.dissimilarity_by_measure.end();
        if (ha != hb) return ha;
        if (ha && ia->second != ib->second) return ia->second < ib->second;
        return a.scenario_id < b.scenario_id;
    });
    return results;
}

std::vector<PlantInfluence> wwtp_influence(const PanelDataset& ds, const InfluenceOptions& opt) {
    if (ds.plants.size() < 2) throw Error("scenario", "influence needs at least 2 plants");
    if (opt.aggregation.method == AggregationMethod::method2 && !opt.allow_method2) {
        throw Error("scenario", "method-2 influence is an extension; enable it explicitly");
    }
    const auto panel = build_excretors_panel(ds, opt.excretion);
    const NationalCurve full = aggregate(panel, opt.aggregation);

    std::vector<PlantInfluence> out;
    for (const auto& id : panel.plant_ids) {
        PlantInfluence inf;
        inf.plant_id = id;
        inf.residents = panel.residents.at(id);
        ExcretorsPanel without = panel;
        without.plant_ids.erase(std::find(without.plant_ids.begin(), without.plant_ids.end(), id));
        without.per_plant.erase(id);
        without.per_capita.erase(id);
        without.residents.erase(id);
        try {
            const NationalCurve reduced = aggregate(without, opt.aggregation);
            const auto pair = align_curves(full.series, reduced.series);
            inf.flagged = pair.reduced;
            inf.value = dissimilarity(pair.x, pair.y, {opt.measure, opt.max_lag});
            if (opt.normalize) inf.value /= static_cast<double>(inf.residents);
        } catch (const Error& e) {
            inf.value = kMissing;
            inf.error = e.what();
        }
        out.push_back(std::move(inf));
    }
    return out;
}

}  // namespace wwmon
