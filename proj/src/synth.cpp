#include "wwmon/synth.hpp"

#include "wwmon/error.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace wwmon {

void SynthConfig::validate() const {
    if (n_plants < 1) throw Error("synth", "n_plants must be >= 1");
    if (states.empty()) throw Error("synth", "at least one state label is needed");
    if (residents_range.first < 1 || residents_range.second < residents_range.first) {
        throw Error("synth", "invalid residents range");
    }
    for (const auto& w : waves) {
        if (!(w.width_days > 0.0)) throw Error("synth", "wave widths must be > 0");
        if (w.height < 0.0) throw Error("synth", "wave heights must be >= 0");
    }
    if (!(noise_sd_log >= 0.0)) throw Error("synth", "noise_sd_log must be >= 0");
    if (!(plant_spread_log >= 0.0)) throw Error("synth", "plant_spread_log must be >= 0");
    if (!(baseline > 0.0)) throw Error("synth", "baseline must be > 0");
    for (unsigned wd : {sampling_days.first, sampling_days.second}) {
        if (wd < 1 || wd > 7) throw Error("synth", "sampling days are ISO weekdays 1..7");
    }
    if (last_day < first_day) throw Error("synth", "last_day before first_day");
}

double true_rate(const SynthConfig& cfg, Date d) {
    double r = cfg.baseline;
    for (const auto& w : cfg.waves) {
        const double z = static_cast<double>(d - w.peak) / w.width_days;
        r += w.height * std::exp(-0.5 * z * z);
    }
    return r;
}

DailySeries true_national_curve(const SynthConfig& cfg) {
    cfg.validate();
    DailySeries s{cfg.first_day, {}, "truth"};
    for (Date d = cfg.first_day; d <= cfg.last_day; d = d + 1) s.values.push_back(true_rate(cfg, d));
    return s;
}

PanelDataset generate_panel(const SynthConfig& cfg, const ExcretionConfig& exc) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.n_plants);

    std::vector<PlantMeta> plants(n);
    std::vector<double> multiplier(n);
    std::vector<double> flow_per_resident(n);
    {
        std::mt19937_64 rng(cfg.seed);
        const double lo = std::log(static_cast<double>(cfg.residents_range.first));
        const double hi = std::log(static_cast<double>(cfg.residents_range.second));
        std::uniform_real_distribution<double> log_res(lo, hi);
        std::normal_distribution<double> z;
        std::uniform_real_distribution<double> flow(0.15, 0.35);  // m^3 per resident per day
        for (std::size_t i = 0; i < n; ++i) {
            char id[16];
            std::snprintf(id, sizeof id, "WWTP%02zu", i + 1);
            auto& p = plants[i];
            p.plant_id = id;
            p.in_initial_program = i % 2 == 0;
            p.state = cfg.states[i % cfg.states.size()];
            p.sewer_type = kSewerTypes[i % kSewerTypes.size()];
            p.residents = std::llround(std::exp(log_res(rng)));
            multiplier[i] = std::exp(cfg.plant_spread_log * z(rng));
            flow_per_resident[i] = flow(rng);
        }
    }
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weighted += multiplier[i] * static_cast<double>(plants[i].residents);
        total += static_cast<double>(plants[i].residents);
    }
    for (auto& m : multiplier) m *= total / weighted;

    std::vector<SampleRecord> samples;
    for (std::size_t i = 0; i < n; ++i) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(i)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> z;
        std::uniform_real_distribution<double> temp(8.0, 22.0);
        std::uniform_real_distribution<double> cod(200.0, 900.0);
        std::uniform_real_distribution<double> nitrogen(20.0, 80.0);
        const auto& p = plants[i];
        const double residents = static_cast<double>(p.residents);
        for (Date d = cfg.first_day; d <= cfg.last_day; d = d + 1) {
            const unsigned wd = d.iso_weekday();
            if (wd != cfg.sampling_days.first && wd != cfg.sampling_days.second) continue;
            const double rate = multiplier[i] * true_rate(cfg, d);
            const double excretors = rate * residents / 1e5;
            const double inflow = residents * flow_per_resident[i] * std::exp(0.1 * z(rng));
            double conc = excretors * exc.shedding_per_person / (inflow * ExcretionConfig::kLitreFactor);
            if (cfg.noise_sd_log > 0.0) conc *= std::exp(cfg.noise_sd_log * z(rng));
            SampleRecord s;
            s.plant_id = p.plant_id;
            s.date = d;
            s.concentration = conc;
            s.inflow = inflow;
            s.temperature = std::round(temp(rng) * 10.0) / 10.0;
            s.cod = std::round(cod(rng));
            const double tn = std::round(nitrogen(rng) * 10.0) / 10.0;
            s.nitrogen = tn;
            s.ammonium_nitrogen = std::round(tn * 0.7 * 10.0) / 10.0;
            s.lab_sample_id = p.plant_id + "-" + d.iso();
            samples.push_back(std::move(s));
        }
    }
    if (samples.empty()) throw Error("synth", "no sampling day falls inside the configured span");
    return make_panel(std::move(plants), std::move(samples));
}

}  // namespace wwmon
