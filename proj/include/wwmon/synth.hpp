#pragma once

#include "wwmon/excretion.hpp"
#include "wwmon/ingest.hpp"
#include "wwmon/series.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace wwmon {

/// Gaussian-shaped epidemic bump in per-capita excretors (per 100,000).
struct Wave {
    Date peak;
    double height = 0.0;
    double width_days = 1.0;
};

struct SynthConfig {
    int n_plants = 48;
    std::vector<std::string> states = {"Burgenland", "Carinthia",     "Lower Austria",
                                       "Upper Austria", "Salzburg",   "Styria",
                                       "Tyrol",      "Vorarlberg",    "Vienna"};
    std::pair<std::int64_t, std::int64_t> residents_range = {5'000, 2'000'000};
    double baseline = 20.0;
    std::vector<Wave> waves = {{Date{2023, 3, 15}, 400.0, 20.0}, {Date{2023, 10, 10}, 600.0, 25.0}};
    double noise_sd_log = 0.2;
    /// Log-scale spread of the plant prevalence multipliers.
    double plant_spread_log = 0.3;
    std::pair<unsigned, unsigned> sampling_days = {1, 4};  // ISO weekdays, Mon + Thu
    Date first_day{2023, 1, 2};
    Date last_day{2023, 12, 31};
    std::uint64_t seed = 1;

    void validate() const;
};

/// National per-capita excretor rate implied by the configured waves.
double true_rate(const SynthConfig& cfg, Date d);
DailySeries true_national_curve(const SynthConfig& cfg);

/// Panel whose true excretors are known: each plant carries the national waves
/// times a multiplier, the multipliers average to 1 weighted by residents, and
/// concentrations are back-solved through the excretor formula before noise.
PanelDataset generate_panel(const SynthConfig& cfg, const ExcretionConfig& exc = {});

}  // namespace wwmon
