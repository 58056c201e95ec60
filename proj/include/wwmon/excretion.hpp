#pragma once

#include "wwmon/ingest.hpp"
#include "wwmon/series.hpp"

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wwmon {

struct ExcretionConfig {
    /// RNA copies shed per infected person per day.
    double shedding_per_person = 16e9;
    /// Converts ml (concentration) and m^3 (inflow) to litres.
    static constexpr double kLitreFactor = 1e6;
};

struct ExcretorEstimate {
    double excretors = 0.0;   // persons
    double virus_load = 0.0;  // RNA copies per day
};

/// Fictitious excretors c * inflow * 1e6 / shedding, with the virus load as a by-product.
ExcretorEstimate fictitious_excretors(double concentration, double inflow,
                                      const ExcretionConfig& cfg = {});

/// Excretors per 100,000 residents.
double per_capita_rate(double excretors, std::int64_t residents);

/// Linear interpolation onto a daily grid from the first to the last sample.
/// Same-date samples are averaged first. No extrapolation.
DailySeries interpolate_daily(std::span<const std::pair<Date, double>> samples,
                              std::string label = {});

/// Per-plant daily series on one shared grid. Days outside a plant's own
/// sampling span hold kMissing.
struct ExcretorsPanel {
    Date start_date;
    std::size_t length = 0;
    std::vector<std::string> plant_ids;  // sorted
    std::map<std::string, DailySeries> per_plant;
    std::map<std::string, DailySeries> per_capita;
    std::map<std::string, std::int64_t> residents;

    [[nodiscard]] Date date_at(std::size_t i) const {
        return start_date + static_cast<std::int64_t>(i);
    }
};

ExcretorsPanel build_excretors_panel(const PanelDataset& ds, const ExcretionConfig& cfg = {});

/// Tidy export: plant_id,date,excretors,per_capita (missing days skipped).
void write_panel_series_csv(std::ostream& out, const ExcretorsPanel& panel);

}  // namespace wwmon
