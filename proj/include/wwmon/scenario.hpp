#pragma once

#include "wwmon/aggregation.hpp"
#include "wwmon/dissimilarity.hpp"
#include "wwmon/excretion.hpp"
#include "wwmon/ingest.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace wwmon {

enum class SamplingVolume { all48, initial24, largest_per_state9, largest1 };
enum class SamplingFrequency { twice_per_week, once_per_week, once_per_two_weeks };

std::string_view to_string(SamplingVolume v);
std::string_view to_string(SamplingFrequency f);

/// Reduced sampling program: a plant-selection rule crossed with a thinning rule.
struct SamplingScenario {
    SamplingVolume volume = SamplingVolume::all48;
    SamplingFrequency frequency = SamplingFrequency::twice_per_week;
    std::string scenario_id = "Reference";
};

/// Identifier of a volume/frequency combination: "Reference" or S1..S11.
std::string sampling_scenario_id(SamplingVolume v, SamplingFrequency f);

/// Reference followed by S1..S11.
std::vector<SamplingScenario> sampling_scenario_grid();

inline constexpr std::int64_t kLargePlantResidents = 100'000;

enum class SizeClass { large, small };  // residents >= 100,000 / < 100,000

struct SewerScenario {
    std::set<SewerType> sewer_types;
    SizeClass size = SizeClass::large;
    std::string scenario_id;
};

/// The 4 sewer types x 2 size classes, S1..S8 (odd ids large, even ids small).
std::vector<SewerScenario> sewer_scenario_grid();

using Scenario = std::variant<SamplingScenario, SewerScenario>;

const std::string& scenario_id(const Scenario& s);
std::string describe(const Scenario& s);

PanelDataset apply_sampling_scenario(const PanelDataset& ds, const SamplingScenario& sc);
PanelDataset apply_sewer_scenario(const PanelDataset& ds, const SewerScenario& sc);
PanelDataset apply_scenario(const PanelDataset& ds, const Scenario& sc);

/// Builds the national curve of a dataset: excretors, interpolation, aggregation.
NationalCurve national_curve(const PanelDataset& ds, const AggregationConfig& agg,
                             const ExcretionConfig& exc = {});

/// Paired values of two curves over the days where both are present.
struct AlignedPair {
    std::vector<double> x;
    std::vector<double> y;
    Date first;
    Date last;
    /// True when days of `reference` were dropped (outside the other curve or missing).
    bool reduced = false;
};

AlignedPair align_curves(const DailySeries& reference, const DailySeries& other);

struct ScenarioResult {
    std::string scenario_id;
    std::string description;
    std::map<Measure, double> dissimilarity_by_measure;
    std::map<Measure, std::string> errors;
    NationalCurve curve;
    std::size_t compared_days = 0;
};

struct RankOptions {
    AggregationConfig aggregation;
    ExcretionConfig excretion;
    std::vector<Measure> measures = {Measure::l2, Measure::corr, Measure::crosscorr};
    Measure sort_by = Measure::corr;
    std::size_t max_lag = 0;
};

/// Scores every scenario against the reference curve of the full dataset.
/// Failures are recorded per scenario and measure; the batch continues.
/// Sorted ascending by `sort_by`, failures last, ties by scenario_id.
std::vector<ScenarioResult> rank_scenarios(const PanelDataset& ds, const std::vector<Scenario>& scenarios,
                                           const RankOptions& opt);

struct InfluenceOptions {
    AggregationConfig aggregation;
    ExcretionConfig excretion;
    Measure measure = Measure::corr;
    bool normalize = false;
    std::size_t max_lag = 0;
    /// Leave-one-out for the quantile curve. Not part of the original method.
    bool allow_method2 = false;
};

struct PlantInfluence {
    std::string plant_id;
    std::int64_t residents = 0;
    double value = 0.0;
    /// Compared over fewer days than the full curve.
    bool flagged = false;
    std::string error;
};

/// Leave-one-plant-out dissimilarity D_j(full, without j), optionally divided by residents.
std::vector<PlantInfluence> wwtp_influence(const PanelDataset& ds, const InfluenceOptions& opt);

}  // namespace wwmon
