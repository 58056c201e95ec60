#pragma once

#include "wwmon/date.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wwmon {

enum class SewerType { unknown, separate, combined, separate_and_combined };

inline constexpr std::array<SewerType, 4> kSewerTypes = {
    SewerType::unknown, SewerType::separate, SewerType::combined,
    SewerType::separate_and_combined};

std::string_view to_string(SewerType t);
std::optional<SewerType> parse_sewer_type(std::string_view s);

struct PlantMeta {
    std::string plant_id;
    bool in_initial_program = false;
    std::string state;
    SewerType sewer_type = SewerType::unknown;
    std::int64_t residents = 0;

    bool operator==(const PlantMeta&) const = default;
};

/// One laboratory measurement. Chemistry fields are carried through untouched.
struct SampleRecord {
    std::string plant_id;
    Date date;
    double concentration = 0.0;  // RNA copies per ml
    double inflow = 0.0;         // m^3 per day
    std::optional<double> temperature;
    std::optional<double> cod;
    std::optional<double> nitrogen;
    std::optional<double> ammonium_nitrogen;
    std::string lab_sample_id;

    bool operator==(const SampleRecord&) const = default;
};

struct PanelDataset {
    std::vector<PlantMeta> plants;
    std::vector<SampleRecord> samples;
    std::pair<Date, Date> date_span;

    [[nodiscard]] const PlantMeta* find_plant(std::string_view id) const;

    bool operator==(const PanelDataset&) const = default;
};

/// Builds a dataset whose date_span is the exact min/max of the sample dates.
PanelDataset make_panel(std::vector<PlantMeta> plants, std::vector<SampleRecord> samples);

/// Logical variables of the panel schema, in canonical column order.
enum class Field {
    plant_id,
    initial_program,
    state,
    sewer_type,
    date,
    lab_sample_id,
    concentration,
    inflow,
    temperature,
    residents,
    cod,
    nitrogen,
    ammonium_nitrogen,
};

inline constexpr std::size_t kFieldCount = 13;

std::string_view canonical_name(Field f);
bool is_mandatory(Field f);

/// Maps each logical field to a column header in the input file.
struct PanelSchema {
    std::map<Field, std::string> columns;
    char delimiter = ',';

    /// Every field mapped to its canonical name.
    static PanelSchema canonical();

    /// Applies "field=column" overrides, e.g. "inflow=Q_m3d".
    void set_column(std::string_view field, std::string column);
};

PanelDataset parse_panel_csv(const std::string& path, const PanelSchema& schema = PanelSchema::canonical());
PanelDataset parse_panel_csv(std::istream& in, const PanelSchema& schema = PanelSchema::canonical());

/// Writes the dataset in the canonical schema, one row per sample, plants
/// metadata repeated on each row. Numbers use shortest round-trip formatting.
void write_panel_csv(std::ostream& out, const PanelDataset& ds, char delimiter = ',');

struct Finding {
    std::string plant_id;
    std::optional<Date> date;
    std::string message;
};

std::vector<Finding> validate_panel(const PanelDataset& ds);

namespace csv {

/// Splits one line, honouring double-quoted cells with "" escapes.
std::vector<std::string> split_line(std::string_view line, char delimiter);

/// Shortest text form that parses back to the same double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);

}  // namespace csv

}  // namespace wwmon
