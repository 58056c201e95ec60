#include "wwmon/ingest.hpp"

#include "wwmon/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace wwmon {

namespace {

constexpr std::array<std::string_view, kFieldCount> kFieldNames = {
    "plant_id",      "initial_program", "state",       "sewer_type", "date",
    "lab_sample_id", "concentration",   "inflow",      "temperature", "residents",
    "cod",           "nitrogen",        "ammonium_nitrogen"};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::optional<bool> parse_bool(std::string_view s) {
    const std::string v = lower(std::string(s));
    if (v == "1" || v == "true" || v == "yes" || v == "y") return true;
    if (v == "0" || v == "false" || v == "no" || v == "n") return false;
    return std::nullopt;
}

[[noreturn]] void fail_row(std::size_t row, const std::string& what) {
    throw Error("ingest", "row " + std::to_string(row) + ": " + what);
}

}  // namespace

std::string_view to_string(SewerType t) {
    switch (t) {
        case SewerType::unknown: return "unknown";
        case SewerType::separate: return "separate";
        case SewerType::combined: return "combined";
        case SewerType::separate_and_combined: return "separate_and_combined";
    }
    return "unknown";
}

std::optional<SewerType> parse_sewer_type(std::string_view s) {
    const std::string v = lower(trim(s));
    for (SewerType t : kSewerTypes) {
        if (v == to_string(t)) return t;
    }
    if (v.empty()) return SewerType::unknown;
    return std::nullopt;
}

const PlantMeta* PanelDataset::find_plant(std::string_view id) const {
    auto it = std::find_if(plants.begin(), plants.end(),
                           [&](const PlantMeta& p) { return p.plant_id == id; });
    return it == plants.end() ? nullptr : &*it;
}

PanelDataset make_panel(std::vector<PlantMeta> plants, std::vector<SampleRecord> samples) {
    PanelDataset ds{std::move(plants), std::move(samples), {}};
    if (!ds.samples.empty()) {
        auto [lo, hi] = std::minmax_element(
            ds.samples.begin(), ds.samples.end(),
            [](const SampleRecord& a, const SampleRecord& b) { return a.date < b.date; });
        ds.date_span = {lo->date, hi->date};
    }
    return ds;
}

std::string_view canonical_name(Field f) { return kFieldNames[static_cast<std::size_t>(f)]; }

bool is_mandatory(Field f) {
    switch (f) {
        case Field::temperature:
        case Field::cod:
        case Field::nitrogen:
        case Field::ammonium_nitrogen: return false;
        default: return true;
    }
}

PanelSchema PanelSchema::canonical() {
    PanelSchema s;
    for (std::size_t i = 0; i < kFieldCount; ++i) {
        s.columns[static_cast<Field>(i)] = std::string(kFieldNames[i]);
    }
    return s;
}

void PanelSchema::set_column(std::string_view field, std::string column) {
    for (std::size_t i = 0; i < kFieldCount; ++i) {
        if (kFieldNames[i] == field) {
            columns[static_cast<Field>(i)] = std::move(column);
            return;
        }
    }
    throw Error("ingest", "unknown schema field '" + std::string(field) + "'");
}

namespace csv {

std::vector<std::string> split_line(std::string_view line, char delimiter) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            cells.push_back(trim(cell));
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    const char* first = t.data();
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

}  // namespace csv

PanelDataset parse_panel_csv(const std::string& path, const PanelSchema& schema) {
    std::ifstream in(path);
    if (!in) throw Error("ingest", "cannot open '" + path + "'");
    return parse_panel_csv(in, schema);
}

PanelDataset parse_panel_csv(std::istream& in, const PanelSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw Error("ingest", "missing header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = csv::split_line(line, schema.delimiter);

    std::array<std::optional<std::size_t>, kFieldCount> col{};
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        const auto field = static_cast<Field>(f);
        auto mapped = schema.columns.find(field);
        const std::string name =
            mapped != schema.columns.end() ? mapped->second : std::string(kFieldNames[f]);
        auto it = std::find(header.begin(), header.end(), name);
        if (it != header.end()) {
            col[f] = static_cast<std::size_t>(it - header.begin());
        } else if (is_mandatory(field)) {
            throw Error("ingest", "missing mandatory column '" + name + "' (field " +
                                      std::string(kFieldNames[f]) + ")");
        }
    }

    std::vector<PlantMeta> plants;
    std::map<std::string, std::size_t> plant_index;
    std::vector<SampleRecord> samples;
    std::set<std::tuple<std::string, Date, std::string>> keys;

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = csv::split_line(line, schema.delimiter);
        auto cell = [&](Field f) -> std::optional<std::string_view> {
            const auto& c = col[static_cast<std::size_t>(f)];
            if (!c) return std::nullopt;
            if (*c >= cells.size()) fail_row(row, "too few cells");
            return std::string_view(cells[*c]);
        };
        auto number = [&](Field f) -> double {
            auto v = csv::parse_double(*cell(f));
            if (!v || !std::isfinite(*v)) {
                fail_row(row, "unparseable number in " + std::string(canonical_name(f)) + ": '" +
                                  std::string(*cell(f)) + "'");
            }
            return *v;
        };
        auto optional_number = [&](Field f) -> std::optional<double> {
            auto c = cell(f);
            if (!c || c->empty() || *c == "NA") return std::nullopt;
            auto v = csv::parse_double(*c);
            if (!v || !std::isfinite(*v)) {
                fail_row(row, "unparseable number in " + std::string(canonical_name(f)) + ": '" +
                                  std::string(*c) + "'");
            }
            return v;
        };

        PlantMeta meta;
        meta.plant_id = std::string(*cell(Field::plant_id));
        if (meta.plant_id.empty()) fail_row(row, "empty plant_id");
        auto initial = parse_bool(*cell(Field::initial_program));
        if (!initial) fail_row(row, "unparseable initial_program flag");
        meta.in_initial_program = *initial;
        meta.state = std::string(*cell(Field::state));
        auto sewer = parse_sewer_type(*cell(Field::sewer_type));
        if (!sewer) fail_row(row, "unknown sewer_type '" + std::string(*cell(Field::sewer_type)) + "'");
        meta.sewer_type = *sewer;
        const double residents = number(Field::residents);
        if (residents <= 0.0) fail_row(row, "residents must be > 0");
        if (residents != std::floor(residents)) fail_row(row, "residents must be an integer");
        meta.residents = static_cast<std::int64_t>(residents);

        SampleRecord s;
        s.plant_id = meta.plant_id;
        auto date = Date::parse(*cell(Field::date));
        if (!date) fail_row(row, "unparseable date '" + std::string(*cell(Field::date)) + "'");
        s.date = *date;
        s.lab_sample_id = std::string(*cell(Field::lab_sample_id));
        s.concentration = number(Field::concentration);
        if (s.concentration < 0.0) fail_row(row, "concentration must be >= 0");
        s.inflow = number(Field::inflow);
        if (s.inflow <= 0.0) fail_row(row, "inflow must be > 0");
        s.temperature = optional_number(Field::temperature);
        s.cod = optional_number(Field::cod);
        s.nitrogen = optional_number(Field::nitrogen);
        s.ammonium_nitrogen = optional_number(Field::ammonium_nitrogen);

        if (auto it = plant_index.find(meta.plant_id); it == plant_index.end()) {
            plant_index.emplace(meta.plant_id, plants.size());
            plants.push_back(meta);
        } else if (!(plants[it->second] == meta)) {
            fail_row(row, "metadata for plant '" + meta.plant_id + "' differs from earlier rows");
        }
        if (!keys.emplace(s.plant_id, s.date, s.lab_sample_id).second) {
            fail_row(row, "duplicate (plant, date, lab sample id) = (" + s.plant_id + ", " +
                              s.date.iso() + ", " + s.lab_sample_id + ")");
        }
        samples.push_back(std::move(s));
    }
    return make_panel(std::move(plants), std::move(samples));
}

void write_panel_csv(std::ostream& out, const PanelDataset& ds, char delimiter) {
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        if (f) out << delimiter;
        out << kFieldNames[f];
    }
    out << '\n';
    auto opt = [](const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); };
    auto quote = [delimiter](const std::string& s) {
        if (s.find(delimiter) == std::string::npos && s.find('"') == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    };
    for (const auto& s : ds.samples) {
        const PlantMeta* p = ds.find_plant(s.plant_id);
        if (!p) throw Error("ingest", "sample references unknown plant '" + s.plant_id + "'");
        const char d = delimiter;
        out << quote(p->plant_id) << d << (p->in_initial_program ? 1 : 0) << d << quote(p->state)
            << d << to_string(p->sewer_type) << d << s.date.iso() << d << quote(s.lab_sample_id)
            << d << csv::format_double(s.concentration) << d << csv::format_double(s.inflow) << d
            << opt(s.temperature) << d << p->residents << d << opt(s.cod) << d << opt(s.nitrogen)
            << d << opt(s.ammonium_nitrogen) << '\n';
    }
}

std::vector<Finding> validate_panel(const PanelDataset& ds) {
    std::vector<Finding> findings;
    std::set<std::string> ids;
    for (const auto& p : ds.plants) {
        if (!ids.insert(p.plant_id).second) {
            findings.push_back({p.plant_id, std::nullopt, "duplicate plant_id"});
        }
        if (p.residents <= 0) {
            findings.push_back({p.plant_id, std::nullopt, "residents must be > 0"});
        }
    }
    std::set<std::tuple<std::string, Date, std::string>> keys;
    std::optional<Date> lo;
    std::optional<Date> hi;
    for (const auto& s : ds.samples) {
        if (!ids.contains(s.plant_id)) {
            findings.push_back({s.plant_id, s.date, "sample references unknown plant"});
        }
        if (!std::isfinite(s.concentration) || s.concentration < 0.0) {
            findings.push_back({s.plant_id, s.date, "concentration must be finite and >= 0"});
        }
        if (!std::isfinite(s.inflow) || s.inflow <= 0.0) {
            findings.push_back({s.plant_id, s.date, "inflow must be finite and > 0"});
        }
        if (!keys.emplace(s.plant_id, s.date, s.lab_sample_id).second) {
            findings.push_back({s.plant_id, s.date, "duplicate (plant, date, lab sample id)"});
        }
        if (!lo || s.date < *lo) lo = s.date;
        if (!hi || *hi < s.date) hi = s.date;
    }
    if (lo && (ds.date_span.first != *lo || ds.date_span.second != *hi)) {
        findings.push_back({"", std::nullopt,
                            "date_span " + ds.date_span.first.iso() + ".." +
                                ds.date_span.second.iso() + " does not match sample dates " +
                                lo->iso() + ".." + hi->iso()});
    }
    return findings;
}

}  // namespace wwmon
