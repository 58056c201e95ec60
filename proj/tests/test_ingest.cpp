#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wwmon/error.hpp"
#include "wwmon/ingest.hpp"
#include "wwmon/synth.hpp"

#include <sstream>

using namespace wwmon;

namespace {

const char* kHeader =
    "plant_id,initial_program,state,sewer_type,date,lab_sample_id,concentration,inflow,temperature,residents,cod,"
    "nitrogen,ammonium_nitrogen\n";

std::string row(const std::string& date, const std::string& conc, const std::string& inflow,
                const std::string& lab = "") {
    return "P1,1,Vienna,combined," + date + "," + (lab.empty() ? date : lab) + "," + conc + "," + inflow +
           ",12.5,120000,,,\n";
}

PanelDataset parse(const std::string& text) {
    std::istringstream in(text);
    return parse_panel_csv(in);
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("minimal valid file") {
    const auto ds = parse(std::string(kHeader) + row("2023-01-19", "1000", "10000") + row("2023-01-23", "800", "9000"));
    REQUIRE(ds.plants.size() == 1);
    CHECK(ds.samples.size() == 2);
    CHECK(ds.plants[0].residents == 120000);
    CHECK(ds.plants[0].sewer_type == SewerType::combined);
    CHECK(ds.date_span == std::pair{Date{2023, 1, 19}, Date{2023, 1, 23}});
    CHECK(ds.samples[0].temperature == 12.5);
    CHECK_FALSE(ds.samples[0].cod.has_value());
    CHECK(validate_panel(ds).empty());
}

TEST_CASE("zero inflow names the row") {
    std::string text = kHeader;
    text += row("2023-01-02", "1", "5");
    text += row("2023-01-03", "1", "5");
    text += row("2023-01-04", "1", "5");
    text += row("2023-01-05", "1", "5");
    text += row("2023-01-06", "1", "0");
    const auto msg = error_of(text);
    CHECK(msg.find("row 5") != std::string::npos);
    CHECK(msg.find("inflow") != std::string::npos);
}

TEST_CASE("schema errors") {
    CHECK(error_of("plant_id,date\nP1,2023-01-01\n").find("missing") != std::string::npos);
    CHECK(error_of(std::string(kHeader) + row("2023-13-01", "1", "5")).find("row 1") != std::string::npos);
    CHECK(error_of(std::string(kHeader) + row("2023-01-01", "abc", "5")).find("row 1") != std::string::npos);
    CHECK(error_of(std::string(kHeader) + row("2023-01-01", "-1", "5")).find("concentration") != std::string::npos);
    const auto dup = std::string(kHeader) + row("2023-01-01", "1", "5", "L1") + row("2023-01-01", "2", "5", "L1");
    CHECK(error_of(dup).find("duplicate") != std::string::npos);
}

TEST_CASE("same-date replicates with distinct lab ids are kept") {
    const auto ds = parse(std::string(kHeader) + row("2023-01-01", "1", "5", "A") + row("2023-01-01", "3", "5", "B"));
    CHECK(ds.samples.size() == 2);
}

TEST_CASE("column mapping and delimiter") {
    auto schema = PanelSchema::canonical();
    schema.delimiter = ';';
    schema.set_column("inflow", "Q_m3d");
    std::string header = kHeader;
    header.replace(header.find("inflow"), 6, "Q_m3d");
    std::string text = header + row("2023-01-01", "1", "5");
    for (auto& ch : text) {
        if (ch == ',') ch = ';';
    }
    std::istringstream in(text);
    const auto ds = parse_panel_csv(in, schema);
    CHECK(ds.samples.at(0).inflow == 5.0);
    CHECK_THROWS_AS(schema.set_column("flow", "x"), Error);
}

TEST_CASE("validate_panel findings") {
    auto ds = parse(std::string(kHeader) + row("2023-01-01", "1", "5"));
    auto orphan = ds;
    orphan.samples.push_back(orphan.samples[0]);
    orphan.samples.back().plant_id = "ghost";
    CHECK(validate_panel(orphan).size() == 1);
    auto zero = ds;
    zero.plants[0].residents = 0;
    CHECK(validate_panel(zero).size() == 1);
}

TEST_CASE("synthetic panel: size, validity and CSV round trip") {
    SynthConfig cfg;
    cfg.first_day = Date{2023, 1, 19};
    cfg.last_day = Date{2024, 12, 31};
    const auto ds = generate_panel(cfg);
    // 48 plants, Mon + Thu over the span.
    std::size_t days = 0;
    for (Date d = cfg.first_day; d <= cfg.last_day; d = d + 1) days += d.iso_weekday() == 1 || d.iso_weekday() == 4;
    CHECK(ds.samples.size() == 48 * days);
    CHECK(ds.samples.size() == doctest::Approx(9888).epsilon(0.01));
    CHECK(validate_panel(ds).empty());

    std::stringstream buf;
    write_panel_csv(buf, ds);
    const auto back = parse_panel_csv(buf);
    CHECK(back == ds);
}

TEST_CASE("csv helpers") {
    const auto cells = csv::split_line(R"(a,"b,c","d""e",)", ',');
    REQUIRE(cells.size() == 4);
    CHECK(cells[1] == "b,c");
    CHECK(cells[2] == "d\"e");
    CHECK(cells[3].empty());
    for (double v : {0.1, 1.0 / 3.0, 6.02e23, -1e-300}) CHECK(csv::parse_double(csv::format_double(v)) == v);
    CHECK(csv::format_double(kMissing) == "NA");
}
