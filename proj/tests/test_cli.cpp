#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using wwmon::cli::run_command;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("wwmon_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t lines(const fs::path& p) {
    std::ifstream in(p);
    std::string l;
    std::size_t n = 0;
    while (std::getline(in, l)) ++n;
    return n;
}

}  // namespace

TEST_CASE("simulate then aggregate") {
    const auto dir = scratch("agg");
    const std::string out = dir.string();
    REQUIRE(run_command({"simulate", "--seed", "7", "-o", out, "--no-plots"}) == 0);
    REQUIRE(run_command({"aggregate", "-i", out + "/panel.csv", "--method", "1", "-o", out}) == 0);
    CHECK(fs::exists(dir / "curve.csv"));
    CHECK(fs::exists(dir / "curve.svg"));
    CHECK_FALSE(fs::exists(dir / "truth.svg"));
    // Mon 2023-01-02 .. Thu 2023-12-28: 361 days plus the header.
    CHECK(lines(dir / "curve.csv") == 362);
    const auto manifest = nlohmann::json::parse(slurp(dir / "aggregate.manifest.json"));
    CHECK(manifest["command"] == "aggregate");
    CHECK(manifest["config"]["method"] == "1");
    CHECK(nlohmann::json::parse(slurp(dir / "simulate.manifest.json"))["seed"] == 7);

    REQUIRE(run_command({"aggregate", "-i", out + "/panel.csv", "--method", "2", "-o", out}) == 0);
    CHECK(fs::exists(dir / "iqr_lower.csv"));
}

TEST_CASE("scenario ranking has 12 rows with a zero reference") {
    const auto dir = scratch("scn");
    const std::string out = dir.string();
    REQUIRE(run_command({"simulate", "--seed", "3", "--last-day", "2023-06-30", "-o", out}) == 0);
    REQUIRE(run_command({"scenarios", "-i", out + "/panel.csv", "--method", "1", "--measure", "corr", "-o", out}) == 0);
    std::ifstream in(dir / "ranking.csv");
    std::string line;
    std::getline(in, line);
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 12);
    CHECK(rows[0].rfind("1,Reference,\"all48/twice_per_week\",0,0,0,", 0) == 0);
}

TEST_CASE("monitor on a flat curve raises no alarm") {
    const auto dir = scratch("mon");
    const std::string out = dir.string();
    REQUIRE(run_command({"simulate", "--no-waves", "--noise", "0", "-o", out}) == 0);
    REQUIRE(run_command({"aggregate", "-i", out + "/panel.csv", "-o", out}) == 0);
    REQUIRE(run_command({"monitor", "-i", out + "/curve.csv", "--chart", "cusum", "--k", "0.5", "--h", "4.5",
                         "--mu0", "20", "--sigma", "1", "-o", out}) == 0);
    std::ifstream in(dir / "chart.csv");
    std::string line;
    std::getline(in, line);
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        CHECK(line.back() == '0');
    }
    CHECK(n == 361);
    // A flat phase-1 span cannot provide sigma.
    CHECK(run_command({"monitor", "-i", out + "/curve.csv", "--phase1", "2023-01-02:2023-02-01", "-o", out}) == 2);
}

TEST_CASE("remaining subcommands produce their artifacts") {
    const auto dir = scratch("rest");
    const std::string out = dir.string();
    REQUIRE(run_command({"simulate", "--seed", "5", "-o", out}) == 0);
    const std::string panel = out + "/panel.csv";
    CHECK(run_command({"validate", "-i", panel, "-o", out}) == 0);
    CHECK(lines(dir / "findings.csv") == 1);
    CHECK(run_command({"influence", "-i", panel, "--measure", "l2", "-o", out}) == 0);
    CHECK(lines(dir / "influence.csv") == 49);
    CHECK(run_command({"bootstrap-ci", "-i", panel, "--replications", "200", "-o", out}) == 0);
    CHECK(run_command({"bootstrap-ci", "-i", panel, "--kind", "pointwise", "-o", out}) == 0);
    REQUIRE(run_command({"aggregate", "-i", panel, "-o", out}) == 0);
    const std::string curve = out + "/curve.csv";
    for (const char* chart : {"cusum", "shewhart", "residual", "pcc"}) {
        CHECK(run_command({"monitor", "-i", curve, "--chart", chart, "--phase1", "2023-05-01:2023-07-31", "-o", out}) ==
              0);
    }
    CHECK(run_command({"fit-count-model", "-i", curve, "-o", out}) == 0);
    const auto fit = nlohmann::json::parse(slurp(dir / "fit.json"));
    CHECK(fit["mean_coeffs"].size() == 3);
    CHECK(fs::exists(dir / "fitted.svg"));
}

TEST_CASE("exit codes and config file") {
    const auto dir = scratch("codes");
    const std::string out = dir.string();
    CHECK(run_command({}) == 1);
    CHECK(run_command({"nonsense"}) == 1);
    CHECK(run_command({"aggregate", "--bogus-flag", "-o", out}) == 1);
    CHECK(run_command({"aggregate", "-i", out + "/missing.csv", "-o", out}) == 2);
    CHECK(run_command({"aggregate", "-o", out}) == 1);
    CHECK(run_command({"aggregate", "--help"}) == 0);

    REQUIRE(run_command({"simulate", "--last-day", "2023-03-31", "-o", out}) == 0);
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# shared settings\nmethod = 2\nquantile=0.25\nchart = pcc\n";
    }
    const std::string panel = out + "/panel.csv";
    REQUIRE(run_command({"aggregate", "--config", out + "/run.cfg", "-i", panel, "-o", out}) == 0);
    auto m = nlohmann::json::parse(slurp(dir / "aggregate.manifest.json"));
    CHECK(m["config"]["method"] == "2");
    CHECK(m["config"]["quantile"] == "0.25");
    // Flags win over the file.
    REQUIRE(run_command({"aggregate", "--config", out + "/run.cfg", "-i", panel, "--method", "1", "-o", out}) == 0);
    m = nlohmann::json::parse(slurp(dir / "aggregate.manifest.json"));
    CHECK(m["config"]["method"] == "1");
    {
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "no_such_key = 1\n";
    }
    CHECK(run_command({"aggregate", "--config", out + "/bad.cfg", "-i", panel, "-o", out}) == 1);
}

TEST_CASE("output directory from the environment") {
    const auto dir = scratch("env");
    setenv("WWMON_OUTPUT_DIR", dir.string().c_str(), 1);
    CHECK(run_command({"simulate", "--last-day", "2023-02-28"}) == 0);
    unsetenv("WWMON_OUTPUT_DIR");
    CHECK(fs::exists(dir / "panel.csv"));
}
