#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wwmon/aggregation.hpp"
#include "wwmon/error.hpp"
#include "wwmon/excretion.hpp"
#include "wwmon/synth.hpp"

#include <cmath>
#include <sstream>

using namespace wwmon;

namespace {

NationalCurve method1(const PanelDataset& ds) { return aggregate_method1(build_excretors_panel(ds)); }

}  // namespace

TEST_CASE("noiseless single plant recovers the truth at sample dates") {
    SynthConfig cfg;
    cfg.n_plants = 1;
    cfg.noise_sd_log = 0;
    const auto ds = generate_panel(cfg);
    const auto curve = method1(ds);
    for (const auto& s : ds.samples) {
        const auto i = static_cast<std::size_t>(s.date - curve.series.start_date);
        CHECK(curve.series.values[i] == doctest::Approx(true_rate(cfg, s.date)).epsilon(1e-12));
    }
}

TEST_CASE("noiseless panel: method 1 equals the configured waves") {
    SynthConfig cfg;
    cfg.noise_sd_log = 0;
    const auto ds = generate_panel(cfg);
    const auto curve = method1(ds);
    double worst = 0;
    for (const auto& s : ds.samples) {
        const auto i = static_cast<std::size_t>(s.date - curve.series.start_date);
        const double truth = true_rate(cfg, s.date);
        worst = std::max(worst, std::abs(curve.series.values[i] - truth) / truth);
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("same seed, same bytes; different seed, different data") {
    SynthConfig cfg;
    std::ostringstream a, b, c;
    write_panel_csv(a, generate_panel(cfg));
    write_panel_csv(b, generate_panel(cfg));
    cfg.seed = 2;
    write_panel_csv(c, generate_panel(cfg));
    CHECK(a.str() == b.str());
    CHECK(a.str() != c.str());
}

TEST_CASE("two waves give two peaks near the configured dates") {
    SynthConfig cfg;
    const auto curve = method1(generate_panel(cfg)).series;
    // Smooth with a centred 15-day mean, then keep local maxima that dominate a 60-day window.
    const std::size_t w = 7;
    std::vector<double> sm(curve.size(), kMissing);
    for (std::size_t i = w; i + w < curve.size(); ++i) {
        double s = 0;
        for (std::size_t j = i - w; j <= i + w; ++j) s += curve.values[j];
        sm[i] = s / (2 * w + 1);
    }
    std::vector<Date> peaks;
    for (std::size_t i = 30; i + 30 < sm.size(); ++i) {
        bool top = sm[i] > 3 * cfg.baseline;
        for (std::size_t j = i - 30; j <= i + 30 && top; ++j) top = !(sm[j] > sm[i]);
        if (top) peaks.push_back(curve.date_at(i));
    }
    REQUIRE(peaks.size() == 2);
    CHECK(std::abs(peaks[0] - cfg.waves[0].peak) <= 7);
    CHECK(std::abs(peaks[1] - cfg.waves[1].peak) <= 7);
}

TEST_CASE("metadata layout") {
    const auto ds = generate_panel(SynthConfig{});
    REQUIRE(ds.plants.size() == 48);
    CHECK(ds.plants[0].plant_id == "WWTP01");
    std::size_t initial = 0;
    for (const auto& p : ds.plants) {
        initial += p.in_initial_program;
        CHECK(p.residents >= 5000);
        CHECK(p.residents <= 2000000);
    }
    CHECK(initial == 24);
    for (const auto& s : ds.samples) CHECK((s.date.iso_weekday() == 1 || s.date.iso_weekday() == 4));
}

TEST_CASE("config validation") {
    SynthConfig bad;
    bad.n_plants = 0;
    CHECK_THROWS_AS(generate_panel(bad), Error);
    bad = SynthConfig{};
    bad.waves[0].width_days = 0;
    CHECK_THROWS_AS(generate_panel(bad), Error);
    bad = SynthConfig{};
    bad.noise_sd_log = -1;
    CHECK_THROWS_AS(generate_panel(bad), Error);
}
