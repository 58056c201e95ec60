#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wwmon/arma.hpp"
#include "wwmon/error.hpp"
#include "wwmon/series.hpp"
#include "wwmon/spm.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace wwmon;
using V = std::vector<double>;

namespace {

// Siegmund's formula written out directly, without the small-|u| series.
double siegmund_direct(double k, double h, double delta) {
    const double D = delta - k;
    const double b = h + 1.166;
    return (std::exp(-2 * D * b) + 2 * D * b - 1) / (2 * D * D);
}

V normal_stream(std::size_t n, std::uint64_t seed, double mu = 0, double sd = 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(mu, sd);
    V x(n);
    for (auto& v : x) v = z(rng);
    return x;
}

}  // namespace

TEST_CASE("CUSUM hand recursion") {
    CusumConfig cfg;
    const auto run = cusum_run(V(6, 2.0), cfg);
    const V expected{1.5, 3.0, 4.5, 6.0, 7.5, 9.0};
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(run.points[i].statistic == expected[i]);
    REQUIRE(run.first_alarm_index);
    CHECK(*run.first_alarm_index == 3);  // fourth observation
    CHECK_FALSE(run.points[2].signal);  // 4.5 is not > 4.5

    auto incl = cfg;
    incl.inclusive = true;
    CHECK(*cusum_run(V(6, 2.0), incl).first_alarm_index == 2);

    auto reset = cfg;
    reset.reset_on_signal = true;
    const auto r = cusum_run(V(6, 2.0), reset);
    CHECK(r.points[3].signal);
    CHECK(r.points[4].statistic == 1.5);

    CHECK(cusum_run(V(50, 0.0), cfg).alarm_count() == 0);
    for (const auto& p : cusum_run(V(50, 0.0), cfg).points) CHECK(p.statistic == 0.0);
    CHECK_THROWS_AS(cusum_run(V{1, std::nan("")}, cfg), Error);
    CusumConfig bad;
    bad.sigma = 0;
    CHECK_THROWS_AS(cusum_run(V{1}, bad), Error);
}

TEST_CASE("CUSUM statistic is non-negative and monotone in each input") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    CusumConfig cfg{1.0, 2.0};
    for (int rep = 0; rep < 100; ++rep) {
        auto x = normal_stream(40, 100 + rep, 1.0, 2.0);
        const auto a = cusum_run(x, cfg);
        const std::size_t j = rep % 40;
        x[j] += std::abs(z(rng));
        const auto b = cusum_run(x, cfg);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(a.points[i].statistic >= 0.0);
            CHECK(b.points[i].statistic >= a.points[i].statistic);
        }
    }
}

TEST_CASE("Siegmund approximation") {
    CHECK(siegmund_arl(0.5, 4.5, 0.0) == doctest::Approx(564).epsilon(1.0 / 564));
    CHECK(siegmund_arl(0.5, 4.5, 0.0) == doctest::Approx(siegmund_direct(0.5, 4.5, 0.0)).epsilon(1e-12));
    CHECK(siegmund_arl(0.5, 4.5, 1.0) == doctest::Approx(siegmund_direct(0.5, 4.5, 1.0)).epsilon(1e-12));
    CHECK(siegmund_arl(0.5, 4.5, 1.0) == doctest::Approx(9.34).epsilon(0.001));
    CHECK(siegmund_arl(0.5, 4.5, 0.5) == doctest::Approx(5.666 * 5.666).epsilon(1e-12));
    CHECK(siegmund_arl(0.5, 4.5, 0.5) == doctest::Approx(32.1).epsilon(0.001));
    // Continuity at D = 0.
    const double at0 = siegmund_arl(0.5, 4.5, 0.5);
    CHECK(siegmund_arl(0.5, 4.5, 0.5 + 1e-6) == doctest::Approx(at0).epsilon(1e-5));
    CHECK(siegmund_arl(0.5, 4.5, 0.5 - 1e-6) == doctest::Approx(at0).epsilon(1e-5));
    // Decreasing in the shift.
    double prev = 1e300;
    for (double d = -1; d <= 3; d += 0.01) {
        const double a = siegmund_arl(0.5, 4.5, d);
        CHECK(a > 0);
        CHECK(a < prev);
        prev = a;
    }
}

TEST_CASE("Monte Carlo ARL agrees with Siegmund") {
    CusumConfig cfg;
    const auto est = monte_carlo_cusum_arl(cfg, 0.0, 20000, 100000, 5);
    CHECK(est.censored == 0);
    CHECK(est.mean == doctest::Approx(siegmund_arl(0.5, 4.5, 0.0)).epsilon(0.05));
    const auto shifted = monte_carlo_cusum_arl(cfg, 1.0, 20000, 100000, 6);
    CHECK(shifted.mean == doctest::Approx(siegmund_arl(0.5, 4.5, 1.0)).epsilon(0.1));
    CHECK(monte_carlo_cusum_arl(cfg, 0.0, 200, 1000, 5).mean == monte_carlo_cusum_arl(cfg, 0.0, 200, 1000, 5).mean);
}

TEST_CASE("Shewhart chart") {
    ShewhartConfig cfg{10, 2, 3};
    V x(30, 10.0);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += (i % 2 ? 5.9 : -5.9);
    CHECK(shewhart_run(x, cfg).alarm_count() == 0);
    x[7] = 18;
    const auto r = shewhart_run(x, cfg);
    CHECK(r.alarm_count() == 1);
    CHECK(*r.first_alarm_index == 7);

    // Affine invariance.
    V y;
    for (double v : x) y.push_back(-3 * v + 4);
    const auto t = shewhart_run(y, ShewhartConfig{-3 * 10 + 4, 6, 3});
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(t.points[i].signal == r.points[i].signal);

    // In-control ARL = 1 / (2 Phi(-3)) = 370.4.
    const auto big = normal_stream(2'000'000, 21);
    const auto run = shewhart_run(big, ShewhartConfig{});
    const double arl = static_cast<double>(big.size()) / static_cast<double>(run.alarm_count());
    CHECK(arl == doctest::Approx(370.4).epsilon(0.1));
}

TEST_CASE("residual chart") {
    SUBCASE("order (0,0,0) reduces to the plain chart on centred data") {
        const auto x = normal_stream(300, 31, 5, 2);
        const auto rc = residual_shewhart_run(x, {0, 0, 0}, 0, 299, 2.0);
        double m = 0;
        for (double v : x) m += v;
        m /= x.size();
        double ss = 0;
        for (double v : x) ss += (v - m) * (v - m);
        const auto plain = shewhart_run(x, ShewhartConfig{m, std::sqrt(ss / (x.size() - 1)), 2.0});
        CHECK(plain.alarm_count() > 0);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(rc.run.points[i].signal == plain.points[i].signal);
    }
    SUBCASE("AR(1) input: residual stream is white, raw stream is not") {
        ArmaModel m;
        m.p = 1;
        m.ar_coeffs = {0.8};
        m.intercept = 20;
        const auto x = simulate_arma(m, 600, 8);
        const auto rc = residual_shewhart_run(x, {1, 0, 0}, 0, 299);
        V stat;
        for (std::size_t i = 1; i < x.size(); ++i) stat.push_back(rc.run.points[i].statistic);
        CHECK(ljung_box_test(stat, 10) > 0.01);
        CHECK(ljung_box_test(x, 10) < 0.01);
        CHECK(is_missing(rc.run.points[0].upper));
        CHECK_FALSE(rc.run.points[0].signal);
        CHECK(rc.run.points[5].value == x[5]);
    }
}

TEST_CASE("predictive chart") {
    NigPrior prior{10.0, 5.0, 3.0, 4.0};
    PredictiveChart chart(prior);

    SUBCASE("HPD equals the equal-tailed t interval") {
        const auto t = chart.predictive();
        CHECK(t.dof == 6.0);
        CHECK(t.scale == doctest::Approx(std::sqrt(4.0 * 6.0 / (3.0 * 5.0))));
        const auto [lo, hi] = chart.hpd_interval(0.05);
        const double q = boost::math::quantile(boost::math::students_t(6.0), 0.975);
        CHECK(lo == doctest::Approx(10 - q * t.scale));
        CHECK(hi == doctest::Approx(10 + q * t.scale));
        // Equal density at both ends, and mass 0.95 inside.
        const boost::math::students_t dist(6.0);
        CHECK(boost::math::pdf(dist, (lo - 10) / t.scale) == doctest::Approx(boost::math::pdf(dist, (hi - 10) / t.scale)));
        CHECK(boost::math::cdf(dist, (hi - 10) / t.scale) - boost::math::cdf(dist, (lo - 10) / t.scale) ==
              doctest::Approx(0.95));
    }
    SUBCASE("conjugate update") {
        chart.update(12.0);
        const auto& p = chart.posterior();
        CHECK(p.precision_weight == 6.0);
        CHECK(p.location == doctest::Approx((5 * 10 + 12) / 6.0));
        CHECK(p.shape == 3.5);
        CHECK(p.scale == doctest::Approx(4.0 + 5.0 * 4.0 / (2 * 6.0)));
        CHECK(chart.count() == 1);
    }
    SUBCASE("width shrinks as consistent observations accumulate") {
        double prev = 1e300;
        for (int i = 0; i < 50; ++i) {
            const auto [lo, hi] = chart.hpd_interval(0.01);
            CHECK(hi - lo <= prev);
            prev = hi - lo;
            chart.update(chart.predictive().location);
        }
    }
    CHECK_THROWS_AS(PredictiveChart(NigPrior{0, 0, 1, 1}), Error);
    CHECK_THROWS_AS(prior_from_history(V{3, 3, 3}), Error);
    const auto fromh = prior_from_history(V{1, 2, 3, 4});
    CHECK(fromh.location == 2.5);
    CHECK(fromh.precision_weight == 4);
    CHECK(fromh.scale / (fromh.shape - 1) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("PCC alarm rate on streams drawn from the prior") {
    // The sequential predictive is exact under the model, so each tested point alarms with probability alpha.
    const NigPrior prior{0.0, 2.0, 3.0, 2.0};
    const double alpha = 0.05;
    std::mt19937_64 rng(2025);
    std::gamma_distribution<double> g(prior.shape, 1.0 / prior.scale);
    std::normal_distribution<double> z;
    std::size_t alarms = 0, tested = 0;
    PccConfig cfg{prior, alpha, 2, false};
    for (int s = 0; s < 5000; ++s) {
        const double var = 1.0 / g(rng);
        const double mu = prior.location + std::sqrt(var / prior.precision_weight) * z(rng);
        V x(22);
        for (auto& v : x) v = mu + std::sqrt(var) * z(rng);
        const auto run = pcc_run(x, cfg);
        alarms += run.alarm_count();
        tested += x.size() - cfg.startup;
    }
    const double rate = static_cast<double>(alarms) / static_cast<double>(tested);
    const double se = std::sqrt(alpha * (1 - alpha) / static_cast<double>(tested));
    CHECK(std::abs(rate - alpha) < 3 * se);
}

TEST_CASE("PCC run behaviour") {
    const auto hist = normal_stream(40, 3, 100, 5);
    PccConfig cfg;
    cfg.prior = prior_from_history(hist);
    cfg.alpha = 0.05;
    auto x = normal_stream(30, 4, 100, 5);
    const auto run0 = pcc_run(x, cfg);
    CHECK(is_missing(run0.points[0].upper));
    CHECK(is_missing(run0.points[1].upper));
    CHECK_FALSE(run0.points[0].signal);

    // A +5 predictive-scale step after a stable run alarms on the first shifted point.
    PredictiveChart replay(cfg.prior);
    for (std::size_t i = 0; i < 20; ++i) {
        if (i < cfg.startup || !run0.points[i].signal) replay.update(x[i]);
    }
    const auto t = replay.predictive();
    x[20] = t.location + 5 * t.scale;
    const auto run = pcc_run(x, cfg);
    CHECK(run.points[20].signal);

    // Alarmed points do not move the posterior.
    V y = {100, 101, 99, 500, 100};
    const auto a = pcc_run(y, cfg);
    CHECK(a.points[3].signal);
    V z2 = {100, 101, 99, 100};
    const auto b = pcc_run(z2, cfg);
    CHECK(a.points[4].lower == b.points[3].lower);
}

TEST_CASE("alpha calibration") {
    CusumConfig c;
    CHECK(calibrate_pcc_alpha(c) == doctest::Approx(1.0 / 564).epsilon(0.002));
    CHECK(alpha_for_arl(370) == doctest::Approx(0.0027).epsilon(0.01));
    CHECK_THROWS_AS(alpha_for_arl(std::numeric_limits<double>::infinity()), Error);
    CHECK_THROWS_AS(alpha_for_arl(1.0), Error);
}

TEST_CASE("chart CSV round trip") {
    const auto run = cusum_run(normal_stream(100, 9, 0.5), CusumConfig{}, Date{2023, 6, 1});
    std::stringstream buf;
    write_chart_csv(buf, run);
    const auto back = read_chart_csv(buf, "cusum");
    CHECK(back == run);

    PccConfig cfg;
    cfg.prior = prior_from_history(normal_stream(20, 1));
    const auto pr = pcc_run(normal_stream(50, 2), cfg, Date{2024, 2, 27});
    std::stringstream b2;
    write_chart_csv(b2, pr);
    CHECK(read_chart_csv(b2, "pcc") == pr);
}
