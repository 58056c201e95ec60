#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "wwmon/arma.hpp"
#include "wwmon/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <random>

#ifdef WWMON_HAVE_EIGEN
#include <Eigen/Eigenvalues>
#endif

using namespace wwmon;
using V = std::vector<double>;

namespace {

ArmaModel ar1(double phi, double mu = 0, double sd = 1) {
    ArmaModel m;
    m.p = 1;
    m.ar_coeffs = {phi};
    m.intercept = mu;
    m.innovation_sd = sd;
    return m;
}

double lag1(const V& x) {
    const double m = oracle::mean(x);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        den += (x[i] - m) * (x[i] - m);
        if (i) num += (x[i] - m) * (x[i - 1] - m);
    }
    return num / den;
}

#ifdef WWMON_HAVE_EIGEN
// Roots of 1 - sum c_i z^i outside the unit circle <=> companion eigenvalues inside.
bool companion_stationary(const V& c) {
    const auto p = static_cast<Eigen::Index>(c.size());
    if (p == 0) return true;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) m(0, j) = c[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < p; ++i) m(i, i - 1) = 1;
    return m.eigenvalues().cwiseAbs().maxCoeff() < 1.0;
}
#endif

}  // namespace

TEST_CASE("stationarity and invertibility checks") {
    CHECK(is_stationary(V{0.5}));
    CHECK_FALSE(is_stationary(V{1.0}));
    CHECK_FALSE(is_stationary(V{-1.2}));
    CHECK(is_stationary(V{1.2, -0.5}));
    CHECK_FALSE(is_stationary(V{0.6, 0.5}));
    CHECK(is_invertible(V{0.4, 0.2}));
    CHECK_FALSE(is_invertible(V{1.5}));
#ifdef WWMON_HAVE_EIGEN
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int rep = 0; rep < 2000; ++rep) {
        V c(1 + rep % 4);
        for (auto& v : c) v = u(rng);
        CHECK(is_stationary(c) == companion_stationary(c));
        V neg;
        for (double v : c) neg.push_back(-v);
        CHECK(is_invertible(neg) == companion_stationary(c));
    }
#endif
}

TEST_CASE("differencing") {
    CHECK(difference(V{1, 4, 9, 16}, 1) == V{3, 5, 7});
    CHECK(difference(V{1, 4, 9, 16}, 2) == V{2, 2});
    CHECK(difference(V{1, 2}, 0) == V{1, 2});
}

TEST_CASE("AR(1) recovery") {
    const auto y = simulate_arma(ar1(0.6), 2000, 42);
    const auto m = fit_arma_css(y, 1, 0, 0);
    CHECK(m.ar_coeffs[0] == doctest::Approx(0.6).epsilon(0.05 / 0.6));
    CHECK(std::abs(m.ar_coeffs[0] - 0.6) < 0.05);
    CHECK(m.innovation_sd == doctest::Approx(1.0).epsilon(0.05));

    const auto wn = simulate_arma(ar1(0.0), 2000, 43);
    CHECK(std::abs(fit_arma_css(wn, 1, 0, 0).ar_coeffs[0]) < 0.05);
}

TEST_CASE("degenerate and invalid fits") {
    const auto y = simulate_arma(ar1(0.3, 5.0), 200, 7);
    const auto m = fit_arma_css(y, 0, 0, 0);
    CHECK(m.intercept == doctest::Approx(oracle::mean(y)).epsilon(1e-14));
    const auto r = arma_residuals(m, y);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(r.values[i] == doctest::Approx(y[i] - oracle::mean(y)));
    CHECK_THROWS_AS(fit_arma_css(V(200, 3.0), 1, 0, 0), Error);
    CHECK_THROWS_AS(fit_arma_css(V(y.begin(), y.begin() + 20), 1, 0, 1), Error);
}

TEST_CASE("ARMA(1,1) fit and residual whiteness") {
    ArmaModel truth;
    truth.p = 1;
    truth.q = 1;
    truth.ar_coeffs = {0.7};
    truth.ma_coeffs = {0.4};
    truth.intercept = 10;
    const auto y = simulate_arma(truth, 1500, 99);
    const auto m = fit_arma_css(y, 1, 0, 1);
    CHECK(std::abs(m.ar_coeffs[0] - 0.7) < 0.06);
    CHECK(std::abs(m.ma_coeffs[0] - 0.4) < 0.08);
    CHECK(m.intercept == doctest::Approx(10).epsilon(0.05));

    const auto r = arma_residuals(m, y);
    CHECK(r.burn_in == 1);
    V tail(r.values.begin() + static_cast<std::ptrdiff_t>(r.burn_in), r.values.end());
    const double sd = std::sqrt(m.css / static_cast<double>(tail.size()));
    CHECK(std::abs(oracle::mean(tail)) < 2 * sd / std::sqrt(static_cast<double>(tail.size())));
    CHECK(ljung_box_test(tail, 10) > 0.01);

    // The fitted objective is no worse than the one at the true parameters.
    const V w(y.begin(), y.end());
    CHECK(m.css <= css_objective(w, 10, truth.ar_coeffs, truth.ma_coeffs) + 1e-9);
}

TEST_CASE("CSS optimum beats the truth across seeds") {
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto y = simulate_arma(ar1(0.5, 2.0), 300, seed);
        const auto m = fit_arma_css(y, 1, 0, 0);
        wins += m.css <= css_objective(y, 2.0, V{0.5}, V{}) + 1e-9;
    }
    CHECK(wins == 10);
}

TEST_CASE("integrated model: (p,1,q) equals (p,0,q) on the differences") {
    ArmaModel m = ar1(0.5, 0.3);
    m.d = 1;
    const auto y = simulate_arma(m, 800, 5);
    const auto a = fit_arma_css(y, 1, 1, 0);
    const auto b = fit_arma_css(difference(y, 1), 1, 0, 0);
    CHECK(a.ar_coeffs[0] == doctest::Approx(b.ar_coeffs[0]).epsilon(1e-6));
    CHECK(a.intercept == doctest::Approx(b.intercept).epsilon(1e-6));
    const auto r = arma_residuals(a, y);
    CHECK(r.burn_in == 2);
}

TEST_CASE("Ljung-Box") {
    const auto strong = simulate_arma(ar1(0.9), 500, 3);
    CHECK(ljung_box_test(strong, 10) < 0.001);

    // Independent Q statistic from the formula.
    const auto x = simulate_arma(ar1(0.0), 300, 4);
    const double m = oracle::mean(x);
    double c0 = 0;
    for (double v : x) c0 += (v - m) * (v - m);
    double q = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t k = 1; k <= 8; ++k) {
        double ck = 0;
        for (std::size_t t = k; t < x.size(); ++t) ck += (x[t] - m) * (x[t - k] - m);
        const double r = ck / c0;
        q += r * r / (n - static_cast<double>(k));
    }
    q *= n * (n + 2);
    const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(8), q));
    CHECK(ljung_box_test(x, 8) == doctest::Approx(p).epsilon(1e-12));

    CHECK_THROWS_AS(ljung_box_test(x, 150), Error);
    CHECK_THROWS_AS(ljung_box_test(V(50, 1.0), 5), Error);

    // p-values on white noise look uniform (Kolmogorov-Smirnov at 1 %).
    std::vector<double> ps;
    for (std::uint64_t s = 0; s < 300; ++s) ps.push_back(ljung_box_test(simulate_arma(ar1(0.0), 500, 1000 + s), 10));
    std::sort(ps.begin(), ps.end());
    double d = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double n_ = static_cast<double>(ps.size());
        d = std::max({d, std::abs(ps[i] - i / n_), std::abs(ps[i] - (i + 1) / n_)});
    }
    CHECK(d < 1.63 / std::sqrt(300.0));
}

TEST_CASE("simulation") {
    const auto a = simulate_arma(ar1(0.5), 5000, 11);
    CHECK(std::abs(lag1(a) - 0.5) < 0.05);
    CHECK(simulate_arma(ar1(0.5), 100, 11) == simulate_arma(ar1(0.5), 100, 11));
    const auto wn = simulate_arma(ar1(0.0, 0.0, 2.5), 20000, 12);
    double s = 0;
    for (double v : wn) s += v * v;
    CHECK(std::sqrt(s / wn.size()) == doctest::Approx(2.5).epsilon(0.03));
    CHECK_THROWS_AS(simulate_arma(ar1(1.01), 10, 1), Error);
}
