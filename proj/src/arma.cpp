#include "wwmon/arma.hpp"

#include "wwmon/error.hpp"
#include "wwmon/optim.hpp"
#include "wwmon/series.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace wwmon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Levinson-Durbin on sample autocovariances; returns AR(p) coefficients.
std::vector<double> yule_walker(std::span<const double> w, int p) {
    std::vector<double> phi;
    if (p == 0) return phi;
    const std::size_t n = w.size();
    const double m = stats::mean(w);
    std::vector<double> acov(static_cast<std::size_t>(p) + 1, 0.0);
    for (int k = 0; k <= p; ++k) {
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) {
            acov[static_cast<std::size_t>(k)] += (w[t] - m) * (w[t - static_cast<std::size_t>(k)] - m);
        }
        acov[static_cast<std::size_t>(k)] /= static_cast<double>(n);
    }
    phi.assign(static_cast<std::size_t>(p), 0.0);
    if (acov[0] <= 0.0) return phi;
    std::vector<double> prev;
    double err = acov[0];
    for (int k = 1; k <= p; ++k) {
        double acc = acov[static_cast<std::size_t>(k)];
        for (int j = 1; j < k; ++j) acc -= prev[static_cast<std::size_t>(j - 1)] * acov[static_cast<std::size_t>(k - j)];
        const double refl = acc / err;
        std::vector<double> cur(static_cast<std::size_t>(k));
        cur[static_cast<std::size_t>(k - 1)] = refl;
        for (int j = 1; j < k; ++j) {
            cur[static_cast<std::size_t>(j - 1)] =
                prev[static_cast<std::size_t>(j - 1)] - refl * prev[static_cast<std::size_t>(k - j - 1)];
        }
        err *= (1.0 - refl * refl);
        prev = std::move(cur);
        if (err <= 0.0) break;
    }
    prev.resize(static_cast<std::size_t>(p), 0.0);
    return prev;
}

}  // namespace

bool is_stationary(std::span<const double> ar_coeffs) {
    std::vector<double> a(ar_coeffs.begin(), ar_coeffs.end());
    while (!a.empty() && a.back() == 0.0) a.pop_back();
    for (std::size_t m = a.size(); m > 0; --m) {
        const double k = a[m - 1];
        if (!std::isfinite(k) || std::abs(k) >= 1.0) return false;
        std::vector<double> lower(m - 1);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            lower[i] = (a[i] + k * a[m - 2 - i]) / (1.0 - k * k);
        }
        a = std::move(lower);
    }
    return true;
}

bool is_invertible(std::span<const double> ma_coeffs) {
    std::vector<double> neg(ma_coeffs.size());
    std::transform(ma_coeffs.begin(), ma_coeffs.end(), neg.begin(), [](double c) { return -c; });
    return is_stationary(neg);
}

std::vector<double> difference(std::span<const double> y, int d) {
    std::vector<double> w(y.begin(), y.end());
    for (int k = 0; k < d; ++k) {
        if (w.size() < 2) throw Error("arma", "series too short to difference");
        for (std::size_t t = 0; t + 1 < w.size(); ++t) w[t] = w[t + 1] - w[t];
        w.pop_back();
    }
    return w;
}

double css_objective(std::span<const double> w, double mu, std::span<const double> ar,
                     std::span<const double> ma) {
    const std::size_t p = ar.size();
    const std::size_t q = ma.size();
    std::vector<double> e(w.size(), 0.0);
    double ss = 0.0;
    for (std::size_t t = p; t < w.size(); ++t) {
        double pred = mu;
        for (std::size_t i = 0; i < p; ++i) pred += ar[i] * (w[t - 1 - i] - mu);
        for (std::size_t j = 0; j < q && j < t; ++j) pred += ma[j] * e[t - 1 - j];
        e[t] = w[t] - pred;
        ss += e[t] * e[t];
    }
    return ss;
}

ArmaModel fit_arma_css(std::span<const double> y, int p, int d, int q) {
    if (p < 0 || d < 0 || q < 0) throw Error("arma", "orders must be non-negative");
    for (double v : y) {
        if (!std::isfinite(v)) throw Error("arma", "series contains missing or non-finite values");
    }
    const auto k = static_cast<std::size_t>(p + q + 1);
    if (y.size() <= 10 * k) {
        throw Error("arma", "series length " + std::to_string(y.size()) + " must exceed " +
                                std::to_string(10 * k) + " for this order");
    }
    const std::vector<double> w = difference(y, d);
    const double sd = stats::sample_sd(w);
    const double scale = std::max(std::abs(stats::mean(w)), 1.0);
    if (!(sd > 1e-10 * scale)) throw Error("arma", "series is (nearly) constant");

    ArmaModel m;
    m.p = p;
    m.d = d;
    m.q = q;
    const auto up = static_cast<std::size_t>(p);
    const auto uq = static_cast<std::size_t>(q);

    if (p == 0 && q == 0) {
        m.intercept = stats::mean(w);
    } else {
        std::vector<double> x0;
        x0.push_back(stats::mean(w));
        auto phi = yule_walker(w, p);
        if (!is_stationary(phi)) std::fill(phi.begin(), phi.end(), 0.0);
        x0.insert(x0.end(), phi.begin(), phi.end());
        x0.insert(x0.end(), uq, 0.0);

        auto objective = [&](const std::vector<double>& x) {
            std::span<const double> ar(x.data() + 1, up);
            std::span<const double> ma(x.data() + 1 + up, uq);
            if (!is_stationary(ar) || !is_invertible(ma)) return kInf;
            return css_objective(w, x[0], ar, ma);
        };
        optim::NelderMeadOptions opt;
        opt.ftol = 1e-8;
        opt.restarts = 4;
        opt.step.assign(x0.size(), 0.1);
        opt.step[0] = 0.1 * sd;
        const auto r = optim::nelder_mead(objective, x0, opt);
        if (!r.converged || !std::isfinite(r.value)) {
            throw Error("arma", "CSS minimisation did not converge");
        }
        m.intercept = r.x[0];
        m.ar_coeffs.assign(r.x.begin() + 1, r.x.begin() + 1 + p);
        m.ma_coeffs.assign(r.x.begin() + 1 + p, r.x.end());
    }
    m.css = css_objective(w, m.intercept, m.ar_coeffs, m.ma_coeffs);
    const double dof = static_cast<double>(w.size() - up) - static_cast<double>(k);
    m.innovation_sd = std::sqrt(m.css / dof);
    return m;
}

ArmaResiduals arma_residuals(const ArmaModel& model, std::span<const double> y) {
    const auto d = static_cast<std::size_t>(model.d);
    const std::size_t p = model.ar_coeffs.size();
    const std::size_t q = model.ma_coeffs.size();
    ArmaResiduals out;
    out.values.assign(y.size(), 0.0);
    out.burn_in = std::min(y.size(), d + std::max(p, q));
    if (y.size() <= d) return out;
    const auto w = difference(y, model.d);
    std::vector<double> e(w.size(), 0.0);
    for (std::size_t t = p; t < w.size(); ++t) {
        double pred = model.intercept;
        for (std::size_t i = 0; i < p; ++i) pred += model.ar_coeffs[i] * (w[t - 1 - i] - model.intercept);
        for (std::size_t j = 0; j < q && j < t; ++j) pred += model.ma_coeffs[j] * e[t - 1 - j];
        e[t] = w[t] - pred;
    }
    for (std::size_t t = out.burn_in; t < y.size(); ++t) out.values[t] = e[t - d];
    return out;
}

double ljung_box_test(std::span<const double> x, std::size_t lags) {
    const std::size_t n = x.size();
    if (lags == 0 || 2 * lags >= n) throw Error("arma", "Ljung-Box needs 1 <= lags < n/2");
    const double m = stats::mean(x);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);
    if (!(c0 > 0.0)) throw Error("arma", "Ljung-Box undefined for a constant series");
    double q = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) {
        double ck = 0.0;
        for (std::size_t t = k; t < n; ++t) ck += (x[t] - m) * (x[t - k] - m);
        const double rho = ck / c0;
        q += rho * rho / static_cast<double>(n - k);
    }
    q *= static_cast<double>(n) * static_cast<double>(n + 2);
    const boost::math::chi_squared chi(static_cast<double>(lags));
    return boost::math::cdf(boost::math::complement(chi, q));
}

std::vector<double> simulate_arma(const ArmaModel& model, std::size_t n, std::uint64_t seed) {
    if (!is_stationary(model.ar_coeffs)) throw Error("arma", "AR coefficients are not stationary");
    if (!(model.innovation_sd >= 0.0)) throw Error("arma", "innovation_sd must be non-negative");
    const std::size_t p = model.ar_coeffs.size();
    const std::size_t q = model.ma_coeffs.size();
    const std::size_t burn = 200 + 10 * (p + q);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> w(burn + n, model.intercept);
    std::vector<double> e(burn + n, 0.0);
    for (std::size_t t = 0; t < w.size(); ++t) {
        e[t] = model.innovation_sd * normal(rng);
        double v = model.intercept + e[t];
        for (std::size_t i = 0; i < p && i < t; ++i) v += model.ar_coeffs[i] * (w[t - 1 - i] - model.intercept);
        for (std::size_t j = 0; j < q && j < t; ++j) v += model.ma_coeffs[j] * e[t - 1 - j];
        w[t] = v;
    }
    std::vector<double> out(w.begin() + static_cast<std::ptrdiff_t>(burn), w.end());
    for (int k = 0; k < model.d; ++k) {
        double level = 0.0;
        for (double& v : out) {
            level += v;
            v = level;
        }
    }
    return out;
}

}  // namespace wwmon
