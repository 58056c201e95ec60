#include "wwmon/count_model.hpp"

#include "wwmon/error.hpp"
#include "wwmon/optim.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace wwmon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const std::int64_t> y) {
    double s = 0.0;
    for (auto v : y) s += static_cast<double>(v);
    return s / static_cast<double>(y.size());
}

void check_counts(std::span<const std::int64_t> y) {
    if (y.empty()) throw Error("count_model", "empty count series");
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0) throw Error("count_model", "negative count at index " + std::to_string(i));
    }
}

// lambda path without throwing; false when positivity fails.
bool try_lambda_path(const IngarchSpec& spec, const IngarchParams& params, std::span<const std::int64_t> y,
                     std::vector<double>& lambda) {
    const double fill = mean_of(y);
    const std::size_t n = y.size();
    lambda.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double v = params.intercept;
        for (std::size_t i = 0; i < spec.past_obs_lags.size(); ++i) {
            const auto lag = static_cast<std::size_t>(spec.past_obs_lags[i]);
            v += params.obs_coeffs[i] * (t >= lag ? static_cast<double>(y[t - lag]) : fill);
        }
        for (std::size_t j = 0; j < spec.past_mean_lags.size(); ++j) {
            const auto lag = static_cast<std::size_t>(spec.past_mean_lags[j]);
            v += params.mean_coeffs[j] * (t >= lag ? lambda[t - lag] : fill);
        }
        if (!(v > 0.0) || !std::isfinite(v)) return false;
        lambda[t] = v;
    }
    return true;
}

}  // namespace

int IngarchSpec::max_lag() const {
    int m = 0;
    for (int l : past_obs_lags) m = std::max(m, l);
    for (int l : past_mean_lags) m = std::max(m, l);
    return m;
}

void IngarchSpec::validate() const {
    for (const auto* lags : {&past_obs_lags, &past_mean_lags}) {
        for (std::size_t i = 0; i < lags->size(); ++i) {
            if ((*lags)[i] <= 0) throw Error("count_model", "lags must be positive");
            if (i > 0 && (*lags)[i] <= (*lags)[i - 1]) throw Error("count_model", "lags must be distinct and sorted");
        }
    }
}

std::vector<double> IngarchParams::to_vector() const {
    std::vector<double> v{intercept};
    v.insert(v.end(), obs_coeffs.begin(), obs_coeffs.end());
    v.insert(v.end(), mean_coeffs.begin(), mean_coeffs.end());
    return v;
}

IngarchParams IngarchParams::from_vector(const IngarchSpec& spec, std::span<const double> v) {
    if (v.size() != spec.parameter_count()) throw Error("count_model", "parameter vector has the wrong size");
    IngarchParams p;
    p.intercept = v[0];
    const auto a = spec.past_obs_lags.size();
    p.obs_coeffs.assign(v.begin() + 1, v.begin() + 1 + static_cast<std::ptrdiff_t>(a));
    p.mean_coeffs.assign(v.begin() + 1 + static_cast<std::ptrdiff_t>(a), v.end());
    return p;
}

double next_lambda(const IngarchSpec& spec, const IngarchParams& params, std::span<const double> y_hist,
                   std::span<const double> lambda_hist) {
    double v = params.intercept;
    for (std::size_t i = 0; i < spec.past_obs_lags.size(); ++i) {
        const auto lag = static_cast<std::size_t>(spec.past_obs_lags[i]);
        if (lag > y_hist.size()) throw Error("count_model", "observation history too short");
        v += params.obs_coeffs[i] * y_hist[lag - 1];
    }
    for (std::size_t j = 0; j < spec.past_mean_lags.size(); ++j) {
        const auto lag = static_cast<std::size_t>(spec.past_mean_lags[j]);
        if (lag > lambda_hist.size()) throw Error("count_model", "mean history too short");
        v += params.mean_coeffs[j] * lambda_hist[lag - 1];
    }
    return v;
}

std::vector<double> lambda_path(const IngarchSpec& spec, const IngarchParams& params,
                                std::span<const std::int64_t> y) {
    spec.validate();
    check_counts(y);
    if (params.obs_coeffs.size() != spec.past_obs_lags.size() ||
        params.mean_coeffs.size() != spec.past_mean_lags.size()) {
        throw Error("count_model", "parameters do not match the specification");
    }
    std::vector<double> lambda;
    if (!try_lambda_path(spec, params, y, lambda)) {
        throw Error("count_model", "lambda_t <= 0: parameters outside the valid region");
    }
    return lambda;
}

double poisson_quasi_loglik(std::span<const std::int64_t> y, std::span<const double> lambda) {
    double ll = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        ll += static_cast<double>(y[t]) * std::log(lambda[t]) - lambda[t];
    }
    return ll;
}

IngarchParams ingarch_initial_params(const IngarchSpec& spec, std::span<const std::int64_t> y) {
    check_counts(y);
    const double m = mean_of(y);
    double c0 = 0.0;
    double c1 = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double d = static_cast<double>(y[t]) - m;
        c0 += d * d;
        if (t > 0) c1 += d * (static_cast<double>(y[t - 1]) - m);
    }
    const double rho = c0 > 0.0 ? std::clamp(c1 / c0, 0.0, 0.9) : 0.0;
    IngarchParams p;
    const auto na = spec.past_obs_lags.size();
    const auto nb = spec.past_mean_lags.size();
    // Persistence split: half to the observation lags, half to the mean lags.
    const double obs_share = nb == 0 ? rho : (na == 0 ? 0.0 : rho / 2.0);
    const double mean_share = rho - obs_share;
    p.obs_coeffs.assign(na, na ? obs_share / static_cast<double>(na) : 0.0);
    p.mean_coeffs.assign(nb, nb ? mean_share / static_cast<double>(nb) : 0.0);
    p.intercept = std::max(m * (1.0 - rho), 1e-3);
    return p;
}

double pearson_dispersion(std::span<const std::int64_t> y, std::span<const double> lambda, std::size_t n_params) {
    const double target = static_cast<double>(y.size()) - static_cast<double>(n_params);
    auto pearson = [&](double inv_phi) {
        double s = 0.0;
        for (std::size_t t = 0; t < y.size(); ++t) {
            const double r = static_cast<double>(y[t]) - lambda[t];
            s += r * r / (lambda[t] * (1.0 + inv_phi * lambda[t]));
        }
        return s - target;
    };
    // Decreasing in 1/phi; no overdispersion when the Poisson statistic is already below target.
    if (pearson(0.0) <= 0.0) return kInf;
    double hi = 1.0;
    while (pearson(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw Error("count_model", "dispersion equation has no finite root");
    }
    boost::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        pearson, 0.0, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    return 1.0 / (0.5 * (a + b));
}

IngarchFit fit_ingarch_qcml(std::span<const std::int64_t> y, const IngarchSpec& spec) {
    spec.validate();
    check_counts(y);
    const std::size_t k = spec.parameter_count();
    if (y.size() < 10 * k) {
        throw Error("count_model", "series length must be at least 10x the parameter count");
    }

    IngarchFit fit;
    const double m = mean_of(y);
    if (std::all_of(y.begin(), y.end(), [&](auto v) { return v == y.front(); })) {
        fit.degenerate = true;
        fit.params.intercept = m;
        fit.params.obs_coeffs.assign(spec.past_obs_lags.size(), 0.0);
        fit.params.mean_coeffs.assign(spec.past_mean_lags.size(), 0.0);
        fit.lambda_path.assign(y.size(), m);
        fit.dispersion = kInf;
        fit.near_poisson = true;
        if (m > 0.0) fit.loglik = fit.initial_loglik = poisson_quasi_loglik(y, fit.lambda_path);
        return fit;
    }

    const IngarchParams init = ingarch_initial_params(spec, y);
    std::vector<double> scratch;
    auto objective = [&](const std::vector<double>& v) {
        const auto p = IngarchParams::from_vector(spec, v);
        if (!try_lambda_path(spec, p, y, scratch)) return kInf;  // barrier on lambda > 0
        return -poisson_quasi_loglik(y, scratch);
    };
    fit.initial_loglik = -objective(init.to_vector());

    optim::BfgsOptions opt;
    opt.gtol = 1e-7;
    auto r = optim::bfgs(objective, init.to_vector(), opt);
    if (!r.converged) {
        // A simplex polish from the quasi-Newton point before giving up.
        optim::NelderMeadOptions nm;
        nm.ftol = 1e-12;
        nm.step.assign(k, 0.01);
        auto polished = optim::nelder_mead(objective, r.x, nm);
        if (polished.value <= r.value) r = polished;
        auto again = optim::bfgs(objective, r.x, opt);
        if (again.value <= r.value) r = again;
        if (!again.converged && !polished.converged) {
            throw Error("count_model", "quasi-likelihood maximisation did not converge");
        }
    }
    fit.params = IngarchParams::from_vector(spec, r.x);
    fit.lambda_path = lambda_path(spec, fit.params, y);
    fit.loglik = poisson_quasi_loglik(y, fit.lambda_path);
    fit.dispersion = pearson_dispersion(y, fit.lambda_path, k);
    const double mean_lambda =
        std::accumulate(fit.lambda_path.begin(), fit.lambda_path.end(), 0.0) / static_cast<double>(y.size());
    // Extra-Poisson variance below 5 % of the Poisson variance.
    fit.near_poisson = !std::isfinite(fit.dispersion) || mean_lambda / fit.dispersion < 0.05;
    return fit;
}

std::vector<std::int64_t> ingarch_simulate(const IngarchSpec& spec, const IngarchParams& params, double dispersion,
                                           std::size_t n, std::uint64_t seed) {
    spec.validate();
    if (!(dispersion > 0.0)) throw Error("count_model", "dispersion must be > 0");
    if (!(params.intercept > 0.0)) throw Error("count_model", "intercept must be > 0");
    double persistence = 0.0;
    for (double a : params.obs_coeffs) persistence += a;
    for (double b : params.mean_coeffs) persistence += b;
    if (!(persistence < 1.0)) throw Error("count_model", "explosive parameters: coefficient sum must be < 1");

    const double stationary_mean = params.intercept / (1.0 - persistence);
    const std::size_t burn = 500;
    const std::size_t total = burn + n;
    const auto L = static_cast<std::size_t>(spec.max_lag());
    std::vector<double> y_hist(L, stationary_mean);
    std::vector<double> lambda_hist(L, stationary_mean);
    std::mt19937_64 rng(seed);
    std::vector<std::int64_t> out;
    out.reserve(n);
    for (std::size_t t = 0; t < total; ++t) {
        const double lambda = next_lambda(spec, params, y_hist, lambda_hist);
        if (!(lambda > 0.0)) throw Error("count_model", "simulation produced lambda <= 0");
        double mean = lambda;
        if (std::isfinite(dispersion)) {
            std::gamma_distribution<double> gamma(dispersion, lambda / dispersion);
            mean = gamma(rng);
        }
        std::poisson_distribution<std::int64_t> poisson(mean);
        const std::int64_t draw = mean > 0.0 ? poisson(rng) : 0;
        if (L > 0) {
            std::rotate(y_hist.rbegin(), y_hist.rbegin() + 1, y_hist.rend());
            std::rotate(lambda_hist.rbegin(), lambda_hist.rbegin() + 1, lambda_hist.rend());
            y_hist[0] = static_cast<double>(draw);
            lambda_hist[0] = lambda;
        }
        if (t >= burn) out.push_back(draw);
    }
    return out;
}

}  // namespace wwmon
