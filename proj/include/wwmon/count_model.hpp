#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wwmon {

/// Linear INGARCH mean: lambda_t = intercept + sum_i a_i y_{t-i} + sum_j b_j lambda_{t-j}.
struct IngarchSpec {
    std::vector<int> past_obs_lags = {1};
    std::vector<int> past_mean_lags = {1};

    [[nodiscard]] std::size_t parameter_count() const {
        return 1 + past_obs_lags.size() + past_mean_lags.size();
    }
    [[nodiscard]] int max_lag() const;
    /// Lags positive, distinct and sorted.
    void validate() const;
};

struct IngarchParams {
    double intercept = 0.0;
    std::vector<double> obs_coeffs;
    std::vector<double> mean_coeffs;

    [[nodiscard]] std::vector<double> to_vector() const;
    static IngarchParams from_vector(const IngarchSpec& spec, std::span<const double> v);
};

/// One recursion step given explicit histories; y_hist[i] = y_{t-1-i}, lambda_hist[j] = lambda_{t-1-j}.
double next_lambda(const IngarchSpec& spec, const IngarchParams& params, std::span<const double> y_hist,
                   std::span<const double> lambda_hist);

/// Conditional means over the whole series. Lags reaching before the start use mean(y).
/// Throws when any lambda_t <= 0.
std::vector<double> lambda_path(const IngarchSpec& spec, const IngarchParams& params, std::span<const std::int64_t> y);

/// Poisson quasi log-likelihood sum_t (y_t log lambda_t - lambda_t), up to a constant.
double poisson_quasi_loglik(std::span<const std::int64_t> y, std::span<const double> lambda);

struct IngarchFit {
    IngarchParams params;
    /// Negative-binomial size: Var = lambda + lambda^2 / dispersion. Infinite when the data are not overdispersed.
    double dispersion = 0.0;
    std::vector<double> lambda_path;
    double loglik = 0.0;  // Poisson quasi log-likelihood at the estimate
    double initial_loglik = 0.0;
    bool near_poisson = false;
    bool degenerate = false;
};

/// Moment-based starting values: intercept from the mean, persistence from the lag-1 autocorrelation.
IngarchParams ingarch_initial_params(const IngarchSpec& spec, std::span<const std::int64_t> y);

/// Quasi conditional maximum likelihood: regression parameters maximise the Poisson
/// quasi-likelihood; the dispersion solves the Pearson moment equation.
IngarchFit fit_ingarch_qcml(std::span<const std::int64_t> y, const IngarchSpec& spec);

/// Solves sum (y - lambda)^2 / (lambda + lambda^2 / phi) = T - n_params for phi; +inf when no root.
double pearson_dispersion(std::span<const std::int64_t> y, std::span<const double> lambda, std::size_t n_params);

/// Negative-binomial (gamma-Poisson) simulation; dispersion = +inf gives Poisson.
std::vector<std::int64_t> ingarch_simulate(const IngarchSpec& spec, const IngarchParams& params, double dispersion,
                                           std::size_t n, std::uint64_t seed);

}  // namespace wwmon
