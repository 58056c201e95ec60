#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wwmon {

struct ArmaOrder {
    int p = 0;
    int d = 0;
    int q = 0;
};

/// ARIMA(p, d, q) in mean-deviation form on the d-times differenced series w:
///   w_t - mu = sum_i ar_i (w_{t-i} - mu) + e_t + sum_j ma_j e_{t-j}
struct ArmaModel {
    int p = 0;
    int d = 0;
    int q = 0;
    std::vector<double> ar_coeffs;
    std::vector<double> ma_coeffs;
    double intercept = 0.0;  // mu of the differenced series
    double innovation_sd = 1.0;
    double css = 0.0;  // conditional sum of squares at the estimate

    [[nodiscard]] ArmaOrder order() const { return {p, d, q}; }
};

/// True when 1 - sum_i c_i z^i has all roots outside the unit circle.
/// Uses the step-down (reverse Levinson) recursion on the reflection coefficients.
bool is_stationary(std::span<const double> ar_coeffs);

/// True when 1 + sum_j c_j z^j has all roots outside the unit circle.
bool is_invertible(std::span<const double> ma_coeffs);

std::vector<double> difference(std::span<const double> y, int d);

/// Conditional sum of squares of the one-step errors; pre-sample errors are 0 and
/// the first p differenced values are conditioned on.
double css_objective(std::span<const double> w, double mu, std::span<const double> ar,
                     std::span<const double> ma);

/// Minimises the CSS with a restarted simplex search from Yule-Walker starting values.
ArmaModel fit_arma_css(std::span<const double> y, int p, int d, int q);

struct ArmaResiduals {
    /// Same length as the input; burn-in entries hold 0.
    std::vector<double> values;
    std::size_t burn_in = 0;
};

/// One-step-ahead residuals of `y` under `model`. burn_in = d + max(p, q).
ArmaResiduals arma_residuals(const ArmaModel& model, std::span<const double> y);

/// Ljung-Box portmanteau p-value against chi-square with `lags` degrees of freedom.
double ljung_box_test(std::span<const double> x, std::size_t lags);

/// Gaussian simulation of the model; d > 0 integrates from zero.
std::vector<double> simulate_arma(const ArmaModel& model, std::size_t n, std::uint64_t seed);

}  // namespace wwmon
