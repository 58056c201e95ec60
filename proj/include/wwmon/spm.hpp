#pragma once

#include "wwmon/arma.hpp"
#include "wwmon/date.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wwmon {

struct ChartPoint {
    double value = 0.0;
    double statistic = 0.0;
    double lower = 0.0;  // NaN when the chart has no lower limit
    double upper = 0.0;  // NaN when the point was not tested
    bool signal = false;

    bool operator==(const ChartPoint& o) const;
};

/// Sequential chart decisions, one per input day.
struct ChartRun {
    std::string chart;
    Date start_date;
    std::vector<ChartPoint> points;
    std::optional<std::size_t> first_alarm_index;

    [[nodiscard]] Date date_at(std::size_t i) const { return start_date + static_cast<std::int64_t>(i); }
    [[nodiscard]] std::size_t alarm_count() const;

    bool operator==(const ChartRun&) const = default;
};

void write_chart_csv(std::ostream& out, const ChartRun& run);
ChartRun read_chart_csv(std::istream& in, std::string chart = {});

// ---------------------------------------------------------------- CUSUM

struct CusumConfig {
    double mu0 = 0.0;
    double sigma = 1.0;
    double k = 0.5;  // reference value K = k sigma
    double h = 4.5;  // decision interval H = h sigma
    bool reset_on_signal = false;
    /// Alarm on C >= H instead of C > H.
    bool inclusive = false;
};

/// One-sided upper CUSUM, C_i = max(0, x_i - (mu0 + K) + C_{i-1}), C_0 = 0.
class CusumChart {
public:
    explicit CusumChart(const CusumConfig& cfg);

    /// Feeds one observation; returns true when it signals.
    bool update(double x);
    [[nodiscard]] double statistic() const { return c_; }
    [[nodiscard]] double limit() const { return limit_; }

private:
    CusumConfig cfg_;
    double ref_;
    double limit_;
    double c_ = 0.0;
};

ChartRun cusum_run(std::span<const double> x, const CusumConfig& cfg, Date start = {});

/// Siegmund's approximation to the one-sided CUSUM ARL for a mean shift of
/// `delta` standard deviations: (exp(-2 D b) + 2 D b - 1) / (2 D^2) with
/// D = delta - k and b = h + 1.166; b^2 at D = 0.
double siegmund_arl(double k, double h, double delta);

struct RunLengthEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t runs = 0;
    std::size_t censored = 0;
};

/// Monte Carlo ARL of the CUSUM on iid N(mu0 + delta sigma, sigma^2) data.
/// Run r uses its own stream seeded by (seed, r); runs stop at `cap`.
RunLengthEstimate monte_carlo_cusum_arl(const CusumConfig& cfg, double delta, std::size_t runs,
                                        std::size_t cap, std::uint64_t seed);

// ---------------------------------------------------------------- Shewhart

struct ShewhartConfig {
    double mu = 0.0;
    double sigma = 1.0;
    double L = 3.0;
};

ChartRun shewhart_run(std::span<const double> x, const ShewhartConfig& cfg, Date start = {});

struct ResidualChart {
    ChartRun run;
    ArmaModel model;
};

/// Fits the ARIMA on x[phase1_first..phase1_last] (indices, inclusive), then
/// charts the one-step residuals of the whole series with mu = 0 and
/// sigma = innovation sd. Burn-in residuals are reported but never signal.
ResidualChart residual_shewhart_run(std::span<const double> x, ArmaOrder order, std::size_t phase1_first,
                                    std::size_t phase1_last, double L = 3.0, Date start = {});

// ---------------------------------------------------------------- predictive chart

/// Normal-Inverse-Gamma prior: mu | s2 ~ N(location, s2 / precision_weight), s2 ~ IG(shape, scale).
struct NigPrior {
    double location = 0.0;
    double precision_weight = 1.0;
    double shape = 2.0;
    double scale = 1.0;
};

/// Moment-matched prior from an in-control history: location = mean, prior mean
/// of s2 = sample variance, precision_weight defaults to the history length.
NigPrior prior_from_history(std::span<const double> history, double shape = 2.0,
                            double precision_weight = 0.0);

struct PccConfig {
    NigPrior prior;
    double alpha = 0.05;
    /// Observations absorbed before the first point is tested.
    std::size_t startup = 2;
    /// Alarmed points do not update the posterior.
    bool exclude_alarms = true;
};

struct StudentT {
    double location = 0.0;
    double scale = 1.0;
    double dof = 1.0;
};

/// Conjugate sequential updating with a Student-t posterior predictive.
class PredictiveChart {
public:
    explicit PredictiveChart(const NigPrior& prior);

    [[nodiscard]] StudentT predictive() const;
    /// Highest predictive density interval at level 1 - alpha. For the
    /// symmetric t this is the equal-tailed interval.
    [[nodiscard]] std::pair<double, double> hpd_interval(double alpha) const;
    void update(double x);
    [[nodiscard]] const NigPrior& posterior() const { return post_; }
    [[nodiscard]] std::size_t count() const { return n_; }

private:
    NigPrior post_;
    std::size_t n_ = 0;
};

ChartRun pcc_run(std::span<const double> x, const PccConfig& cfg, Date start = {});

/// Per-point false-alarm rate whose geometric ARL equals the CUSUM's in-control ARL.
double calibrate_pcc_alpha(const CusumConfig& cusum);

/// 1 / arl0; rejects non-finite or values <= 1.
double alpha_for_arl(double arl0);

}  // namespace wwmon
