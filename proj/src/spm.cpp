#include "wwmon/spm.hpp"

#include "wwmon/error.hpp"
#include "wwmon/ingest.hpp"
#include "wwmon/series.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <istream>
#include <ostream>
#include <random>

namespace wwmon {

namespace {

void check_finite(std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) throw Error("spm", "non-finite input value at index " + std::to_string(i));
    }
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

void mark_first_alarm(ChartRun& run) {
    for (std::size_t i = 0; i < run.points.size(); ++i) {
        if (run.points[i].signal) {
            run.first_alarm_index = i;
            return;
        }
    }
}

}  // namespace

bool ChartPoint::operator==(const ChartPoint& o) const {
    return same(value, o.value) && same(statistic, o.statistic) && same(lower, o.lower) &&
           same(upper, o.upper) && signal == o.signal;
}

std::size_t ChartRun::alarm_count() const {
    std::size_t n = 0;
    for (const auto& p : points) n += p.signal ? 1 : 0;
    return n;
}

void write_chart_csv(std::ostream& out, const ChartRun& run) {
    out << "date,value,statistic,lower,upper,signal\n";
    for (std::size_t i = 0; i < run.points.size(); ++i) {
        const auto& p = run.points[i];
        out << run.date_at(i).iso() << ',' << csv::format_double(p.value) << ','
            << csv::format_double(p.statistic) << ',' << csv::format_double(p.lower) << ','
            << csv::format_double(p.upper) << ',' << (p.signal ? 1 : 0) << '\n';
    }
}

ChartRun read_chart_csv(std::istream& in, std::string chart) {
    ChartRun run;
    run.chart = std::move(chart);
    std::string line;
    if (!std::getline(in, line)) throw Error("spm", "chart file is empty");
    auto num = [](const std::string& s) {
        if (s == "NA") return kMissing;
        auto v = csv::parse_double(s);
        if (!v) throw Error("spm", "unparseable number '" + s + "'");
        return *v;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = csv::split_line(line, ',');
        if (cells.size() != 6) throw Error("spm", "chart rows need 6 cells");
        auto d = Date::parse(cells[0]);
        if (!d) throw Error("spm", "unparseable date '" + cells[0] + "'");
        if (run.points.empty()) run.start_date = *d;
        run.points.push_back({num(cells[1]), num(cells[2]), num(cells[3]), num(cells[4]), cells[5] == "1"});
    }
    mark_first_alarm(run);
    return run;
}

// ---------------------------------------------------------------- CUSUM

CusumChart::CusumChart(const CusumConfig& cfg) : cfg_(cfg) {
    if (!(cfg.sigma > 0.0) || !(cfg.k > 0.0) || !(cfg.h > 0.0)) {
        throw Error("spm", "CUSUM needs sigma, k and h > 0");
    }
    ref_ = cfg.mu0 + cfg.k * cfg.sigma;
    limit_ = cfg.h * cfg.sigma;
}

bool CusumChart::update(double x) {
    c_ = std::max(0.0, x - ref_ + c_);
    const bool signal = cfg_.inclusive ? c_ >= limit_ : c_ > limit_;
    return signal;
}

ChartRun cusum_run(std::span<const double> x, const CusumConfig& cfg, Date start) {
    check_finite(x);
    CusumChart chart(cfg);
    ChartRun run{"cusum", start, {}, std::nullopt};
    run.points.reserve(x.size());
    for (double v : x) {
        const bool signal = chart.update(v);
        run.points.push_back({v, chart.statistic(), kMissing, chart.limit(), signal});
        if (signal && cfg.reset_on_signal) chart = CusumChart(cfg);
    }
    mark_first_alarm(run);
    return run;
}

double siegmund_arl(double k, double h, double delta) {
    if (!(k > 0.0) || !(h > 0.0)) throw Error("spm", "Siegmund ARL needs k, h > 0");
    const double b = h + 1.166;
    const double D = delta - k;
    const double u = -2.0 * D * b;
    if (std::abs(u) < 1e-4) {
        // (e^u - 1 - u) / (2 D^2) = b^2 (1 + u/3 + u^2/12 + u^3/60 + ...)
        return b * b * (1.0 + u / 3.0 + u * u / 12.0 + u * u * u / 60.0);
    }
    return (std::expm1(u) - u) / (2.0 * D * D);
}

RunLengthEstimate monte_carlo_cusum_arl(const CusumConfig& cfg, double delta, std::size_t runs,
                                        std::size_t cap, std::uint64_t seed) {
    if (runs < 2) throw Error("spm", "need at least 2 Monte Carlo runs");
    const double shifted = cfg.mu0 + delta * cfg.sigma;
    double sum = 0.0;
    double sum2 = 0.0;
    RunLengthEstimate est;
    est.runs = runs;
    for (std::size_t r = 0; r < runs; ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal(shifted, cfg.sigma);
        CusumChart chart(cfg);
        std::size_t len = 0;
        bool signalled = false;
        while (len < cap) {
            ++len;
            if (chart.update(normal(rng))) {
                signalled = true;
                break;
            }
        }
        if (!signalled) ++est.censored;
        const auto l = static_cast<double>(len);
        sum += l;
        sum2 += l * l;
    }
    const auto n = static_cast<double>(runs);
    est.mean = sum / n;
    est.standard_error = std::sqrt((sum2 / n - est.mean * est.mean) / (n - 1.0));
    return est;
}

// ---------------------------------------------------------------- Shewhart

ChartRun shewhart_run(std::span<const double> x, const ShewhartConfig& cfg, Date start) {
    if (!(cfg.sigma > 0.0) || !(cfg.L > 0.0)) throw Error("spm", "Shewhart chart needs sigma, L > 0");
    check_finite(x);
    const double half = cfg.L * cfg.sigma;
    ChartRun run{"shewhart", start, {}, std::nullopt};
    run.points.reserve(x.size());
    for (double v : x) {
        run.points.push_back({v, v, cfg.mu - half, cfg.mu + half, std::abs(v - cfg.mu) > half});
    }
    mark_first_alarm(run);
    return run;
}

ResidualChart residual_shewhart_run(std::span<const double> x, ArmaOrder order, std::size_t phase1_first,
                                    std::size_t phase1_last, double L, Date start) {
    check_finite(x);
    if (phase1_last < phase1_first || phase1_last >= x.size()) {
        throw Error("spm", "phase-1 span lies outside the series");
    }
    ResidualChart out;
    out.model = fit_arma_css(x.subspan(phase1_first, phase1_last - phase1_first + 1), order.p, order.d, order.q);
    const auto res = arma_residuals(out.model, x);
    const ShewhartConfig cfg{0.0, out.model.innovation_sd, L};
    out.run = shewhart_run(res.values, cfg, start);
    out.run.chart = "residual_shewhart";
    for (std::size_t i = 0; i < res.burn_in; ++i) {
        auto& p = out.run.points[i];
        p.value = x[i];
        p.signal = false;
        p.lower = kMissing;
        p.upper = kMissing;
    }
    for (std::size_t i = res.burn_in; i < x.size(); ++i) out.run.points[i].value = x[i];
    out.run.first_alarm_index.reset();
    mark_first_alarm(out.run);
    return out;
}

// ---------------------------------------------------------------- predictive chart

NigPrior prior_from_history(std::span<const double> history, double shape, double precision_weight) {
    if (history.size() < 2) throw Error("spm", "prior determination needs at least 2 historical values");
    check_finite(history);
    if (!(shape > 1.0)) throw Error("spm", "prior shape must exceed 1 for a finite prior variance mean");
    const double sd = stats::sample_sd(history);
    NigPrior p;
    p.location = stats::mean(history);
    p.shape = shape;
    // E[s2] = scale / (shape - 1) matches the sample variance.
    p.scale = sd * sd * (shape - 1.0);
    p.precision_weight = precision_weight > 0.0 ? precision_weight : static_cast<double>(history.size());
    if (!(p.scale > 0.0)) throw Error("spm", "degenerate posterior: historical data have zero variance");
    return p;
}

PredictiveChart::PredictiveChart(const NigPrior& prior) : post_(prior) {
    if (!(prior.precision_weight > 0.0) || !(prior.shape > 0.0) || !(prior.scale > 0.0) ||
        !std::isfinite(prior.location)) {
        throw Error("spm", "degenerate posterior: prior needs precision_weight, shape and scale > 0");
    }
}

StudentT PredictiveChart::predictive() const {
    const auto& p = post_;
    return {p.location, std::sqrt(p.scale * (p.precision_weight + 1.0) / (p.shape * p.precision_weight)),
            2.0 * p.shape};
}

std::pair<double, double> PredictiveChart::hpd_interval(double alpha) const {
    const StudentT t = predictive();
    const boost::math::students_t dist(t.dof);
    const double q = boost::math::quantile(boost::math::complement(dist, alpha / 2.0));
    return {t.location - q * t.scale, t.location + q * t.scale};
}

void PredictiveChart::update(double x) {
    auto& p = post_;
    const double kappa = p.precision_weight + 1.0;
    const double dev = x - p.location;
    p.scale += 0.5 * p.precision_weight * dev * dev / kappa;
    p.location += dev / kappa;
    p.precision_weight = kappa;
    p.shape += 0.5;
    ++n_;
}

ChartRun pcc_run(std::span<const double> x, const PccConfig& cfg, Date start) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw Error("spm", "alpha must lie in (0, 1)");
    check_finite(x);
    PredictiveChart chart(cfg.prior);
    ChartRun run{"pcc", start, {}, std::nullopt};
    run.points.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = x[i];
        if (i < cfg.startup) {
            run.points.push_back({v, v, kMissing, kMissing, false});
            chart.update(v);
            continue;
        }
        const auto [lo, hi] = chart.hpd_interval(cfg.alpha);
        const bool signal = v < lo || v > hi;
        run.points.push_back({v, v, lo, hi, signal});
        if (!signal || !cfg.exclude_alarms) chart.update(v);
    }
    mark_first_alarm(run);
    return run;
}

double calibrate_pcc_alpha(const CusumConfig& cusum) { return alpha_for_arl(siegmund_arl(cusum.k, cusum.h, 0.0)); }

double alpha_for_arl(double arl0) {
    if (!std::isfinite(arl0) || !(arl0 > 1.0)) throw Error("spm", "in-control ARL must be finite and > 1");
    return 1.0 / arl0;
}

}  // namespace wwmon
