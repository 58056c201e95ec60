#include "cli.hpp"

#include "wwmon/aggregation.hpp"
#include "wwmon/arma.hpp"
#include "wwmon/count_model.hpp"
#include "wwmon/error.hpp"
#include "wwmon/excretion.hpp"
#include "wwmon/ingest.hpp"
#include "wwmon/scenario.hpp"
#include "wwmon/spm.hpp"
#include "wwmon/svg.hpp"
#include "wwmon/synth.hpp"
#include "wwmon/uncertainty.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace wwmon::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string output_dir;
    std::string config_path;
    bool plots = true;
    std::vector<std::string> artifacts;
};

struct Options {
    // data
    std::string input;
    std::vector<std::string> columns;
    std::string delimiter = ",";
    // aggregation
    std::string method = "1";
    double quantile = 0.5;
    bool normalize = false;
    // dissimilarity
    std::string measure = "corr";
    std::size_t max_lag = 0;
    std::string grid = "sampling";
    bool allow_method2 = false;
    // uncertainty
    std::string kind = "bootstrap";
    std::size_t replications = 1000;
    double alpha = 0.05;
    std::string order = "1,0,3";
    // monitoring
    std::string chart = "cusum";
    double k = 0.5;
    double h = 4.5;
    double L = 3.0;
    std::string phase1;
    double mu0 = std::nan("");
    double sigma = std::nan("");
    double pcc_alpha = 0.0;
    bool inclusive = false;
    // count model
    std::vector<int> obs_lags = {1};
    std::vector<int> mean_lags = {2, 3, 4};
    double scale = 1.0;
    // simulation
    int plants = 48;
    double noise = 0.2;
    std::vector<std::string> waves;
    bool no_waves = false;
    std::string first_day = "2023-01-02";
    std::string last_day = "2023-12-31";
    std::uint64_t seed = 1;
};

fs::path out_path(const Common& c, const std::string& name) { return fs::path(c.output_dir) / name; }

std::ofstream open_out(Common& c, const std::string& name) {
    const auto p = out_path(c, name);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cli", "cannot write " + p.string());
    c.artifacts.push_back(name);
    return f;
}

PanelDataset load_panel(const Options& o) {
    if (o.input.empty()) throw UsageError("--input is required");
    auto schema = PanelSchema::canonical();
    if (o.delimiter.size() != 1) throw UsageError("--delimiter must be one character");
    schema.delimiter = o.delimiter[0];
    for (const auto& c : o.columns) {
        const auto eq = c.find('=');
        if (eq == std::string::npos) throw UsageError("--column expects field=header, got '" + c + "'");
        schema.set_column(c.substr(0, eq), c.substr(eq + 1));
    }
    return parse_panel_csv(o.input, schema);
}

AggregationConfig aggregation_of(const Options& o) {
    AggregationConfig cfg;
    auto m = parse_aggregation_method(o.method);
    if (!m) throw UsageError("unknown aggregation method '" + o.method + "'");
    cfg.method = *m;
    cfg.quantile_level = o.quantile;
    return cfg;
}

Measure measure_of(const std::string& s) {
    auto m = parse_measure(s);
    if (!m) throw UsageError("unknown measure '" + s + "'");
    return *m;
}

ArmaOrder order_of(const std::string& s) {
    ArmaOrder ord;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> ord.p >> c1 >> ord.d >> c2 >> ord.q) || c1 != ',' || c2 != ',' || ord.p < 0 || ord.d < 0 ||
        ord.q < 0) {
        throw UsageError("--order expects p,d,q");
    }
    return ord;
}

Date date_of(const std::string& s, const char* what) {
    auto d = Date::parse(s);
    if (!d) throw UsageError(std::string(what) + ": cannot parse date '" + s + "'");
    return *d;
}

std::pair<Date, Date> span_of(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw UsageError("--phase1 expects FIRST:LAST");
    const Date a = date_of(s.substr(0, colon), "--phase1");
    const Date b = date_of(s.substr(colon + 1), "--phase1");
    if (b < a) throw UsageError("--phase1: LAST before FIRST");
    return {a, b};
}

// Contiguous block of present values; interior gaps are an error.
DailySeries present_block(const DailySeries& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && is_missing(s.values[a])) ++a;
    while (b > a && is_missing(s.values[b - 1])) --b;
    if (a == b) throw Error("cli", "curve has no values");
    for (std::size_t i = a; i < b; ++i) {
        if (is_missing(s.values[i])) throw Error("cli", "curve has a gap at " + s.date_at(i).iso());
    }
    return s.slice(s.date_at(a), s.date_at(b - 1));
}

void plot_curve(Common& c, const std::string& name, const std::string& title, const DailySeries& s,
                const std::vector<svg::Ribbon>& ribbons = {}) {
    if (!c.plots) return;
    svg::TimePlot p;
    p.title = title;
    p.y_label = "per 100,000 residents";
    p.ribbons = ribbons;
    p.lines.push_back({s});
    auto f = open_out(c, name);
    svg::write(f, p);
}

// ---------------------------------------------------------------- commands

void cmd_simulate(const Options& o, Common& c) {
    SynthConfig cfg;
    cfg.n_plants = o.plants;
    cfg.noise_sd_log = o.noise;
    cfg.seed = o.seed;
    cfg.first_day = date_of(o.first_day, "--first-day");
    cfg.last_day = date_of(o.last_day, "--last-day");
    if (o.no_waves) cfg.waves.clear();
    if (!o.waves.empty()) {
        cfg.waves.clear();
        for (const auto& w : o.waves) {
            // DATE:HEIGHT:WIDTH
            const auto a = w.find(':');
            const auto b = w.find(':', a == std::string::npos ? a : a + 1);
            if (a == std::string::npos || b == std::string::npos) throw UsageError("--wave expects DATE:HEIGHT:WIDTH");
            auto height = csv::parse_double(w.substr(a + 1, b - a - 1));
            auto width = csv::parse_double(w.substr(b + 1));
            if (!height || !width) throw UsageError("--wave expects DATE:HEIGHT:WIDTH");
            cfg.waves.push_back({date_of(w.substr(0, a), "--wave"), *height, *width});
        }
    }
    const auto ds = generate_panel(cfg);
    {
        auto f = open_out(c, "panel.csv");
        write_panel_csv(f, ds);
    }
    NationalCurve truth;
    truth.series = true_national_curve(cfg);
    truth.n_plants_per_day.assign(truth.series.size(), cfg.n_plants);
    {
        auto f = open_out(c, "truth.csv");
        write_curve_csv(f, truth);
    }
    plot_curve(c, "truth.svg", "Configured national curve", truth.series);
}

int cmd_validate(const Options& o, Common& c) {
    const auto ds = load_panel(o);
    const auto findings = validate_panel(ds);
    auto f = open_out(c, "findings.csv");
    f << "plant_id,date,message\n";
    for (const auto& fd : findings) {
        f << fd.plant_id << ',' << (fd.date ? fd.date->iso() : "") << ",\"" << fd.message << "\"\n";
    }
    std::cout << ds.plants.size() << " plants, " << ds.samples.size() << " samples, " << findings.size()
              << " findings\n";
    return findings.empty() ? 0 : 2;
}

void cmd_aggregate(const Options& o, Common& c) {
    const auto ds = load_panel(o);
    const auto agg = aggregation_of(o);
    const auto panel = build_excretors_panel(ds);
    auto curve = aggregate(panel, agg);
    if (o.normalize) curve = normalize_curve(curve);
    {
        auto f = open_out(c, "curve.csv");
        write_curve_csv(f, curve);
    }
    {
        auto f = open_out(c, "plants.csv");
        write_panel_series_csv(f, panel);
    }
    std::vector<svg::Ribbon> ribbons;
    if (agg.method == AggregationMethod::method2 && !o.normalize) {
        auto [lo, hi] = iqr_band(panel);
        NationalCurve l{lo, AggregationMethod::method2, curve.n_plants_per_day};
        NationalCurve u{hi, AggregationMethod::method2, curve.n_plants_per_day};
        l.quantile_level = 0.25;
        u.quantile_level = 0.75;
        {
            auto f = open_out(c, "iqr_lower.csv");
            write_curve_csv(f, l);
        }
        {
            auto f = open_out(c, "iqr_upper.csv");
            write_curve_csv(f, u);
        }
        ribbons.push_back({lo, hi});
    }
    plot_curve(c, "curve.svg", std::string("National curve, ") + std::string(to_string(agg.method)), curve.series,
               ribbons);
}

void cmd_scenarios(const Options& o, Common& c) {
    const auto ds = load_panel(o);
    RankOptions opt;
    opt.aggregation = aggregation_of(o);
    opt.sort_by = measure_of(o.measure);
    opt.max_lag = o.max_lag;
    std::vector<Scenario> grid;
    if (o.grid == "sampling" || o.grid == "all") {
        for (auto& s : sampling_scenario_grid()) grid.emplace_back(s);
    }
    if (o.grid == "sewer" || o.grid == "all") {
        for (auto& s : sewer_scenario_grid()) grid.emplace_back(s);
    }
    if (grid.empty()) throw UsageError("--grid must be sampling, sewer or all");
    const auto results = rank_scenarios(ds, grid, opt);

    auto f = open_out(c, "ranking.csv");
    f << "rank,scenario_id,description,l2,corr,crosscorr,compared_days,error\n";
    std::vector<svg::Bar> bars;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        f << i + 1 << ',' << r.scenario_id << ",\"" << r.description << '"';
        std::string err;
        for (Measure m : {Measure::l2, Measure::corr, Measure::crosscorr}) {
            auto it = r.dissimilarity_by_measure.find(m);
            f << ',' << (it == r.dissimilarity_by_measure.end() ? "NA" : csv::format_double(it->second));
            if (auto e = r.errors.find(m); e != r.errors.end()) {
                if (!err.empty()) err += "; ";
                err += std::string(to_string(m)) + ": " + e->second;
            }
        }
        f << ',' << r.compared_days << ",\"" << err << "\"\n";
        auto it = r.dissimilarity_by_measure.find(opt.sort_by);
        bars.push_back({r.scenario_id, it == r.dissimilarity_by_measure.end() ? std::nan("") : it->second});
    }
    if (c.plots) {
        auto s = open_out(c, "ranking.svg");
        svg::write_bars(s, "Scenario dissimilarity (" + std::string(to_string(opt.sort_by)) + ")", bars);
    }
}

void cmd_influence(const Options& o, Common& c) {
    const auto ds = load_panel(o);
    InfluenceOptions opt;
    opt.aggregation = aggregation_of(o);
    opt.measure = measure_of(o.measure);
    opt.normalize = o.normalize;
    opt.max_lag = o.max_lag;
    opt.allow_method2 = o.allow_method2;
    const auto res = wwtp_influence(ds, opt);
    auto f = open_out(c, "influence.csv");
    f << "plant_id,residents,influence,flagged,error\n";
    std::vector<svg::Bar> bars;
    for (const auto& r : res) {
        f << r.plant_id << ',' << r.residents << ',' << (r.error.empty() ? csv::format_double(r.value) : "NA") << ','
          << (r.flagged ? 1 : 0) << ",\"" << r.error << "\"\n";
        bars.push_back({r.plant_id, r.error.empty() ? r.value : std::nan("")});
    }
    if (c.plots) {
        auto s = open_out(c, "influence.svg");
        svg::write_bars(s, "Plant influence (" + std::string(to_string(opt.measure)) + ")", bars);
    }
}

void cmd_bootstrap(const Options& o, Common& c) {
    const auto ds = load_panel(o);
    PercentileInterval iv;
    DailySeries curve_series;
    if (o.kind == "pointwise") {
        const auto panel = build_excretors_panel(ds);
        iv = method2_pointwise_interval(panel, o.alpha);
        curve_series = iv.center;
    } else if (o.kind == "bootstrap") {
        BootstrapConfig cfg;
        cfg.replications = o.replications;
        cfg.alpha = o.alpha;
        cfg.seed = o.seed;
        cfg.model_order = order_of(o.order);
        auto curve = national_curve(ds, aggregation_of(o));
        curve.series = present_block(curve.series);
        iv = bootstrap_percentile_ci(curve, cfg);
        curve_series = curve.series;
    } else {
        throw UsageError("--kind must be bootstrap or pointwise");
    }
    {
        auto f = open_out(c, "interval.csv");
        write_interval_csv(f, iv);
    }
    plot_curve(c, "interval.svg", "Pointwise percentile interval", curve_series, {{iv.lower, iv.upper}});
}

void cmd_monitor(const Options& o, Common& c) {
    if (o.input.empty()) throw UsageError("--input is required");
    const auto curve = read_curve_csv(o.input);
    const DailySeries s = present_block(curve.series);

    std::size_t p1_first = 0;
    std::size_t p1_last = s.size() - 1;
    if (!o.phase1.empty()) {
        const auto [a, b] = span_of(o.phase1);
        if (a < s.start_date || s.end_date() < b) throw UsageError("--phase1 span lies outside the data");
        p1_first = static_cast<std::size_t>(a - s.start_date);
        p1_last = static_cast<std::size_t>(b - s.start_date);
    } else if (o.chart != "residual" && (std::isnan(o.mu0) || std::isnan(o.sigma))) {
        throw UsageError("--phase1 is required unless --mu0 and --sigma are given");
    }
    const std::span<const double> all(s.values);
    const auto phase1 = all.subspan(p1_first, p1_last - p1_first + 1);

    auto estimate = [&](double& mu, double& sd) {
        mu = std::isnan(o.mu0) ? stats::mean(phase1) : o.mu0;
        sd = std::isnan(o.sigma) ? stats::sample_sd(phase1) : o.sigma;
        if (!(sd > 1e-12 * std::max(1.0, std::abs(mu)))) {
            throw Error("spm", "phase-1 span has no variability; pass --sigma");
        }
    };

    ChartRun run;
    if (o.chart == "cusum") {
        CusumConfig cfg;
        estimate(cfg.mu0, cfg.sigma);
        cfg.k = o.k;
        cfg.h = o.h;
        cfg.inclusive = o.inclusive;
        run = cusum_run(all, cfg, s.start_date);
    } else if (o.chart == "shewhart") {
        ShewhartConfig cfg;
        estimate(cfg.mu, cfg.sigma);
        cfg.L = o.L;
        run = shewhart_run(all, cfg, s.start_date);
    } else if (o.chart == "residual") {
        run = residual_shewhart_run(all, order_of(o.order), p1_first, p1_last, o.L, s.start_date).run;
    } else if (o.chart == "pcc") {
        PccConfig cfg;
        cfg.prior = prior_from_history(phase1);
        CusumConfig cal;
        cal.k = o.k;
        cal.h = o.h;
        cfg.alpha = o.pcc_alpha > 0.0 ? o.pcc_alpha : calibrate_pcc_alpha(cal);
        // Prospective part only: the history already shaped the prior.
        const auto rest = all.subspan(p1_last + 1);
        if (rest.empty()) throw UsageError("--phase1 leaves no data to monitor");
        run = pcc_run(rest, cfg, s.date_at(p1_last + 1));
    } else {
        throw UsageError("--chart must be cusum, shewhart, residual or pcc");
    }
    {
        auto f = open_out(c, "chart.csv");
        write_chart_csv(f, run);
    }
    std::cout << run.chart << ": " << run.alarm_count() << " alarms";
    if (run.first_alarm_index) std::cout << ", first on " << run.date_at(*run.first_alarm_index).iso();
    std::cout << '\n';
    if (c.plots) {
        svg::TimePlot p;
        p.title = "Monitoring: " + run.chart;
        p.y_label = "value";
        svg::Points pts;
        pts.series.start_date = run.start_date;
        for (const auto& pt : run.points) {
            pts.series.values.push_back(pt.value);
            pts.flagged.push_back(pt.signal);
        }
        p.lines.push_back({pts.series, "#999999"});
        p.points.push_back(pts);
        auto f = open_out(c, "chart.svg");
        svg::write(f, p);
    }
}

void cmd_fit_count(const Options& o, Common& c) {
    if (o.input.empty()) throw UsageError("--input is required");
    const auto curve = read_curve_csv(o.input);
    const DailySeries s = present_block(curve.series);
    std::vector<std::int64_t> y;
    for (double v : s.values) y.push_back(std::llround(v * o.scale));

    IngarchSpec spec;
    spec.past_obs_lags = o.obs_lags;
    spec.past_mean_lags = o.mean_lags;
    const auto fit = fit_ingarch_qcml(y, spec);

    ordered_json j;
    j["intercept"] = fit.params.intercept;
    j["past_obs_lags"] = spec.past_obs_lags;
    j["obs_coeffs"] = fit.params.obs_coeffs;
    j["past_mean_lags"] = spec.past_mean_lags;
    j["mean_coeffs"] = fit.params.mean_coeffs;
    j["dispersion"] = std::isfinite(fit.dispersion) ? ordered_json(fit.dispersion) : ordered_json("inf");
    j["quasi_loglik"] = fit.loglik;
    j["near_poisson"] = fit.near_poisson;
    j["degenerate"] = fit.degenerate;
    j["n"] = y.size();
    j["first_date"] = s.start_date.iso();
    {
        auto f = open_out(c, "fit.json");
        f << j.dump(2) << '\n';
    }
    {
        auto f = open_out(c, "fitted.csv");
        f << "date,observed,fitted\n";
        for (std::size_t i = 0; i < y.size(); ++i) {
            f << s.date_at(i).iso() << ',' << y[i] << ',' << csv::format_double(fit.lambda_path[i]) << '\n';
        }
    }
    if (c.plots) {
        svg::TimePlot p;
        p.title = "Count model: observed and fitted";
        p.y_label = "count";
        DailySeries obs{s.start_date, {}, "observed"};
        for (auto v : y) obs.values.push_back(static_cast<double>(v));
        p.lines.push_back({obs, "#333333"});
        p.lines.push_back({DailySeries{s.start_date, fit.lambda_path, "fitted"}, "#d62728", true});
        auto f = open_out(c, "fitted.svg");
        svg::write(f, p);
    }
}

// ---------------------------------------------------------------- config file

std::map<std::string, std::string> read_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(n) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        for (auto& ch : key) {
            if (ch == '_') ch = '-';
        }
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

ordered_json echo_options(const CLI::App* sub) {
    ordered_json cfg = ordered_json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_name() == "--help" || opt->get_name() == "--config") continue;
        std::string name = opt->get_name();
        while (!name.empty() && name[0] == '-') name.erase(0, 1);
        if (opt->count() > 0) {
            const auto r = opt->reduced_results();
            if (opt->get_expected_max() > 1 || r.size() > 1) {
                cfg[name] = r;
            } else {
                cfg[name] = r.empty() ? "" : r.front();
            }
        } else {
            cfg[name] = opt->get_default_str();
        }
    }
    return cfg;
}

}  // namespace

int run_command(const std::vector<std::string>& args_in) {
    CLI::App app{"Wastewater surveillance analytics", "wwmon"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", kVersion);

    Options o;
    Common common;
    if (const char* env = std::getenv("WWMON_OUTPUT_DIR"); env && *env) {
        common.output_dir = env;
    } else {
        common.output_dir = "wwmon_out";
    }

    auto add_common = [&](CLI::App* s) {
        s->add_option("-o,--output-dir", common.output_dir, "Output directory (default $WWMON_OUTPUT_DIR)");
        s->add_option("--config", common.config_path, "Flat key=value file; command-line flags win");
        s->add_flag("--plots,!--no-plots", common.plots, "Write SVG figures");
    };
    auto add_input = [&](CLI::App* s) {
        s->add_option("-i,--input", o.input, "Input CSV");
        s->add_option("--column", o.columns, "Schema override field=header")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        s->add_option("--delimiter", o.delimiter);
    };
    auto add_method = [&](CLI::App* s) {
        s->add_option("--method", o.method, "Aggregation method: 1 (ratio of sums) or 2 (quantile)");
        s->add_option("--quantile", o.quantile, "Quantile level for method 2");
    };

    auto* sim = app.add_subcommand("simulate", "Generate a synthetic panel with known truth");
    add_common(sim);
    sim->add_option("--seed", o.seed);
    sim->add_option("--plants", o.plants);
    sim->add_option("--noise", o.noise, "Log-scale measurement noise sd");
    sim->add_option("--wave", o.waves, "Epidemic wave DATE:HEIGHT:WIDTH (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sim->add_flag("--no-waves", o.no_waves, "Baseline only");
    sim->add_option("--first-day", o.first_day);
    sim->add_option("--last-day", o.last_day);

    auto* val = app.add_subcommand("validate", "Check a panel CSV");
    add_common(val);
    add_input(val);

    auto* agg = app.add_subcommand("aggregate", "Build the national curve");
    add_common(agg);
    add_input(agg);
    add_method(agg);
    agg->add_flag("--normalize", o.normalize, "Divide by the curve maximum");

    auto* scn = app.add_subcommand("scenarios", "Rank reduced sampling scenarios");
    add_common(scn);
    add_input(scn);
    add_method(scn);
    scn->add_option("--measure", o.measure, "Sort measure: l2, corr or crosscorr");
    scn->add_option("--max-lag", o.max_lag, "Cross-correlation horizon (0 = default)");
    scn->add_option("--grid", o.grid, "sampling, sewer or all");

    auto* inf = app.add_subcommand("influence", "Leave-one-plant-out influence");
    add_common(inf);
    add_input(inf);
    add_method(inf);
    inf->add_option("--measure", o.measure);
    inf->add_option("--max-lag", o.max_lag);
    inf->add_flag("--normalize", o.normalize, "Divide by residents");
    inf->add_flag("--allow-method2", o.allow_method2);

    auto* bci = app.add_subcommand("bootstrap-ci", "Pointwise confidence intervals");
    add_common(bci);
    add_input(bci);
    add_method(bci);
    bci->add_option("--kind", o.kind, "bootstrap (model residuals) or pointwise (plant quantiles)");
    bci->add_option("--replications", o.replications);
    bci->add_option("--alpha", o.alpha);
    bci->add_option("--order", o.order, "ARIMA order p,d,q");
    bci->add_option("--seed", o.seed);

    auto* mon = app.add_subcommand("monitor", "Run a control chart on a curve CSV");
    add_common(mon);
    mon->add_option("-i,--input", o.input, "Curve CSV (date,value[,n_plants])");
    mon->add_option("--chart", o.chart, "cusum, shewhart, residual or pcc");
    mon->add_option("--k", o.k);
    mon->add_option("--h", o.h);
    mon->add_option("--L", o.L);
    mon->add_option("--phase1", o.phase1, "In-control span FIRST:LAST");
    mon->add_option("--mu0", o.mu0);
    mon->add_option("--sigma", o.sigma);
    mon->add_option("--alpha", o.pcc_alpha, "Predictive chart false-alarm rate (default: CUSUM-matched)");
    mon->add_option("--order", o.order, "ARIMA order for the residual chart");
    mon->add_flag("--inclusive", o.inclusive, "Alarm on C >= H");

    auto* fit = app.add_subcommand("fit-count-model", "Fit the negative-binomial INGARCH model");
    add_common(fit);
    fit->add_option("-i,--input", o.input, "Curve CSV");
    fit->add_option("--obs-lags", o.obs_lags)->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    fit->add_option("--mean-lags", o.mean_lags)->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    fit->add_option("--scale", o.scale, "Multiplier applied before rounding to counts");

    std::vector<std::string> args = args_in;
    try {
        // Config values are injected ahead of the user's flags so the flags win.
        const std::vector<std::string> original = args;
        for (std::size_t i = 0; i + 1 < original.size(); ++i) {
            std::string path;
            if (original[i] == "--config") path = original[i + 1];
            if (path.empty()) continue;
            CLI::App* sub = original.empty() ? nullptr : app.get_subcommand_no_throw(original[0]);
            if (!sub) throw UsageError("--config needs a subcommand first");
            std::vector<std::string> injected;
            for (const auto& [key, value] : read_flat_config(path)) {
                const CLI::Option* opt = sub->get_option_no_throw("--" + key);
                if (!opt) {
                    bool known = false;
                    for (const auto* other : app.get_subcommands({})) known |= other->get_option_no_throw("--" + key) != nullptr;
                    if (!known) throw UsageError("unknown config key '" + key + "'");
                    continue;
                }
                if (opt->get_expected_max() > 1 && opt->get_delimiter() == '\0') {
                    std::istringstream parts(value);
                    std::string part;
                    while (parts >> part) injected.push_back("--" + key + "=" + part);
                } else {
                    injected.push_back("--" + key + "=" + value);
                }
            }
            args.insert(args.begin() + 1, injected.begin(), injected.end());
            break;
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        fs::create_directories(common.output_dir);
        int status = 0;
        if (name == "simulate") cmd_simulate(o, common);
        else if (name == "validate") status = cmd_validate(o, common);
        else if (name == "aggregate") cmd_aggregate(o, common);
        else if (name == "scenarios") cmd_scenarios(o, common);
        else if (name == "influence") cmd_influence(o, common);
        else if (name == "bootstrap-ci") cmd_bootstrap(o, common);
        else if (name == "monitor") cmd_monitor(o, common);
        else if (name == "fit-count-model") cmd_fit_count(o, common);

        ordered_json m;
        m["tool"] = "wwmon";
        m["version"] = kVersion;
        m["command"] = name;
        m["seed"] = o.seed;
        m["config"] = echo_options(sub);
        m["artifacts"] = common.artifacts;
        m["status"] = status;
        std::ofstream mf(out_path(common, name + ".manifest.json"));
        mf << m.dump(2) << '\n';
        return status;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

int run_command(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_command(args);
}

}  // namespace wwmon::cli
