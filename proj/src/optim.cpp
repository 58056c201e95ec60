#include "wwmon/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wwmon::optim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe(double v) { return std::isnan(v) ? kInf : v; }

struct Counted {
    const Objective& f;
    std::size_t calls = 0;
    double operator()(const std::vector<double>& x) {
        ++calls;
        return safe(f(x));
    }
};

Result nelder_mead_once(Counted& f, std::vector<double> x0, const NelderMeadOptions& opt) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double h = opt.step.size() == n ? opt.step[i] : 0.1 * std::max(std::abs(x0[i]), 1.0);
        simplex[i + 1][i] += h;
    }
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    const std::size_t budget = f.calls + opt.max_evaluations;
    bool converged = false;
    while (f.calls < budget) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];
        if (std::isfinite(fv[worst]) &&
            std::abs(fv[worst] - fv[best]) <= opt.ftol * (std::abs(fv[best]) + opt.ftol)) {
            converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
        }
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
            return p;
        };

        auto xr = along(-1.0);
        const double fr = f(xr);
        if (fr < fv[best]) {
            auto xe = along(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                simplex[worst] = std::move(xe);
                fv[worst] = fe;
            } else {
                simplex[worst] = std::move(xr);
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = std::move(xr);
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        auto xc = along(outside ? -0.5 : 0.5);
        const double fc = f(xc);
        if (fc < (outside ? fr : fv[worst])) {
            simplex[worst] = std::move(xc);
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) {
                simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            }
            fv[i] = f(simplex[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    return {simplex[best], fv[best], 0, converged};
}

}  // namespace

Result nelder_mead(const Objective& objective, std::vector<double> x0, const NelderMeadOptions& opt) {
    Counted f{objective};
    if (x0.empty()) {
        const double v = f(x0);
        return {x0, v, f.calls, std::isfinite(v)};
    }
    Result r = nelder_mead_once(f, std::move(x0), opt);
    for (int k = 0; k < opt.restarts; ++k) {
        Result again = nelder_mead_once(f, r.x, opt);
        const bool improved = again.value < r.value - opt.ftol * (std::abs(r.value) + opt.ftol);
        if (again.value <= r.value) {
            again.converged = again.converged && r.converged;
            r = std::move(again);
        }
        if (!improved) break;
    }
    r.evaluations = f.calls;
    return r;
}

std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x, double rel_step) {
    std::vector<double> g(x.size());
    std::vector<double> p = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = rel_step * std::max(std::abs(x[i]), 1.0);
        p[i] = x[i] + h;
        const double up = safe(f(p));
        p[i] = x[i] - h;
        const double down = safe(f(p));
        p[i] = x[i];
        if (std::isfinite(up) && std::isfinite(down)) {
            g[i] = (up - down) / (2.0 * h);
        } else {
            // One-sided difference near the feasibility boundary.
            const double f0 = safe(f(x));
            g[i] = std::isfinite(up) ? (up - f0) / h : (f0 - down) / h;
        }
    }
    return g;
}

Result bfgs(const Objective& objective, std::vector<double> x, const BfgsOptions& opt) {
    Counted f{objective};
    const std::size_t n = x.size();
    double fx = f(x);
    if (!std::isfinite(fx)) return {x, fx, f.calls, false};

    auto grad = [&](const std::vector<double>& p) {
        Objective g = [&](const std::vector<double>& q) { return f(q); };
        return numeric_gradient(g, p, opt.fd_step);
    };
    std::vector<double> g = grad(x);
    // Inverse Hessian approximation, row-major.
    std::vector<double> H(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;

    bool converged = false;
    for (std::size_t iter = 0; iter < opt.max_iterations; ++iter) {
        const double gnorm = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
        if (gnorm <= opt.gtol * (1.0 + std::abs(fx))) {
            converged = true;
            break;
        }
        std::vector<double> dir(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) dir[i] -= H[i * n + j] * g[j];
        }
        double slope = std::inner_product(g.begin(), g.end(), dir.begin(), 0.0);
        if (slope >= 0.0) {
            // Lost descent; fall back to steepest descent.
            std::fill(H.begin(), H.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                H[i * n + i] = 1.0;
                dir[i] = -g[i];
            }
            slope = -gnorm * gnorm;
        }

        double step = 1.0;
        std::vector<double> xn(n);
        double fn = fx;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * dir[i];
            fn = f(xn);
            if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            converged = std::abs(slope) <= opt.gtol * (1.0 + std::abs(fx));
            break;
        }

        std::vector<double> gn = grad(xn);
        std::vector<double> s(n);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = xn[i] - x[i];
            y[i] = gn[i] - g[i];
        }
        const double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
        const double change = fx - fn;
        x = xn;
        g = gn;
        const double fprev = fx;
        fx = fn;
        if (sy > 1e-12) {
            std::vector<double> Hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
            }
            const double yHy = std::inner_product(y.begin(), y.end(), Hy.begin(), 0.0);
            const double rho = 1.0 / sy;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    H[i * n + j] += (1.0 + yHy * rho) * rho * s[i] * s[j] -
                                    rho * (Hy[i] * s[j] + s[i] * Hy[j]);
                }
            }
        }
        if (change <= opt.ftol * (std::abs(fprev) + opt.ftol)) {
            converged = true;
            break;
        }
    }
    return {x, fx, f.calls, converged};
}

}  // namespace wwmon::optim
