#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace wwmon::optim {

/// Objective to minimise. Returning +inf (or NaN) marks a point as infeasible.
using Objective = std::function<double(const std::vector<double>&)>;

struct Result {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    /// Stop when the spread of simplex values falls below ftol * (|f_best| + ftol).
    double ftol = 1e-8;
    std::size_t max_evaluations = 20000;
    /// Fresh simplices started from the incumbent after convergence.
    int restarts = 2;
    /// Initial simplex edge per coordinate; empty means 0.1 * max(|x_i|, 1).
    std::vector<double> step;
};

Result nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt = {});

struct BfgsOptions {
    double gtol = 1e-6;
    double ftol = 1e-12;
    std::size_t max_iterations = 1000;
    /// Relative step for central finite differences.
    double fd_step = 1e-6;
};

/// Quasi-Newton minimisation with central finite-difference gradients and
/// backtracking line search. Infeasible trial points shrink the step.
Result bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& opt = {});

std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x, double rel_step);

}  // namespace wwmon::optim
