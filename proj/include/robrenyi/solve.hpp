#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>

namespace robrenyi::solve {

struct RootResult {
    double x = 0.0;
    double g = 0.0;   // residual at x
    int iterations = 0;
    bool converged = false;
};

// Newton iteration with bisection fallback inside a bracket [lo, hi] known to
// contain a sign change of g. Steps that leave the bracket or fail to shrink
// it fast enough fall back to bisection.
RootResult safeguarded_newton(
    const std::function<std::pair<double, double>(double)>& g_and_dg, double lo,
    double hi, double x0, double x_tol, double g_tol, int max_iter = 100);

// Brent's method (inverse quadratic / secant / bisection) for a plain root.
RootResult brent_root(const std::function<double(double)>& g, double lo,
                      double hi, double x_tol, int max_iter = 200);

// Expands an interval around x0 until g changes sign, staying inside
// [limit_lo, limit_hi]. Non-finite g values truncate the expansion on that
// side. Returns the bracket, or nothing if no sign change was found.
std::optional<std::pair<double, double>> bracket_root(
    const std::function<double(double)>& g, double x0, double limit_lo,
    double limit_hi, double initial_step, int max_expansions = 60);

struct MinimizeResult {
    double x = 0.0;
    double f = 0.0;
    int iterations = 0;
};

// Golden-section minimization on [a, b]; tolerance is on x.
MinimizeResult golden_section_minimize(const std::function<double(double)>& f,
                                       double a, double b, double x_tol,
                                       int max_iter = 200);

} // namespace robrenyi::solve
