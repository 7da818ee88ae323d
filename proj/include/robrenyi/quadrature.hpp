#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "robrenyi/errors.hpp"

namespace robrenyi::quad {

enum class Scheme { gauss_hermite, adaptive_simpson, monte_carlo_check };
enum class Domain { real_line, half_line };

struct QuadratureSpec {
    Scheme scheme = Scheme::gauss_hermite;
    int nodes = 64;
    // Half-width of the integration window, in units of the envelope scale.
    double truncation_radius = 40.0;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    // monte_carlo_check only
    int mc_draws = 200000;
    std::uint64_t mc_seed = 20240901;

    void validate() const;
};

// Nodes t_k and ln(w_k) of the n-point Gauss-Hermite rule for weight e^{-t^2},
// computed by Golub-Welsch and cached per n. Log weights keep the
// w_k * e^{t_k^2} products representable at high node counts.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> log_weights;
};
const GaussHermiteRule& gauss_hermite_rule(int n);

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, double rel_tol,
                        int max_depth = 48);

// Integral of f over the real line. The (center, scale) pair describes a
// Gaussian envelope of the integrand; Gauss-Hermite substitutes
// x = center + scale*sqrt(2)*t, so the rule is exact when f is a polynomial
// times exp(-(x-center)^2/(2*scale^2)).
double integrate_real_line(const std::function<double(double)>& f,
                           double center, double scale,
                           const QuadratureSpec& spec);

// Integral of f over [0, inf), truncated at truncation_radius * scale.
// Density powers with exponential tails have no useful Gaussian envelope, so
// the gauss_hermite scheme falls back to adaptive Simpson here.
double integrate_half_line(const std::function<double(double)>& f,
                           double scale, const QuadratureSpec& spec);

double integrate(const std::function<double(double)>& f, Domain domain,
                 double center, double scale, const QuadratureSpec& spec);

// Tensor-product Gauss-Hermite over R^p with envelope N(center, L*L^t).
// Cost grows as nodes^p; dimensions above 8 are rejected.
double integrate_gaussian_tensor(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& center, const Eigen::MatrixXd& L, int nodes_per_dim);

} // namespace robrenyi::quad
