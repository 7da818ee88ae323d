#include "robrenyi/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "robrenyi/rng.hpp"

namespace robrenyi::quad {

void QuadratureSpec::validate() const {
    if (scheme == Scheme::gauss_hermite && nodes < 16)
        throw std::invalid_argument("gauss-hermite needs at least 16 nodes");
    if (nodes < 1) throw std::invalid_argument("nodes must be positive");
    if (abs_tol <= 0.0) throw std::invalid_argument("abs_tol must be > 0");
    if (truncation_radius <= 0.0)
        throw std::invalid_argument("truncation_radius must be > 0");
}

const GaussHermiteRule& gauss_hermite_rule(int n) {
    if (n < 2 || n > 512) throw std::invalid_argument("gauss-hermite node count out of range");
    static std::mutex mutex;
    static std::map<int, GaussHermiteRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    // Golub-Welsch: eigen-decompose the Jacobi matrix of the Hermite
    // recurrence; nodes are the eigenvalues, weights come from the first
    // eigenvector components.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(0.5 * k);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.log_weights.resize(n);
    const double log_sqrt_pi = 0.5 * std::log(M_PI);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = solver.eigenvalues()(k);
        const double v0 = solver.eigenvectors()(0, k);
        rule.log_weights[k] = log_sqrt_pi + 2.0 * std::log(std::abs(v0));
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a,
                     double fa, double b, double fb, double m, double fm,
                     double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, double rel_tol,
                        int max_depth) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(f, a, fa, b, fb, m, fm);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
    const double value =
        adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
    if (!std::isfinite(value))
        throw NonFiniteIntegral("adaptive Simpson produced a non-finite value");
    return value;
}

double integrate_real_line(const std::function<double(double)>& f,
                           double center, double scale,
                           const QuadratureSpec& spec) {
    spec.validate();
    if (!(scale > 0.0)) throw std::invalid_argument("envelope scale must be > 0");
    switch (spec.scheme) {
        case Scheme::gauss_hermite: {
            const GaussHermiteRule& rule = gauss_hermite_rule(spec.nodes);
            const double width = scale * std::sqrt(2.0);
            double sum = 0.0;
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                const double t = rule.nodes[k];
                const double x = center + width * t;
                sum += std::exp(rule.log_weights[k] + t * t) * f(x);
            }
            const double value = sum * width;
            if (!std::isfinite(value))
                throw NonFiniteIntegral("gauss-hermite produced a non-finite value");
            return value;
        }
        case Scheme::adaptive_simpson: {
            const double r = spec.truncation_radius * scale;
            return adaptive_simpson(f, center - r, center + r, spec.abs_tol,
                                    spec.rel_tol);
        }
        case Scheme::monte_carlo_check: {
            // Importance sampling with a wide Gaussian proposal; crude by
            // design, used only to cross-check the deterministic rules.
            Philox rng(spec.mc_seed);
            const double prop_sd = 2.0 * scale;
            const double norm = 1.0 / (prop_sd * std::sqrt(2.0 * M_PI));
            double sum = 0.0;
            for (int i = 0; i < spec.mc_draws; ++i) {
                const double x = center + prop_sd * rng.normal();
                const double z = (x - center) / prop_sd;
                sum += f(x) / (norm * std::exp(-0.5 * z * z));
            }
            const double value = sum / spec.mc_draws;
            if (!std::isfinite(value))
                throw NonFiniteIntegral("monte-carlo check produced a non-finite value");
            return value;
        }
    }
    throw std::logic_error("unreachable");
}

double integrate_half_line(const std::function<double(double)>& f,
                           double scale, const QuadratureSpec& spec) {
    spec.validate();
    if (!(scale > 0.0)) throw std::invalid_argument("envelope scale must be > 0");
    if (spec.scheme == Scheme::monte_carlo_check) {
        Philox rng(spec.mc_seed);
        const double mean = 2.0 * scale;
        double sum = 0.0;
        for (int i = 0; i < spec.mc_draws; ++i) {
            const double x = rng.exponential(mean);
            sum += f(x) * mean * std::exp(x / mean);
        }
        const double value = sum / spec.mc_draws;
        if (!std::isfinite(value))
            throw NonFiniteIntegral("monte-carlo check produced a non-finite value");
        return value;
    }
    return adaptive_simpson(f, 0.0, spec.truncation_radius * scale,
                            spec.abs_tol, spec.rel_tol);
}

double integrate(const std::function<double(double)>& f, Domain domain,
                 double center, double scale, const QuadratureSpec& spec) {
    return domain == Domain::real_line
               ? integrate_real_line(f, center, scale, spec)
               : integrate_half_line(f, scale, spec);
}

double integrate_gaussian_tensor(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& center, const Eigen::MatrixXd& L,
    int nodes_per_dim) {
    const int p = static_cast<int>(center.size());
    if (p < 1 || p > 8) throw std::invalid_argument("tensor quadrature supports 1 <= p <= 8");
    if (L.rows() != p || L.cols() != p)
        throw std::invalid_argument("envelope factor has wrong shape");
    double total_points = std::pow(static_cast<double>(nodes_per_dim), p);
    if (total_points > 2.0e7)
        throw std::invalid_argument("tensor quadrature grid too large");

    const GaussHermiteRule& rule = gauss_hermite_rule(nodes_per_dim);
    std::vector<int> idx(p, 0);
    Eigen::VectorXd t(p), x(p);
    const double sqrt2 = std::sqrt(2.0);
    const double log_jac =
        p * 0.5 * std::log(2.0) + std::log(std::abs(L.determinant()));
    double sum = 0.0;
    while (true) {
        double log_w = log_jac;
        for (int d = 0; d < p; ++d) {
            const double td = rule.nodes[idx[d]];
            t(d) = td;
            log_w += rule.log_weights[idx[d]] + td * td;
        }
        x.noalias() = center + sqrt2 * (L * t);
        sum += std::exp(log_w) * f(x);

        int d = 0;
        for (; d < p; ++d) {
            if (++idx[d] < nodes_per_dim) break;
            idx[d] = 0;
        }
        if (d == p) break;
    }
    if (!std::isfinite(sum))
        throw NonFiniteIntegral("tensor quadrature produced a non-finite value");
    return sum;
}

} // namespace robrenyi::quad
