#include "robrenyi/regression.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "robrenyi/kernels.hpp"
#include "robrenyi/solve.hpp"

namespace robrenyi {

namespace {

constexpr double kMadToSigma = 1.0 / 0.6745;
constexpr double kDegenerateScaleFraction = 1e-8;

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (n % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    return 0.5 * (v[mid - 1] + hi);
}

double mad_scale(const Eigen::VectorXd& r) {
    std::vector<double> v(r.data(), r.data() + r.size());
    const double med = median_of(v);
    for (double& x : v) x = std::abs(x - med);
    return median_of(std::move(v)) * kMadToSigma;
}

// The (eqq1)-style objective sum_i sigma^{-a/(a+1)} exp(-a u_i^2 / 2),
// in logs; monotone in the criterion, used to rank IRLS iterates and starts.
double log_objective(const Eigen::VectorXd& r, double sigma, double alpha,
                     int /*n*/) {
    const auto sums = kernels::stable_gaussian_moments(
        {r.data(), static_cast<std::size_t>(r.size())}, 0.0, sigma, alpha);
    if (!(sums.moments.s0 > 0.0)) return -std::numeric_limits<double>::infinity();
    return -alpha / (alpha + 1.0) * std::log(sigma) + std::log(sums.moments.s0) -
           sums.log_shift;
}

struct SystemResidual {
    double value;      // norm of the stacked estimating system, averaged over n
    Eigen::VectorXd beta_part;
    double sigma_part;
};

SystemResidual system_residual(const RegressionData& data,
                               const Eigen::VectorXd& beta, double sigma,
                               double alpha) {
    const int n = data.n();
    Eigen::VectorXd r = data.Y - data.X * beta;
    Eigen::VectorXd beta_eq = Eigen::VectorXd::Zero(data.p());
    double sigma_eq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = r(i) / sigma;
        beta_eq += phi_weight(u, alpha) * data.X.row(i).transpose();
        sigma_eq += chi_weight(u, alpha);
    }
    beta_eq /= n;
    sigma_eq /= n;
    SystemResidual out;
    out.beta_part = beta_eq;
    out.sigma_part = sigma_eq;
    out.value = std::sqrt(beta_eq.squaredNorm() + sigma_eq * sigma_eq);
    return out;
}

// sigma step: root of sum chi(r_i / sigma) = 0 in log sigma, safeguarded
// Newton inside [1e-3, 1e3] times the MAD scale of the current residuals.
double solve_sigma(const Eigen::VectorXd& r, double sigma0, double alpha,
                   const SolverOptions& opts) {
    const std::span<const double> rs{r.data(), static_cast<std::size_t>(r.size())};
    auto g_and_dg = [&](double s_log) {
        const double sigma = std::exp(s_log);
        const auto sm = kernels::stable_gaussian_moments(rs, 0.0, sigma, alpha);
        const double r2 = sm.moments.s2 / sm.moments.s0;
        const double r4 = sm.moments.s4 / sm.moments.s0;
        return std::make_pair(r2 - 1.0 / (1.0 + alpha),
                              alpha * r4 - 2.0 * r2 - alpha * r2 * r2);
    };
    const double s_hat = mad_scale(r);
    if (!(s_hat > 0.0)) throw DegenerateScale("residual scale collapsed to zero");
    const double lo = std::log(1e-3 * s_hat);
    const double hi = std::log(1e3 * s_hat);
    auto g_only = [&](double s) { return g_and_dg(s).first; };
    const auto bracket = solve::bracket_root(
        g_only, std::clamp(std::log(sigma0), lo, hi), lo, hi, 0.5 * std::log(2.0));
    if (!bracket) throw DegenerateScale("no interior solution for the scale equation");
    const auto root = solve::safeguarded_newton(g_and_dg, bracket->first,
                                                bracket->second, std::log(sigma0),
                                                1e-13, opts.tol, opts.max_iter);
    if (!root.converged) throw NoConvergence("scale step failed to converge");
    return std::exp(root.x);
}

struct IrlsOutcome {
    Eigen::VectorXd beta;
    double sigma;
    int iterations;
    double log_obj;
};

IrlsOutcome run_irls(const RegressionData& data, Eigen::VectorXd beta,
                     double sigma, double alpha, double response_scale,
                     const SolverOptions& opts) {
    const int n = data.n();
    const int p = data.p();
    Eigen::VectorXd r = data.Y - data.X * beta;
    Eigen::VectorXd w(n);
    double lobj = log_objective(r, sigma, alpha, n);

    int it = 0;
    for (; it < opts.max_iter; ++it) {
        if (sigma < kDegenerateScaleFraction * response_scale)
            throw DegenerateScale("sigma iterates collapsed toward zero");

        kernels::exp_weights({r.data(), static_cast<std::size_t>(r.size())}, sigma,
                             alpha, {w.data(), static_cast<std::size_t>(w.size())});
        const Eigen::MatrixXd xtw = data.X.transpose() * w.asDiagonal();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(xtw * data.X);
        if (ldlt.info() != Eigen::Success)
            throw RankDeficient("weighted normal equations are singular");
        const Eigen::VectorXd beta_ls = ldlt.solve(xtw * data.Y);

        // step halving on the criterion; redescending weights can otherwise
        // cycle between basins
        Eigen::VectorXd beta_next = beta;
        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h < 20; ++h, step *= 0.5) {
            const Eigen::VectorXd trial = beta + step * (beta_ls - beta);
            const Eigen::VectorXd r_trial = data.Y - data.X * trial;
            const double lobj_trial = log_objective(r_trial, sigma, alpha, n);
            if (lobj_trial >= lobj - 1e-14) {
                beta_next = trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) beta_next = beta;  // keep beta, still refresh sigma

        beta = beta_next;
        r = data.Y - data.X * beta;
        sigma = solve_sigma(r, sigma, alpha, opts);
        lobj = log_objective(r, sigma, alpha, n);

        const SystemResidual res = system_residual(data, beta, sigma, alpha);
        if (res.value < opts.tol) break;
    }
    return {std::move(beta), sigma, it, lobj};
}

} // namespace

void RegressionData::validate() const {
    if (X.rows() != Y.size()) throw DomainError("design and response sizes differ");
    if (n() <= p()) throw DomainError("need more observations than covariates");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < p()) throw RankDeficient("design matrix loses column rank");
}

double phi_weight(double u, double alpha) {
    return u * std::exp(-0.5 * alpha * u * u);
}

double chi_weight(double u, double alpha) {
    return (u * u - 1.0 / (alpha + 1.0)) * std::exp(-0.5 * alpha * u * u);
}

RegressionFit fit_regression(const RegressionData& data, Alpha alpha,
                             const SolverOptions& opts) {
    opts.validate();
    data.validate();
    const int n = data.n();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
    const Eigen::VectorXd beta_ols = qr.solve(data.Y);
    const Eigen::VectorXd r_ols = data.Y - data.X * beta_ols;
    const double sigma_mle = std::sqrt(r_ols.squaredNorm() / n);
    const double y_scale = std::sqrt(
        (data.Y.array() - data.Y.mean()).square().sum() / std::max(1, n - 1));
    const double response_scale = std::max(y_scale, 1e-300);

    if (sigma_mle < kDegenerateScaleFraction * response_scale)
        throw DegenerateScale("residuals vanish; no interior scale solution");

    RegressionFit fit;
    if (!alpha.positive()) {
        fit.beta_hat = beta_ols;
        fit.sigma_hat = sigma_mle;
        fit.weights = Eigen::VectorXd::Ones(n);
        fit.converged = true;
        fit.system_residual = system_residual(data, beta_ols, sigma_mle, 0.0).value;
        return fit;
    }

    const double a = alpha.value();
    const double sigma_mad = mad_scale(r_ols);
    std::vector<std::pair<Eigen::VectorXd, double>> starts;
    starts.emplace_back(beta_ols, sigma_mle);
    if (sigma_mad > 0.0) starts.emplace_back(beta_ols, sigma_mad);

    std::optional<IrlsOutcome> best;
    int tried_iterations = 0;
    for (const auto& [b0, s0] : starts) {
        try {
            IrlsOutcome outcome = run_irls(data, b0, s0, a, response_scale, opts);
            tried_iterations += outcome.iterations;
            if (!best || outcome.log_obj > best->log_obj) best = std::move(outcome);
        } catch (const NoConvergence&) {
        }
    }
    if (!best) throw NoConvergence("every regression start failed");

    fit.beta_hat = best->beta;
    fit.sigma_hat = best->sigma;
    fit.iterations = tried_iterations;
    Eigen::VectorXd r = data.Y - data.X * fit.beta_hat;
    fit.weights.resize(n);
    kernels::exp_weights({r.data(), static_cast<std::size_t>(r.size())},
                         fit.sigma_hat, a,
                         {fit.weights.data(), static_cast<std::size_t>(n)});
    fit.system_residual = system_residual(data, fit.beta_hat, fit.sigma_hat, a).value;
    fit.converged = fit.system_residual < 10.0 * opts.tol;
    return fit;
}

Eigen::MatrixXd regression_asymptotic_cov(const Eigen::MatrixXd& v_x, double sigma,
                                          Alpha alpha) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
    const int p = static_cast<int>(v_x.rows());
    if (v_x.cols() != p) throw DomainError("V_X must be square");
    Eigen::LLT<Eigen::MatrixXd> llt(v_x);
    if (llt.info() != Eigen::Success)
        throw SingularVX("V_X must be positive definite");
    const double a = alpha.value();
    const double s2 = sigma * sigma;
    const double beta_factor = s2 * std::pow(a + 1.0, 3.0) / std::pow(2.0 * a + 1.0, 1.5);
    const double sigma_var = s2 * std::pow(a + 1.0, 3.0) *
                             (3.0 * a * a + 4.0 * a + 2.0) /
                             (4.0 * std::pow(2.0 * a + 1.0, 2.5));
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p + 1, p + 1);
    cov.topLeftCorner(p, p) =
        beta_factor * llt.solve(Eigen::MatrixXd::Identity(p, p));
    cov(p, p) = sigma_var;
    return cov;
}

std::pair<Eigen::VectorXd, double> regression_influence(
    const Eigen::VectorXd& x0, double y0, const Eigen::VectorXd& beta,
    double sigma, const Eigen::MatrixXd& v_x, Alpha alpha) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
    if (x0.size() != beta.size() || v_x.rows() != x0.size() || v_x.cols() != x0.size())
        throw DomainError("dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(v_x);
    if (llt.info() != Eigen::Success)
        throw SingularVX("V_X must be positive definite");
    const double a = alpha.value();
    const double u = (y0 - beta.dot(x0)) / sigma;
    Eigen::VectorXd beta_if =
        sigma * std::pow(a + 1.0, 1.5) * phi_weight(u, a) * llt.solve(x0);
    const double sigma_if = 0.5 * std::pow(a + 1.0, 2.5) * chi_weight(u, a);
    return {std::move(beta_if), sigma_if};
}

} // namespace robrenyi
