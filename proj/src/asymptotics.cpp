#include "robrenyi/asymptotics.hpp"

#include <cmath>

namespace robrenyi {

namespace {

// d/dtheta h = h (alpha * score - dlnC); the second derivative adds the
// curvature of the exponent. Everything is integrated against p_theta0, so
// the integrands carry a p^{1+alpha} (for S) or p^{1+2alpha} (for M)
// Gaussian factor whose sharpened scale is used as the quadrature envelope.
struct HDerivs {
    double dh;
    double d2h;
};

HDerivs h_derivatives(const ParametricModel& model, double theta, double alpha,
                      double x) {
    const double lp = model.log_density(theta, x);
    if (!std::isfinite(lp)) return {0.0, 0.0};
    const double h = std::exp(alpha * lp - model.log_c_alpha(theta, alpha));
    const double e = alpha * model.score(theta, x) - model.dlog_c_alpha(theta, alpha);
    const double ep =
        alpha * model.score_deriv(theta, x) - model.d2log_c_alpha(theta, alpha);
    return {h * e, h * (e * e + ep)};
}

double envelope_scale(const ParametricModel& model, double theta, double power) {
    switch (model.kind()) {
        case ModelKind::normal_scale:
            return theta / std::sqrt(power);
        case ModelKind::normal_location:
            return model.fixed_sigma() / std::sqrt(power);
        case ModelKind::exponential_scale:
            return theta;  // adaptive rule on the half line
        default:
            throw UnsupportedModel("univariate families only");
    }
}

double envelope_center(const ParametricModel& model, double theta) {
    switch (model.kind()) {
        case ModelKind::normal_scale:
            return model.fixed_mean();
        case ModelKind::normal_location:
            return theta;
        default:
            return 0.0;
    }
}

SandwichCov assemble(Eigen::MatrixXd S, Eigen::MatrixXd M) {
    S = 0.5 * (S + S.transpose()).eval();
    M = 0.5 * (M + M.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success)
        throw SingularS("the expected Hessian is not positive definite");
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(S.rows(), S.cols());
    const Eigen::MatrixXd s_inv = llt.solve(id);
    Eigen::MatrixXd V = s_inv * M * s_inv;
    V = 0.5 * (V + V.transpose()).eval();
    return {std::move(S), std::move(M), std::move(V)};
}

} // namespace

SandwichCov sandwich(const ParametricModel& model, double theta0, Alpha alpha,
                     const quad::QuadratureSpec& spec) {
    if (!alpha.positive()) throw UnsupportedAlpha("sandwich requires alpha > 0");
    model.check_theta(theta0);
    const double a = alpha.value();
    const double center = envelope_center(model, theta0);

    auto integrand_s = [&](double x) {
        return -h_derivatives(model, theta0, a, x).d2h * model.density(theta0, x);
    };
    auto integrand_m = [&](double x) {
        const double dh = h_derivatives(model, theta0, a, x).dh;
        return dh * dh * model.density(theta0, x);
    };
    const double s_val = quad::integrate(integrand_s, model.domain(), center,
                                         envelope_scale(model, theta0, 1.0 + a), spec);
    const double m_val = quad::integrate(integrand_m, model.domain(), center,
                                         envelope_scale(model, theta0, 1.0 + 2.0 * a), spec);
    return assemble(Eigen::MatrixXd::Constant(1, 1, s_val),
                    Eigen::MatrixXd::Constant(1, 1, m_val));
}

SandwichCov sandwich(const ParametricModel& model, const Eigen::VectorXd& theta0,
                     Alpha alpha, const quad::QuadratureSpec& spec) {
    if (model.kind() != ModelKind::mvn_mean)
        return sandwich(model, theta0(0), alpha, spec);
    if (!alpha.positive()) throw UnsupportedAlpha("sandwich requires alpha > 0");
    model.check_theta(theta0);
    const double a = alpha.value();
    const int p = model.theta_dim();
    const Eigen::MatrixXd& vinv = model.fixed_cov_inverse();
    const double log_c = model.log_c_alpha(theta0, a);

    // grad h = alpha h Vinv (x - m);  hess h = h (alpha^2 Vinv d d^t Vinv - alpha Vinv)
    auto hp = [&](const Eigen::VectorXd& x) {
        return std::exp((1.0 + a) * model.log_density(theta0, x) - log_c);
    };
    const int nodes = std::max(16, spec.nodes / (p >= 3 ? 2 : 1));
    const Eigen::MatrixXd chol = model.fixed_cov_cholesky();

    Eigen::MatrixXd S(p, p), M(p, p);
    for (int r = 0; r < p; ++r) {
        for (int c = r; c < p; ++c) {
            auto s_entry = [&](const Eigen::VectorXd& x) {
                const Eigen::VectorXd d = vinv * (x - theta0);
                return hp(x) * (a * vinv(r, c) - a * a * d(r) * d(c));
            };
            S(r, c) = S(c, r) = quad::integrate_gaussian_tensor(
                s_entry, theta0, chol / std::sqrt(1.0 + a), nodes);
        }
    }
    auto h2p = [&](const Eigen::VectorXd& x) {
        return std::exp((1.0 + 2.0 * a) * model.log_density(theta0, x) - 2.0 * log_c);
    };
    for (int r = 0; r < p; ++r) {
        for (int c = r; c < p; ++c) {
            auto m_entry = [&](const Eigen::VectorXd& x) {
                const Eigen::VectorXd d = vinv * (x - theta0);
                return h2p(x) * a * a * d(r) * d(c);
            };
            M(r, c) = M(c, r) = quad::integrate_gaussian_tensor(
                m_entry, theta0, chol / std::sqrt(1.0 + 2.0 * a), nodes);
        }
    }
    return assemble(std::move(S), std::move(M));
}

double sigma2_rhat(const ParametricModel& model, double theta0, Alpha alpha,
                   const quad::QuadratureSpec& spec) {
    if (!alpha.positive()) throw UnsupportedAlpha("sigma2_rhat requires alpha > 0");
    model.check_theta(theta0);
    const double a = alpha.value();
    const double center = envelope_center(model, theta0);
    auto mean_h = [&](double x) {
        return h_kernel(model, theta0, alpha, x) * model.density(theta0, x);
    };
    auto mean_h2 = [&](double x) {
        const double h = h_kernel(model, theta0, alpha, x);
        return h * h * model.density(theta0, x);
    };
    const double eh = quad::integrate(mean_h, model.domain(), center,
                                      envelope_scale(model, theta0, 1.0 + a), spec);
    const double eh2 = quad::integrate(mean_h2, model.domain(), center,
                                       envelope_scale(model, theta0, 1.0 + 2.0 * a), spec);
    const double var = eh2 - eh * eh;
    if (!std::isfinite(var))
        throw NonFiniteIntegral("variance integrals of the kernel diverged");
    return var;
}

double sigma2_rhat(const ParametricModel& model, const Eigen::VectorXd& theta0,
                   Alpha alpha, const quad::QuadratureSpec& spec) {
    if (model.kind() != ModelKind::mvn_mean)
        return sigma2_rhat(model, theta0(0), alpha, spec);
    if (!alpha.positive()) throw UnsupportedAlpha("sigma2_rhat requires alpha > 0");
    model.check_theta(theta0);
    const double a = alpha.value();
    const double log_c = model.log_c_alpha(theta0, a);
    const int nodes = std::max(16, spec.nodes / (model.theta_dim() >= 3 ? 2 : 1));
    const Eigen::MatrixXd chol = model.fixed_cov_cholesky();
    auto mean_h = [&](const Eigen::VectorXd& x) {
        return std::exp((1.0 + a) * model.log_density(theta0, x) - log_c);
    };
    auto mean_h2 = [&](const Eigen::VectorXd& x) {
        return std::exp((1.0 + 2.0 * a) * model.log_density(theta0, x) - 2.0 * log_c);
    };
    const double eh = quad::integrate_gaussian_tensor(
        mean_h, theta0, chol / std::sqrt(1.0 + a), nodes);
    const double eh2 = quad::integrate_gaussian_tensor(
        mean_h2, theta0, chol / std::sqrt(1.0 + 2.0 * a), nodes);
    return eh2 - eh * eh;
}

double are(ModelKind kind, Alpha alpha, int dim) {
    const double a = alpha.value();
    switch (kind) {
        case ModelKind::normal_scale:
            return 2.0 * std::pow(2.0 * a + 1.0, 2.5) /
                   (std::pow(a + 1.0, 3.0) * (3.0 * a * a + 4.0 * a + 2.0));
        case ModelKind::exponential_scale:
            return std::pow(2.0 * a + 1.0, 3.0) /
                   (std::pow(a + 1.0, 4.0) * (2.0 * a * a + 2.0 * a + 1.0));
        case ModelKind::normal_location:
            return std::pow(2.0 * a + 1.0, 1.5) / std::pow(a + 1.0, 3.0);
        case ModelKind::mvn_mean:
            if (dim < 1)
                throw UnsupportedModel("mvn-mean efficiency needs the dimension");
            return std::pow(std::sqrt(2.0 * a + 1.0) / (a + 1.0),
                            static_cast<double>(dim) + 2.0);
    }
    throw UnsupportedModel("unknown model kind");
}

} // namespace robrenyi
