#include "robrenyi/robustness.hpp"

#include <cmath>
#include <limits>

#include "robrenyi/asymptotics.hpp"
#include "robrenyi/solve.hpp"

namespace robrenyi {

namespace {

double lambda_scale(const ParametricModel& model, double theta, double power) {
    switch (model.kind()) {
        case ModelKind::normal_scale:
            return theta / std::sqrt(power);
        case ModelKind::normal_location:
            return model.fixed_sigma() / std::sqrt(power);
        case ModelKind::exponential_scale:
            return theta;
        default:
            throw UnsupportedModel("univariate families only");
    }
}

double lambda_center(const ParametricModel& model, double theta) {
    switch (model.kind()) {
        case ModelKind::normal_scale:
            return model.fixed_mean();
        case ModelKind::normal_location:
            return theta;
        default:
            return 0.0;
    }
}

} // namespace

double influence_general(const ParametricModel& model, double theta, Alpha alpha,
                         double x, const quad::QuadratureSpec& spec) {
    if (!alpha.positive())
        throw UnsupportedAlpha("the influence function requires alpha > 0");
    model.check_theta(theta);
    const double a = alpha.value();
    const double center = lambda_center(model, theta);
    const double scale = lambda_scale(model, theta, 1.0 + a);

    // All three Lebesgue integrals share the p^{1+alpha} factor; writing
    // p^{alpha-1} pdot pdot^t as p^{1+alpha} score^2 avoids negative powers
    // of an underflowing density.
    auto p_pow = [&](double y) {
        const double lp = model.log_density(theta, y);
        return std::isfinite(lp) ? std::exp((1.0 + a) * lp) : 0.0;
    };
    const double b = quad::integrate(p_pow, model.domain(), center, scale, spec);
    const double av = quad::integrate(
        [&](double y) { return p_pow(y) * model.score(theta, y); }, model.domain(),
        center, scale, spec);
    const double mq = quad::integrate(
        [&](double y) {
            const double s = model.score(theta, y);
            return p_pow(y) * s * s;
        },
        model.domain(), center, scale, spec);
    if (!(b > 0.0)) throw NonFiniteIntegral("int p^(1+alpha) dlambda vanished");
    const double m_alpha = mq - av * av / b;
    if (!(m_alpha > 0.0) || !std::isfinite(m_alpha))
        throw SingularMAlpha("M_alpha is not positive");

    const double lp = model.log_density(theta, x);
    if (!std::isfinite(lp)) return 0.0;
    return std::exp(a * lp) * (model.score(theta, x) - av / b) / m_alpha;
}

Eigen::VectorXd influence_general(const ParametricModel& model,
                                  const Eigen::VectorXd& theta, Alpha alpha,
                                  const Eigen::VectorXd& x,
                                  const quad::QuadratureSpec& spec) {
    if (model.kind() != ModelKind::mvn_mean)
        return Eigen::VectorXd::Constant(
            1, influence_general(model, theta(0), alpha, x(0), spec));
    if (!alpha.positive())
        throw UnsupportedAlpha("the influence function requires alpha > 0");
    model.check_theta(theta);
    const double a = alpha.value();
    const int p = model.theta_dim();
    const Eigen::MatrixXd chol =
        model.fixed_cov_cholesky() / std::sqrt(1.0 + a);
    const int nodes = std::max(16, spec.nodes / (p >= 3 ? 2 : 1));

    auto p_pow = [&](const Eigen::VectorXd& y) {
        return std::exp((1.0 + a) * model.log_density(theta, y));
    };
    const double b = quad::integrate_gaussian_tensor(p_pow, theta, chol, nodes);
    Eigen::VectorXd av(p);
    Eigen::MatrixXd mq(p, p);
    for (int r = 0; r < p; ++r) {
        av(r) = quad::integrate_gaussian_tensor(
            [&](const Eigen::VectorXd& y) {
                return p_pow(y) * model.score(theta, y)(r);
            },
            theta, chol, nodes);
        for (int c = r; c < p; ++c) {
            const double entry = quad::integrate_gaussian_tensor(
                [&](const Eigen::VectorXd& y) {
                    const Eigen::VectorXd s = model.score(theta, y);
                    return p_pow(y) * s(r) * s(c);
                },
                theta, chol, nodes);
            mq(r, c) = mq(c, r) = entry;
        }
    }
    if (!(b > 0.0)) throw NonFiniteIntegral("int p^(1+alpha) dlambda vanished");
    Eigen::MatrixXd m_alpha = mq - av * av.transpose() / b;
    Eigen::LLT<Eigen::MatrixXd> llt(m_alpha);
    if (llt.info() != Eigen::Success)
        throw SingularMAlpha("M_alpha is not positive definite");

    const double lp = model.log_density(theta, x);
    if (!std::isfinite(lp)) return Eigen::VectorXd::Zero(p);
    const Eigen::VectorXd psi =
        std::exp(a * lp) * (model.score(theta, x) - av / b);
    return llt.solve(psi);
}

double influence_closed(const ParametricModel& model, double theta, Alpha alpha,
                        double x) {
    if (!alpha.positive())
        throw UnsupportedAlpha("the influence function requires alpha > 0");
    model.check_theta(theta);
    const double a = alpha.value();
    switch (model.kind()) {
        case ModelKind::normal_scale: {
            const double u = (x - model.fixed_mean()) / theta;
            return 0.5 * theta * std::pow(a + 1.0, 2.5) *
                   (u * u - 1.0 / (a + 1.0)) * std::exp(-0.5 * a * u * u);
        }
        case ModelKind::exponential_scale: {
            if (x < 0.0) return 0.0;
            const double v = x / theta;
            return theta * std::pow(a + 1.0, 3.0) * (v - 1.0 / (a + 1.0)) *
                   std::exp(-a * v);
        }
        case ModelKind::normal_location: {
            const double sigma = model.fixed_sigma();
            const double u = (x - theta) / sigma;
            return std::pow(a + 1.0, 1.5) * (x - theta) * std::exp(-0.5 * a * u * u);
        }
        default:
            throw UnsupportedModel("no printed closed form for this family");
    }
}

Eigen::VectorXd influence_closed(const ParametricModel& model,
                                 const Eigen::VectorXd& theta, Alpha alpha,
                                 const Eigen::VectorXd& x) {
    if (model.kind() != ModelKind::mvn_mean)
        return Eigen::VectorXd::Constant(
            1, influence_closed(model, theta(0), alpha, x(0)));
    if (!alpha.positive())
        throw UnsupportedAlpha("the influence function requires alpha > 0");
    model.check_theta(theta);
    const double a = alpha.value();
    const Eigen::VectorXd d = x - theta;
    const double q = d.dot(model.fixed_cov_inverse() * d);
    const double factor =
        std::pow(std::sqrt(a + 1.0), model.theta_dim() + 2) * std::exp(-0.5 * a * q);
    return factor * d;
}

double ges(const ParametricModel& model, double theta, Alpha alpha) {
    model.check_theta(theta);
    if (!alpha.positive()) return std::numeric_limits<double>::infinity();
    const double a = alpha.value();
    switch (model.kind()) {
        case ModelKind::normal_scale: {
            const double central = 0.5 * theta * std::pow(a + 1.0, 1.5);
            const double tail = theta * std::pow(a + 1.0, 2.5) / a *
                                std::exp(-(3.0 * a + 2.0) / (2.0 * (a + 1.0)));
            return std::max(central, tail);
        }
        case ModelKind::exponential_scale:
            return theta * std::pow(a + 1.0, 3.0) / a *
                   std::exp(-(2.0 * a + 1.0) / (a + 1.0));
        case ModelKind::normal_location:
            return std::pow(a + 1.0, 1.5) * model.fixed_sigma() / std::sqrt(a) *
                   std::exp(-0.5);
        default:
            throw UnsupportedModel("no printed gross error sensitivity for this family");
    }
}

std::pair<double, double> most_brobust_alpha(const ParametricModel& model,
                                             double theta,
                                             std::pair<double, double> interval) {
    if (!(interval.first > 0.0) || !(interval.second > interval.first))
        throw std::invalid_argument("search interval must sit inside (0, beta_max]");
    auto objective = [&](double a) { return ges(model, theta, Alpha(a)); };
    const auto min = solve::golden_section_minimize(objective, interval.first,
                                                    interval.second, 1e-5);
    return {min.x, min.f};
}

double psi_location(double x, double m, double sigma, double alpha) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
    const double u = (x - m) / sigma;
    const double lead = alpha *
                        std::pow(alpha + 1.0, 0.5 * alpha / (alpha + 1.0)) *
                        std::pow(sigma, -(3.0 * alpha + 2.0) / (alpha + 1.0)) *
                        std::pow(2.0 * M_PI, -0.5 * alpha / (alpha + 1.0));
    return lead * (x - m) * std::exp(-0.5 * alpha * u * u);
}

RobustnessReport robustness_report(const ParametricModel& model, double theta,
                                   Alpha alpha,
                                   const std::vector<double>& x_grid) {
    RobustnessReport report;
    report.alpha = alpha.value();
    report.if_values.reserve(x_grid.size());
    for (double x : x_grid) {
        const double value = alpha.positive()
                                 ? influence_closed(model, theta, alpha, x)
                                 : model.score(theta, x) / model.fisher_information(theta);
        report.if_values.emplace_back(x, value);
    }
    report.ges = ges(model, theta, alpha);
    report.are = are(model.kind(), alpha);
    return report;
}

} // namespace robrenyi
