#include "robrenyi/pseudodistance.hpp"

#include <cmath>

#include "robrenyi/kernels.hpp"

namespace robrenyi {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double checked_log(double integral, const char* what) {
    if (!std::isfinite(integral) || integral <= 0.0)
        throw NonFiniteIntegral(what);
    return std::log(integral);
}

// int p^c dlambda with the envelope sharpened by the power.
double power_integral(const Density& p, double c, const quad::QuadratureSpec& spec) {
    auto f = [&](double x) {
        const double lp = p.log_at(x);
        return std::isfinite(lp) ? std::exp(c * lp) : 0.0;
    };
    const double scale =
        p.domain == quad::Domain::real_line ? p.scale / std::sqrt(c) : p.scale;
    return quad::integrate(f, p.domain, p.center, scale, spec);
}

// int p^a q dlambda. The envelope merges the two Gaussian hints through the
// precision-weighted mean, which is exact when both densities are normal.
double cross_integral(const Density& p, const Density& q, double a,
                      const quad::QuadratureSpec& spec) {
    auto f = [&](double x) {
        const double lp = p.log_at(x);
        const double lq = q.log_at(x);
        if (!std::isfinite(lp) || !std::isfinite(lq)) return 0.0;
        return std::exp(a * lp + lq);
    };
    if (p.domain == quad::Domain::half_line || q.domain == quad::Domain::half_line)
        return quad::integrate_half_line(f, std::max(p.scale, q.scale), spec);
    const double wp = a / (p.scale * p.scale);
    const double wq = 1.0 / (q.scale * q.scale);
    const double center = (wp * p.center + wq * q.center) / (wp + wq);
    const double scale = 1.0 / std::sqrt(wp + wq);
    return quad::integrate_real_line(f, center, scale, spec);
}

} // namespace

double Density::log_at(double x) const {
    if (log_pdf) return log_pdf(x);
    const double v = pdf(x);
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

Density normal_density(double mean, double sd) {
    if (!(sd > 0.0)) throw DomainError("sd must be > 0");
    Density d;
    d.pdf = [mean, sd](double x) {
        const double u = (x - mean) / sd;
        return std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * M_PI));
    };
    d.log_pdf = [mean, sd](double x) {
        const double u = (x - mean) / sd;
        return -std::log(sd) - kLogSqrt2Pi - 0.5 * u * u;
    };
    d.center = mean;
    d.scale = sd;
    return d;
}

Density exponential_density(double theta) {
    if (!(theta > 0.0)) throw DomainError("theta must be > 0");
    Density d;
    d.pdf = [theta](double x) { return x < 0.0 ? 0.0 : std::exp(-x / theta) / theta; };
    d.log_pdf = [theta](double x) {
        return x < 0.0 ? -std::numeric_limits<double>::infinity()
                       : -std::log(theta) - x / theta;
    };
    d.center = 0.0;
    d.scale = theta;
    d.domain = quad::Domain::half_line;
    return d;
}

Density model_density(const ParametricModel& model, double theta) {
    model.check_theta(theta);
    switch (model.kind()) {
        case ModelKind::normal_scale:
            return normal_density(model.fixed_mean(), theta);
        case ModelKind::normal_location:
            return normal_density(theta, model.fixed_sigma());
        case ModelKind::exponential_scale:
            return exponential_density(theta);
        case ModelKind::mvn_mean:
            throw UnsupportedModel("mvn-mean has no univariate density adapter");
    }
    throw std::logic_error("unreachable");
}

double renyi_pseudodistance(const Density& p, const Density& q, Alpha alpha,
                            const quad::QuadratureSpec& spec) {
    spec.validate();
    if (!alpha.positive()) {
        // R_0(P,Q) = int ln q dQ - int ln p dQ
        auto f = [&](double x) {
            const double lq = q.log_at(x);
            if (!std::isfinite(lq)) return 0.0;  // q vanishes, zero contribution
            const double lp = p.log_at(x);
            return std::exp(lq) * (lq - lp);
        };
        const double value = quad::integrate(f, q.domain, q.center, q.scale, spec);
        if (!std::isfinite(value))
            throw NonFiniteIntegral("order-zero pseudodistance integral diverged");
        return value;
    }
    const double a = alpha.value();
    const double lp = checked_log(power_integral(p, 1.0 + a, spec),
                                  "int p^(1+alpha) dlambda is not positive finite");
    const double lq = checked_log(power_integral(q, 1.0 + a, spec),
                                  "int q^(1+alpha) dlambda is not positive finite");
    const double lx = checked_log(cross_integral(p, q, a, spec),
                                  "int p^alpha q dlambda is not positive finite");
    return lp / (1.0 + a) + lq / (a * (1.0 + a)) - lx / a;
}

double renyi_pseudodistance_holder(const Density& p, const Density& q,
                                   Alpha alpha, const quad::QuadratureSpec& spec) {
    if (!alpha.positive()) return renyi_pseudodistance(p, q, alpha, spec);
    quad::QuadratureSpec adaptive = spec;
    adaptive.scheme = quad::Scheme::adaptive_simpson;
    const double a = alpha.value();
    const double lp = checked_log(power_integral(p, 1.0 + a, adaptive),
                                  "int p^(1+alpha) dlambda is not positive finite");
    const double lq = checked_log(power_integral(q, 1.0 + a, adaptive),
                                  "int q^(1+alpha) dlambda is not positive finite");
    const double lx = checked_log(cross_integral(p, q, a, adaptive),
                                  "int p^alpha q dlambda is not positive finite");
    return (a / (1.0 + a) * lp + lq / (1.0 + a) - lx) / a;
}

double c_alpha(const ParametricModel& model, double theta, Alpha alpha) {
    if (!alpha.positive()) throw UnsupportedAlpha("c_alpha requires alpha > 0");
    return std::exp(model.log_c_alpha(theta, alpha.value()));
}

double c_alpha(const ParametricModel& model, const Eigen::VectorXd& theta, Alpha alpha) {
    if (!alpha.positive()) throw UnsupportedAlpha("c_alpha requires alpha > 0");
    return std::exp(model.log_c_alpha(theta, alpha.value()));
}

double c_alpha_numeric(const ParametricModel& model, double theta, Alpha alpha,
                       const quad::QuadratureSpec& spec) {
    if (!alpha.positive()) throw UnsupportedAlpha("c_alpha requires alpha > 0");
    const double a = alpha.value();
    const double integral = power_integral(model_density(model, theta), 1.0 + a, spec);
    if (!std::isfinite(integral) || integral <= 0.0)
        throw NonFiniteIntegral("int p^(1+alpha) dlambda is not positive finite");
    return std::pow(integral, a / (1.0 + a));
}

double h_kernel(const ParametricModel& model, double theta, Alpha alpha, double x) {
    if (!alpha.positive()) throw UnsupportedAlpha("h_kernel requires alpha > 0");
    const double lp = model.log_density(theta, x);
    if (!std::isfinite(lp)) return 0.0;
    return std::exp(alpha.value() * lp - model.log_c_alpha(theta, alpha.value()));
}

double h_kernel(const ParametricModel& model, const Eigen::VectorXd& theta,
                Alpha alpha, const Eigen::VectorXd& x) {
    if (!alpha.positive()) throw UnsupportedAlpha("h_kernel requires alpha > 0");
    const double lp = model.log_density(theta, x);
    if (!std::isfinite(lp)) return 0.0;
    return std::exp(alpha.value() * lp - model.log_c_alpha(theta, alpha.value()));
}

namespace {

// ln( (1/n) sum p_theta^alpha(X_i) ), computed through the shifted moment
// kernels for the univariate families and a max-shifted direct pass for
// mvn-mean. Returns -inf when every summand underflows to zero.
double log_mean_density_power(const ParametricModel& model,
                              const Eigen::VectorXd& theta, const Sample& sample,
                              double a) {
    const double n = sample.n();
    switch (model.kind()) {
        case ModelKind::normal_scale:
        case ModelKind::normal_location: {
            const double sigma = model.kind() == ModelKind::normal_scale
                                     ? theta(0)
                                     : model.fixed_sigma();
            const double m = model.kind() == ModelKind::normal_scale
                                 ? model.fixed_mean()
                                 : theta(0);
            const auto sums =
                kernels::stable_gaussian_moments(sample.univariate(), m, sigma, a);
            if (!(sums.moments.s0 > 0.0)) return -std::numeric_limits<double>::infinity();
            return -a * (std::log(sigma) + kLogSqrt2Pi) + std::log(sums.moments.s0) -
                   sums.log_shift - std::log(n);
        }
        case ModelKind::exponential_scale: {
            const auto sums =
                kernels::stable_exp_decay_moments(sample.univariate(), theta(0), a);
            if (!(sums.moments.s0 > 0.0)) return -std::numeric_limits<double>::infinity();
            return -a * std::log(theta(0)) + std::log(sums.moments.s0) -
                   sums.log_shift - std::log(n);
        }
        case ModelKind::mvn_mean: {
            Eigen::VectorXd log_p(sample.n());
            for (int i = 0; i < sample.n(); ++i)
                log_p(i) = model.log_density(theta, sample.points.row(i).transpose());
            const double lmax = log_p.maxCoeff();
            if (!std::isfinite(lmax)) return -std::numeric_limits<double>::infinity();
            double sum = 0.0;
            for (int i = 0; i < sample.n(); ++i) sum += std::exp(a * (log_p(i) - lmax));
            return a * lmax + std::log(sum) - std::log(n);
        }
    }
    throw std::logic_error("unreachable");
}

} // namespace

CriterionValue criterion(const ParametricModel& model, const Eigen::VectorXd& theta,
                         const Sample& sample, Alpha alpha) {
    model.check_theta(theta);
    if (sample.n() == 0) throw EmptySample("criterion needs a nonempty sample");
    if (sample.dim() != (model.univariate() ? 1 : model.theta_dim()))
        throw DomainError("sample dimension mismatch");

    if (!alpha.positive()) {
        double sum = 0.0;
        for (int i = 0; i < sample.n(); ++i) {
            const double lp = model.log_density(theta, sample.points.row(i).transpose());
            if (!std::isfinite(lp))
                throw NonFiniteCriterion("zero density at a sample point under alpha = 0");
            sum += lp;
        }
        return {sum / sample.n(), CriterionBranch::log_likelihood};
    }

    const double a = alpha.value();
    const double log_mean = log_mean_density_power(model, theta, sample, a);
    if (!std::isfinite(log_mean))
        throw NonFiniteCriterion("all density powers vanished at this parameter");
    const double value =
        -model.log_power_integral(theta, a) / (1.0 + a) + log_mean / a;
    return {value, CriterionBranch::alpha_positive};
}

CriterionValue criterion(const ParametricModel& model, double theta,
                         const Sample& sample, Alpha alpha) {
    return criterion(model, Eigen::VectorXd::Constant(1, theta), sample, alpha);
}

double criterion_form40(const ParametricModel& model, double theta,
                        const Sample& sample, Alpha alpha) {
    if (!alpha.positive())
        throw UnsupportedAlpha("the normalized form is defined for alpha > 0");
    if (sample.n() == 0) throw EmptySample("criterion needs a nonempty sample");
    const Eigen::VectorXd t = Eigen::VectorXd::Constant(1, theta);
    const double log_mean = log_mean_density_power(model, t, sample, alpha.value());
    if (!std::isfinite(log_mean))
        throw NonFiniteCriterion("all density powers vanished at this parameter");
    return std::exp(log_mean - model.log_c_alpha(t, alpha.value()));
}

} // namespace robrenyi
