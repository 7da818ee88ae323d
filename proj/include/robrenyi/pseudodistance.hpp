#pragma once

#include <functional>

#include "robrenyi/models.hpp"
#include "robrenyi/quadrature.hpp"

namespace robrenyi {

// Largest admissible pseudodistance order. The finiteness of the criterion
// integrals above this bound is a user obligation; the built-in families are
// all finite up to 2.
inline constexpr double kDefaultBetaMax = 2.0;

// Order of the pseudodistance. Zero selects the log-likelihood branch of
// every criterion.
class Alpha {
public:
    explicit Alpha(double value, double beta_max = kDefaultBetaMax)
        : value_(value), beta_max_(beta_max) {
        if (!(value >= 0.0)) throw UnsupportedAlpha("alpha must be >= 0");
        if (value > beta_max)
            throw UnsupportedAlpha("alpha exceeds the configured beta_max bound");
    }

    double value() const { return value_; }
    double beta_max() const { return beta_max_; }
    bool positive() const { return value_ > 0.0; }

private:
    double value_;
    double beta_max_;
};

enum class CriterionBranch { alpha_positive, log_likelihood };

struct CriterionValue {
    double value = 0.0;
    CriterionBranch branch = CriterionBranch::alpha_positive;
};

// A univariate density with envelope hints for the quadrature layer.
struct Density {
    std::function<double(double)> pdf;
    std::function<double(double)> log_pdf;  // optional, defaults to ln(pdf)
    double center = 0.0;
    double scale = 1.0;
    quad::Domain domain = quad::Domain::real_line;

    double log_at(double x) const;
};

Density normal_density(double mean, double sd);
Density exponential_density(double theta);
Density model_density(const ParametricModel& model, double theta);

// The order-alpha pseudodistance between P and Q, built from the three
// integrals int p^{1+a} dl, int q^{1+a} dl and int p^a q dl; the order-zero
// branch is int ln(q/p) dQ. Slightly negative values within quadrature
// tolerance are possible and are not clamped.
double renyi_pseudodistance(const Density& p, const Density& q, Alpha alpha,
                            const quad::QuadratureSpec& spec);

// Same quantity through the Hoelder-inequality grouping, always evaluated
// with adaptive Simpson. Serves as an independent cross-check route.
double renyi_pseudodistance_holder(const Density& p, const Density& q,
                                   Alpha alpha,
                                   const quad::QuadratureSpec& spec);

// Normalizer C_alpha(theta) = (int p_theta^{1+alpha} dlambda)^{alpha/(1+alpha)}.
// The closed form registered with the model; the _numeric variant integrates
// instead and exists to validate the closed forms.
double c_alpha(const ParametricModel& model, double theta, Alpha alpha);
double c_alpha(const ParametricModel& model, const Eigen::VectorXd& theta, Alpha alpha);
double c_alpha_numeric(const ParametricModel& model, double theta, Alpha alpha,
                       const quad::QuadratureSpec& spec);

// Criterion kernel h(x, theta) = p_theta^alpha(x) / C_alpha(theta).
double h_kernel(const ParametricModel& model, double theta, Alpha alpha, double x);
double h_kernel(const ParametricModel& model, const Eigen::VectorXd& theta,
                Alpha alpha, const Eigen::VectorXd& x);

// Empirical criterion. For alpha > 0,
//   -1/(1+a) ln int p^{1+a} dl + 1/a ln( (1/n) sum p^a(X_i) ),
// whose maximizer matches the normalized form (criterion_form40 below); the
// alpha = 0 branch is the mean log-likelihood.
CriterionValue criterion(const ParametricModel& model, double theta,
                         const Sample& sample, Alpha alpha);
CriterionValue criterion(const ParametricModel& model, const Eigen::VectorXd& theta,
                         const Sample& sample, Alpha alpha);

// C_alpha(theta)^{-1} (1/n) sum p_theta^alpha(X_i) — the same objective up to
// a monotone transform, exposed for argmax-equivalence checks.
double criterion_form40(const ParametricModel& model, double theta,
                        const Sample& sample, Alpha alpha);

} // namespace robrenyi
