#pragma once

#include "robrenyi/pseudodistance.hpp"

namespace robrenyi {

struct SandwichCov {
    Eigen::MatrixXd S;  // minus the expected criterion-kernel Hessian
    Eigen::MatrixXd M;  // expected outer product of the kernel gradient
    Eigen::MatrixXd V;  // S^{-1} M S^{-1}
};

// Limiting covariance of sqrt(n) (theta_hat - theta0). S and M integrate the
// analytic theta-derivatives of h(x, theta) against P_theta0; S must be
// positive definite (SingularS otherwise).
SandwichCov sandwich(const ParametricModel& model, const Eigen::VectorXd& theta0,
                     Alpha alpha, const quad::QuadratureSpec& spec);
SandwichCov sandwich(const ParametricModel& model, double theta0, Alpha alpha,
                     const quad::QuadratureSpec& spec);

// Variance of h(X, theta0) under P_theta0: the limiting variance of
// sqrt(n) (Rhat_alpha - R_alpha).
double sigma2_rhat(const ParametricModel& model, double theta0, Alpha alpha,
                   const quad::QuadratureSpec& spec);
double sigma2_rhat(const ParametricModel& model, const Eigen::VectorXd& theta0,
                   Alpha alpha, const quad::QuadratureSpec& spec);

// Closed-form asymptotic relative efficiency (MLE variance over estimator
// variance). `dim` is required for the multivariate-mean family.
double are(ModelKind kind, Alpha alpha, int dim = 0);

} // namespace robrenyi
