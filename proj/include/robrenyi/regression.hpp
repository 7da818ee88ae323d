#pragma once

#include "robrenyi/estimation.hpp"

namespace robrenyi {

struct RegressionData {
    Eigen::MatrixXd X;  // n x p design
    Eigen::VectorXd Y;  // n responses

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
    void validate() const;
};

struct RegressionFit {
    Eigen::VectorXd beta_hat;
    double sigma_hat = 0.0;
    Eigen::VectorXd weights;  // exp(-alpha u_i^2 / 2) at the solution
    bool converged = false;
    int iterations = 0;
    double system_residual = 0.0;  // norm of the estimating system at the fit
};

// phi(u) = u exp(-alpha u^2/2) and chi(u) = (u^2 - 1/(alpha+1)) exp(-alpha u^2/2):
// the two components of the regression estimating system, both redescending.
double phi_weight(double u, double alpha);
double chi_weight(double u, double alpha);

// Joint fit of (beta, sigma) in the Gaussian linear model. alpha = 0 is
// ordinary least squares with the maximum-likelihood scale. For alpha > 0 the
// fit alternates weighted least squares on beta (weights exp(-alpha u^2/2),
// with step halving when the criterion does not improve) with a bracketed
// root solve for sigma on the log scale, from an OLS start and a robust
// OLS+MAD start.
RegressionFit fit_regression(const RegressionData& data, Alpha alpha,
                             const SolverOptions& opts = {});

// Closed-form asymptotic covariance of sqrt(n) ((beta_hat, sigma_hat) - (beta,
// sigma)): block diagonal with
//   sigma^2 (alpha+1)^3 / (2 alpha+1)^{3/2} V_X^{-1}
// for beta and
//   sigma^2 (alpha+1)^3 (3 alpha^2+4 alpha+2) / (4 (2 alpha+1)^{5/2})
// for sigma.
Eigen::MatrixXd regression_asymptotic_cov(const Eigen::MatrixXd& v_x, double sigma,
                                          Alpha alpha);

// Influence functions of the beta- and sigma-functionals at a contamination
// point (x0, y0); the beta part is bounded in y0 and the sigma part is
// bounded in both arguments.
std::pair<Eigen::VectorXd, double> regression_influence(
    const Eigen::VectorXd& x0, double y0, const Eigen::VectorXd& beta,
    double sigma, const Eigen::MatrixXd& v_x, Alpha alpha);

} // namespace robrenyi
