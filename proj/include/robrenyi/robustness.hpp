#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "robrenyi/pseudodistance.hpp"

namespace robrenyi {

struct RobustnessReport {
    double alpha = 0.0;
    std::vector<std::pair<double, double>> if_values;  // (x, IF(x))
    double ges = 0.0;                                  // +inf at alpha = 0
    double are = 0.0;
    std::optional<std::pair<double, double>> most_brobust;  // (alpha*, ges*)
};

// Influence function of the minimum-pseudodistance functional at P_theta,
//   IF(x) = M_alpha(theta)^{-1} p^alpha(x) [score(x) - c(theta)],
// with M_alpha evaluated by quadrature over the Lebesgue measure. This is the
// general route; the _closed variants below evaluate the per-family printed
// forms and the two must agree.
Eigen::VectorXd influence_general(const ParametricModel& model,
                                  const Eigen::VectorXd& theta, Alpha alpha,
                                  const Eigen::VectorXd& x,
                                  const quad::QuadratureSpec& spec);
double influence_general(const ParametricModel& model, double theta, Alpha alpha,
                         double x, const quad::QuadratureSpec& spec);

double influence_closed(const ParametricModel& model, double theta, Alpha alpha,
                        double x);
Eigen::VectorXd influence_closed(const ParametricModel& model,
                                 const Eigen::VectorXd& theta, Alpha alpha,
                                 const Eigen::VectorXd& x);

// Gross error sensitivity sup_x |IF|, in closed form for the three univariate
// families. Returns +infinity at alpha = 0, where the score is unbounded and
// the MLE is not B-robust.
double ges(const ParametricModel& model, double theta, Alpha alpha);

// Minimizes ges over alpha by golden section (to 1e-5) on the given interval,
// which must sit inside (0, beta_max].
std::pair<double, double> most_brobust_alpha(const ParametricModel& model,
                                             double theta,
                                             std::pair<double, double> interval);

// The location-model psi function: the theta-derivative of the criterion
// kernel h(x, m), redescending in x for alpha > 0.
double psi_location(double x, double m, double sigma, double alpha);

RobustnessReport robustness_report(const ParametricModel& model, double theta,
                                   Alpha alpha, const std::vector<double>& x_grid);

} // namespace robrenyi
