#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "robrenyi/errors.hpp"
#include "robrenyi/quadrature.hpp"

namespace robrenyi {

enum class ModelKind { normal_scale, normal_location, exponential_scale, mvn_mean };

const char* to_string(ModelKind kind);

// Observations, one row per draw. Univariate models use a single column and
// expose it as a contiguous span for the kernel layer.
struct Sample {
    Eigen::MatrixXd points;

    int n() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }
    std::span<const double> univariate() const;
    static Sample from_vector(const std::vector<double>& values);
};

struct ContaminantSpec {
    enum class Kind { model_distribution, point_mass };

    Kind kind = Kind::point_mass;
    Eigen::VectorXd location;  // gaussian mean / point-mass atom
    double scale = 1.0;        // gaussian standard deviation
    double epsilon = 0.0;      // contamination fraction in [0, 0.5)

    static ContaminantSpec gaussian(double mean, double sd, double eps);
    static ContaminantSpec point_mass(double at, double eps);
    static ContaminantSpec point_mass(Eigen::VectorXd at, double eps);

    int contaminated_count(int n) const;  // round(eps * n)
    void validate() const;
};

// One of the four built-in families. theta is the free parameter (sigma for
// normal_scale, m for normal_location, the mean for exponential_scale, the
// mean vector for mvn_mean); everything else is a fixed nuisance.
class ParametricModel {
public:
    static ParametricModel normal_scale(double m);
    static ParametricModel normal_location(double sigma);
    static ParametricModel exponential_scale();
    static ParametricModel mvn_mean(Eigen::MatrixXd cov);

    ModelKind kind() const { return kind_; }
    int theta_dim() const { return theta_dim_; }
    quad::Domain domain() const;
    bool univariate() const { return kind_ != ModelKind::mvn_mean; }

    double fixed_mean() const;        // normal_scale
    double fixed_sigma() const;       // normal_location
    const Eigen::MatrixXd& fixed_cov() const;      // mvn_mean
    const Eigen::MatrixXd& fixed_cov_inverse() const;
    const Eigen::MatrixXd& fixed_cov_cholesky() const;

    void check_theta(double theta) const;
    void check_theta(const Eigen::VectorXd& theta) const;

    // Pointwise evaluation. Densities vanish outside the support instead of
    // erroring; theta outside the open parameter domain raises DomainError.
    double density(double theta, double x) const;
    double log_density(double theta, double x) const;  // -inf off support
    double grad_theta_density(double theta, double x) const;
    double score(double theta, double x) const;        // d log p / d theta
    double score_deriv(double theta, double x) const;  // d^2 log p / d theta^2

    double density(const Eigen::VectorXd& theta, const Eigen::VectorXd& x) const;
    double log_density(const Eigen::VectorXd& theta, const Eigen::VectorXd& x) const;
    Eigen::VectorXd grad_theta_density(const Eigen::VectorXd& theta,
                                       const Eigen::VectorXd& x) const;
    Eigen::VectorXd score(const Eigen::VectorXd& theta, const Eigen::VectorXd& x) const;
    Eigen::MatrixXd score_hessian(const Eigen::VectorXd& theta,
                                  const Eigen::VectorXd& x) const;

    // ln of the integral I(theta) = int p_theta^{1+alpha} dlambda and of the
    // normalizer C_alpha(theta) = I(theta)^{alpha/(1+alpha)}, in closed form.
    double log_power_integral(double theta, double alpha) const;
    double log_power_integral(const Eigen::VectorXd& theta, double alpha) const;
    double log_c_alpha(double theta, double alpha) const;
    double log_c_alpha(const Eigen::VectorXd& theta, double alpha) const;
    // Derivatives of ln C_alpha with respect to theta (zero for the two
    // location-type families).
    double dlog_c_alpha(double theta, double alpha) const;
    double d2log_c_alpha(double theta, double alpha) const;

    // The centering constant of the estimating equation,
    // c(theta) = int p^alpha pdot dlambda / int p^{1+alpha} dlambda.
    double score_centering(double theta, double alpha) const;
    Eigen::VectorXd score_centering(const Eigen::VectorXd& theta, double alpha) const;

    double fisher_information(double theta) const;
    Eigen::MatrixXd fisher_information(const Eigen::VectorXd& theta) const;

    Sample sample(double theta, int n, std::uint64_t seed,
                  std::uint64_t stream = 0) const;
    Sample sample(const Eigen::VectorXd& theta, int n, std::uint64_t seed,
                  std::uint64_t stream = 0) const;
    Sample sample_contaminated(double theta, int n, const ContaminantSpec& spec,
                               std::uint64_t seed, std::uint64_t stream = 0) const;
    Sample sample_contaminated(const Eigen::VectorXd& theta, int n,
                               const ContaminantSpec& spec, std::uint64_t seed,
                               std::uint64_t stream = 0) const;

private:
    ParametricModel() = default;

    double scalar_theta(const Eigen::VectorXd& theta) const;
    void draw_rows(Eigen::MatrixXd& points, int first, int count,
                   const Eigen::VectorXd& theta, class Philox& rng) const;

    ModelKind kind_ = ModelKind::normal_scale;
    int theta_dim_ = 1;
    double fixed_mean_ = 0.0;
    double fixed_sigma_ = 1.0;
    Eigen::MatrixXd cov_, cov_inv_, cov_chol_;
    double log_det_cov_ = 0.0;
};

} // namespace robrenyi
