#include "robrenyi/models.hpp"

#include <cmath>

#include "robrenyi/rng.hpp"

namespace robrenyi {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // ln sqrt(2*pi)
}

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::normal_scale: return "normal-scale";
        case ModelKind::normal_location: return "normal-location";
        case ModelKind::exponential_scale: return "exponential";
        case ModelKind::mvn_mean: return "mvn-mean";
    }
    return "?";
}

std::span<const double> Sample::univariate() const {
    if (dim() != 1) throw DomainError("sample is not univariate");
    return {points.data(), static_cast<std::size_t>(points.rows())};
}

Sample Sample::from_vector(const std::vector<double>& values) {
    Sample s;
    s.points = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                 static_cast<long>(values.size()));
    return s;
}

ContaminantSpec ContaminantSpec::gaussian(double mean, double sd, double eps) {
    ContaminantSpec c;
    c.kind = Kind::model_distribution;
    c.location = Eigen::VectorXd::Constant(1, mean);
    c.scale = sd;
    c.epsilon = eps;
    c.validate();
    return c;
}

ContaminantSpec ContaminantSpec::point_mass(double at, double eps) {
    return point_mass(Eigen::VectorXd::Constant(1, at), eps);
}

ContaminantSpec ContaminantSpec::point_mass(Eigen::VectorXd at, double eps) {
    ContaminantSpec c;
    c.kind = Kind::point_mass;
    c.location = std::move(at);
    c.epsilon = eps;
    c.validate();
    return c;
}

int ContaminantSpec::contaminated_count(int n) const {
    return static_cast<int>(std::lround(epsilon * n));
}

void ContaminantSpec::validate() const {
    if (!(epsilon >= 0.0 && epsilon < 0.5))
        throw std::invalid_argument("contamination fraction must lie in [0, 0.5)");
    if (kind == Kind::model_distribution && !(scale > 0.0))
        throw std::invalid_argument("contaminant scale must be > 0");
}

ParametricModel ParametricModel::normal_scale(double m) {
    ParametricModel model;
    model.kind_ = ModelKind::normal_scale;
    model.fixed_mean_ = m;
    return model;
}

ParametricModel ParametricModel::normal_location(double sigma) {
    if (!(sigma > 0.0)) throw DomainError("fixed sigma must be > 0");
    ParametricModel model;
    model.kind_ = ModelKind::normal_location;
    model.fixed_sigma_ = sigma;
    return model;
}

ParametricModel ParametricModel::exponential_scale() {
    ParametricModel model;
    model.kind_ = ModelKind::exponential_scale;
    return model;
}

ParametricModel ParametricModel::mvn_mean(Eigen::MatrixXd cov) {
    if (cov.rows() != cov.cols() || cov.rows() < 1)
        throw DomainError("covariance must be square");
    if (!cov.isApprox(cov.transpose(), 1e-12))
        throw DomainError("covariance must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw DomainError("covariance must be positive definite");
    ParametricModel model;
    model.kind_ = ModelKind::mvn_mean;
    model.theta_dim_ = static_cast<int>(cov.rows());
    model.cov_ = std::move(cov);
    model.cov_chol_ = llt.matrixL();
    model.cov_inv_ = llt.solve(Eigen::MatrixXd::Identity(model.theta_dim_, model.theta_dim_));
    model.log_det_cov_ = 2.0 * model.cov_chol_.diagonal().array().log().sum();
    return model;
}

quad::Domain ParametricModel::domain() const {
    return kind_ == ModelKind::exponential_scale ? quad::Domain::half_line
                                                 : quad::Domain::real_line;
}

double ParametricModel::fixed_mean() const {
    if (kind_ != ModelKind::normal_scale) throw DomainError("model has no fixed mean");
    return fixed_mean_;
}

double ParametricModel::fixed_sigma() const {
    if (kind_ != ModelKind::normal_location) throw DomainError("model has no fixed sigma");
    return fixed_sigma_;
}

const Eigen::MatrixXd& ParametricModel::fixed_cov() const {
    if (kind_ != ModelKind::mvn_mean) throw DomainError("model has no fixed covariance");
    return cov_;
}

const Eigen::MatrixXd& ParametricModel::fixed_cov_inverse() const {
    if (kind_ != ModelKind::mvn_mean) throw DomainError("model has no fixed covariance");
    return cov_inv_;
}

const Eigen::MatrixXd& ParametricModel::fixed_cov_cholesky() const {
    if (kind_ != ModelKind::mvn_mean) throw DomainError("model has no fixed covariance");
    return cov_chol_;
}

void ParametricModel::check_theta(double theta) const {
    switch (kind_) {
        case ModelKind::normal_scale:
        case ModelKind::exponential_scale:
            if (!(theta > 0.0)) throw DomainError("scale parameter must be > 0");
            break;
        case ModelKind::normal_location:
            if (!std::isfinite(theta)) throw DomainError("location parameter must be finite");
            break;
        case ModelKind::mvn_mean:
            throw DomainError("mvn-mean parameter is a vector");
    }
}

void ParametricModel::check_theta(const Eigen::VectorXd& theta) const {
    if (kind_ == ModelKind::mvn_mean) {
        if (theta.size() != theta_dim_) throw DomainError("parameter dimension mismatch");
        if (!theta.allFinite()) throw DomainError("parameter must be finite");
        return;
    }
    if (theta.size() != 1) throw DomainError("parameter dimension mismatch");
    check_theta(theta(0));
}

double ParametricModel::scalar_theta(const Eigen::VectorXd& theta) const {
    if (theta.size() != 1) throw DomainError("parameter dimension mismatch");
    return theta(0);
}

double ParametricModel::log_density(double theta, double x) const {
    check_theta(theta);
    switch (kind_) {
        case ModelKind::normal_scale: {
            const double u = (x - fixed_mean_) / theta;
            return -std::log(theta) - kLogSqrt2Pi - 0.5 * u * u;
        }
        case ModelKind::normal_location: {
            const double u = (x - theta) / fixed_sigma_;
            return -std::log(fixed_sigma_) - kLogSqrt2Pi - 0.5 * u * u;
        }
        case ModelKind::exponential_scale:
            if (x < 0.0) return -std::numeric_limits<double>::infinity();
            return -std::log(theta) - x / theta;
        case ModelKind::mvn_mean:
            throw DomainError("mvn-mean expects vector arguments");
    }
    return 0.0;
}

double ParametricModel::density(double theta, double x) const {
    return std::exp(log_density(theta, x));
}

double ParametricModel::score(double theta, double x) const {
    check_theta(theta);
    switch (kind_) {
        case ModelKind::normal_scale: {
            const double u = (x - fixed_mean_) / theta;
            return (u * u - 1.0) / theta;
        }
        case ModelKind::normal_location:
            return (x - theta) / (fixed_sigma_ * fixed_sigma_);
        case ModelKind::exponential_scale:
            return x < 0.0 ? 0.0 : (x - theta) / (theta * theta);
        case ModelKind::mvn_mean:
            throw DomainError("mvn-mean expects vector arguments");
    }
    return 0.0;
}

double ParametricModel::score_deriv(double theta, double x) const {
    check_theta(theta);
    switch (kind_) {
        case ModelKind::normal_scale: {
            const double u = (x - fixed_mean_) / theta;
            return (1.0 - 3.0 * u * u) / (theta * theta);
        }
        case ModelKind::normal_location:
            return -1.0 / (fixed_sigma_ * fixed_sigma_);
        case ModelKind::exponential_scale:
            return x < 0.0 ? 0.0 : 1.0 / (theta * theta) - 2.0 * x / (theta * theta * theta);
        case ModelKind::mvn_mean:
            throw DomainError("mvn-mean expects vector arguments");
    }
    return 0.0;
}

double ParametricModel::grad_theta_density(double theta, double x) const {
    const double p = density(theta, x);
    return p == 0.0 ? 0.0 : p * score(theta, x);
}

double ParametricModel::log_density(const Eigen::VectorXd& theta,
                                    const Eigen::VectorXd& x) const {
    if (kind_ != ModelKind::mvn_mean) {
        if (x.size() != 1) throw DomainError("observation dimension mismatch");
        return log_density(scalar_theta(theta), x(0));
    }
    check_theta(theta);
    if (x.size() != theta_dim_) throw DomainError("observation dimension mismatch");
    const Eigen::VectorXd d = x - theta;
    const double q = d.dot(cov_inv_ * d);
    return -0.5 * (theta_dim_ * 2.0 * kLogSqrt2Pi + log_det_cov_ + q);
}

double ParametricModel::density(const Eigen::VectorXd& theta,
                                const Eigen::VectorXd& x) const {
    return std::exp(log_density(theta, x));
}

Eigen::VectorXd ParametricModel::score(const Eigen::VectorXd& theta,
                                       const Eigen::VectorXd& x) const {
    if (kind_ != ModelKind::mvn_mean)
        return Eigen::VectorXd::Constant(1, score(scalar_theta(theta), x(0)));
    check_theta(theta);
    return cov_inv_ * (x - theta);
}

Eigen::MatrixXd ParametricModel::score_hessian(const Eigen::VectorXd& theta,
                                               const Eigen::VectorXd& x) const {
    if (kind_ != ModelKind::mvn_mean)
        return Eigen::MatrixXd::Constant(1, 1, score_deriv(scalar_theta(theta), x(0)));
    check_theta(theta);
    return -cov_inv_;
}

Eigen::VectorXd ParametricModel::grad_theta_density(const Eigen::VectorXd& theta,
                                                    const Eigen::VectorXd& x) const {
    const double p = density(theta, x);
    if (p == 0.0) return Eigen::VectorXd::Zero(theta_dim_);
    return p * score(theta, x);
}

double ParametricModel::log_power_integral(double theta, double alpha) const {
    check_theta(theta);
    switch (kind_) {
        case ModelKind::normal_scale:
            return -alpha * (std::log(theta) + kLogSqrt2Pi) - 0.5 * std::log1p(alpha);
        case ModelKind::normal_location:
            return -alpha * (std::log(fixed_sigma_) + kLogSqrt2Pi) - 0.5 * std::log1p(alpha);
        case ModelKind::exponential_scale:
            return -alpha * std::log(theta) - std::log1p(alpha);
        case ModelKind::mvn_mean:
            throw DomainError("mvn-mean expects vector arguments");
    }
    return 0.0;
}

double ParametricModel::log_power_integral(const Eigen::VectorXd& theta,
                                           double alpha) const {
    if (kind_ != ModelKind::mvn_mean) return log_power_integral(scalar_theta(theta), alpha);
    check_theta(theta);
    return -0.5 * alpha * (theta_dim_ * 2.0 * kLogSqrt2Pi + log_det_cov_) -
           0.5 * theta_dim_ * std::log1p(alpha);
}

double ParametricModel::log_c_alpha(double theta, double alpha) const {
    return alpha / (1.0 + alpha) * log_power_integral(theta, alpha);
}

double ParametricModel::log_c_alpha(const Eigen::VectorXd& theta, double alpha) const {
    return alpha / (1.0 + alpha) * log_power_integral(theta, alpha);
}

double ParametricModel::dlog_c_alpha(double theta, double alpha) const {
    check_theta(theta);
    switch (kind_) {
        case ModelKind::normal_scale:
        case ModelKind::exponential_scale:
            return -alpha * alpha / ((1.0 + alpha) * theta);
        case ModelKind::normal_location:
            return 0.0;
        case ModelKind::mvn_mean:
            throw DomainError("mvn-mean expects vector arguments");
    }
    return 0.0;
}

double ParametricModel::d2log_c_alpha(double theta, double alpha) const {
    check_theta(theta);
    switch (kind_) {
        case ModelKind::normal_scale:
        case ModelKind::exponential_scale:
            return alpha * alpha / ((1.0 + alpha) * theta * theta);
        case ModelKind::normal_location:
            return 0.0;
        case ModelKind::mvn_mean:
            throw DomainError("mvn-mean expects vector arguments");
    }
    return 0.0;
}

double ParametricModel::score_centering(double theta, double alpha) const {
    check_theta(theta);
    switch (kind_) {
        case ModelKind::normal_scale:
        case ModelKind::exponential_scale:
            return -alpha / ((1.0 + alpha) * theta);
        case ModelKind::normal_location:
            return 0.0;
        case ModelKind::mvn_mean:
            throw DomainError("mvn-mean expects vector arguments");
    }
    return 0.0;
}

Eigen::VectorXd ParametricModel::score_centering(const Eigen::VectorXd& theta,
                                                 double alpha) const {
    if (kind_ != ModelKind::mvn_mean)
        return Eigen::VectorXd::Constant(1, score_centering(scalar_theta(theta), alpha));
    check_theta(theta);
    return Eigen::VectorXd::Zero(theta_dim_);
}

double ParametricModel::fisher_information(double theta) const {
    check_theta(theta);
    switch (kind_) {
        case ModelKind::normal_scale:
            return 2.0 / (theta * theta);
        case ModelKind::normal_location:
            return 1.0 / (fixed_sigma_ * fixed_sigma_);
        case ModelKind::exponential_scale:
            return 1.0 / (theta * theta);
        case ModelKind::mvn_mean:
            throw DomainError("mvn-mean expects vector arguments");
    }
    return 0.0;
}

Eigen::MatrixXd ParametricModel::fisher_information(const Eigen::VectorXd& theta) const {
    if (kind_ != ModelKind::mvn_mean)
        return Eigen::MatrixXd::Constant(1, 1, fisher_information(scalar_theta(theta)));
    check_theta(theta);
    return cov_inv_;
}

Sample ParametricModel::sample(double theta, int n, std::uint64_t seed,
                               std::uint64_t stream) const {
    return sample(Eigen::VectorXd::Constant(1, theta), n, seed, stream);
}

void ParametricModel::draw_rows(Eigen::MatrixXd& points, int first, int count,
                                const Eigen::VectorXd& theta, Philox& rng) const {
    if (kind_ == ModelKind::mvn_mean) {
        Eigen::VectorXd z(theta_dim_);
        for (int i = first; i < first + count; ++i) {
            for (int d = 0; d < theta_dim_; ++d) z(d) = rng.normal();
            points.row(i) = (theta + cov_chol_ * z).transpose();
        }
        return;
    }
    const double t = theta(0);
    switch (kind_) {
        case ModelKind::normal_scale:
            for (int i = first; i < first + count; ++i)
                points(i, 0) = fixed_mean_ + t * rng.normal();
            break;
        case ModelKind::normal_location:
            for (int i = first; i < first + count; ++i)
                points(i, 0) = t + fixed_sigma_ * rng.normal();
            break;
        case ModelKind::exponential_scale:
            for (int i = first; i < first + count; ++i) points(i, 0) = rng.exponential(t);
            break;
        case ModelKind::mvn_mean:
            break;
    }
}

Sample ParametricModel::sample(const Eigen::VectorXd& theta, int n,
                               std::uint64_t seed, std::uint64_t stream) const {
    check_theta(theta);
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");
    Philox rng(seed, stream);
    Sample out;
    out.points.resize(n, univariate() ? 1 : theta_dim_);
    draw_rows(out.points, 0, n, theta, rng);
    return out;
}

Sample ParametricModel::sample_contaminated(double theta, int n,
                                            const ContaminantSpec& spec,
                                            std::uint64_t seed,
                                            std::uint64_t stream) const {
    return sample_contaminated(Eigen::VectorXd::Constant(1, theta), n, spec, seed, stream);
}

Sample ParametricModel::sample_contaminated(const Eigen::VectorXd& theta, int n,
                                            const ContaminantSpec& spec,
                                            std::uint64_t seed,
                                            std::uint64_t stream) const {
    check_theta(theta);
    spec.validate();
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");
    const int k = spec.contaminated_count(n);
    if (k >= n) throw std::invalid_argument("contaminated count must be < n");
    if (spec.location.size() != (univariate() ? 1 : theta_dim_))
        throw std::invalid_argument("contaminant dimension mismatch");
    if (spec.kind == ContaminantSpec::Kind::model_distribution && !univariate())
        throw std::invalid_argument("distribution contaminants are univariate only");

    // Clean draws occupy the first n-k rows, contaminant draws the trailing k;
    // the estimators are permutation invariant so the layout is just a fixed,
    // reproducible convention.
    Philox rng(seed, stream);
    Sample out;
    out.points.resize(n, univariate() ? 1 : theta_dim_);
    draw_rows(out.points, 0, n - k, theta, rng);
    for (int i = n - k; i < n; ++i) {
        if (spec.kind == ContaminantSpec::Kind::point_mass) {
            out.points.row(i) = spec.location.transpose();
        } else {
            out.points(i, 0) = spec.location(0) + spec.scale * rng.normal();
        }
    }
    return out;
}

} // namespace robrenyi
