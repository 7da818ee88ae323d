#include "robrenyi/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "robrenyi/kernels.hpp"
#include "robrenyi/solve.hpp"

namespace robrenyi {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kMadToSigma = 1.0 / 0.6745;

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (n % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    return 0.5 * (v[mid - 1] + hi);
}

double median_abs_deviation(std::span<const double> x, double center) {
    std::vector<double> dev(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dev[i] = std::abs(x[i] - center);
    return median(std::move(dev));
}

struct StartSet {
    std::vector<double> points;
    double robust = 0.0;
};

// MLE, robust point and dispersed grid values, capped at n_starts.
StartSet scale_like_starts(double mle, double robust, const SolverOptions& opts) {
    StartSet s;
    s.robust = robust;
    switch (opts.start_strategy) {
        case StartStrategy::mle_start:
            s.points = {mle};
            break;
        case StartStrategy::grid:
            s.points = {robust * 0.25, robust, robust * 4.0, mle, robust * 16.0};
            break;
        case StartStrategy::robust_start:
            s.points = {mle, robust, robust * 0.25, robust * 2.0, robust * 8.0};
            break;
    }
    if (static_cast<int>(s.points.size()) > opts.n_starts)
        s.points.resize(opts.n_starts);
    return s;
}

StartSet location_starts(double mle, double robust, double spread,
                         const SolverOptions& opts) {
    StartSet s;
    s.robust = robust;
    switch (opts.start_strategy) {
        case StartStrategy::mle_start:
            s.points = {mle};
            break;
        case StartStrategy::grid:
            s.points = {robust - 3.0 * spread, robust, robust + 3.0 * spread, mle,
                        0.5 * (mle + robust)};
            break;
        case StartStrategy::robust_start:
            s.points = {mle, robust, robust - 2.0 * spread, robust + 2.0 * spread,
                        0.5 * (mle + robust)};
            break;
    }
    if (static_cast<int>(s.points.size()) > opts.n_starts)
        s.points.resize(opts.n_starts);
    return s;
}

struct Candidate {
    double theta = 0.0;
    double criterion = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
};

// The three univariate score equations, each expressed as a ratio of shifted
// moment sums so they stay finite at extreme parameters. `g` is proportional
// to the criterion derivative in the working coordinate (log sigma for scale
// parameters, m itself for the location).
struct ScoreEval {
    double g = 0.0;
    double dg = 0.0;
};

ScoreEval score_normal_scale(std::span<const double> x, double m, double s_log,
                             double alpha) {
    const double sigma = std::exp(s_log);
    const auto sm = kernels::stable_gaussian_moments(x, m, sigma, alpha);
    const double r2 = sm.moments.s2 / sm.moments.s0;
    const double r4 = sm.moments.s4 / sm.moments.s0;
    return {r2 - 1.0 / (1.0 + alpha), alpha * r4 - 2.0 * r2 - alpha * r2 * r2};
}

ScoreEval score_exponential(std::span<const double> x, double t_log, double alpha) {
    const double theta = std::exp(t_log);
    const auto sm = kernels::stable_exp_decay_moments(x, theta, alpha);
    if (!(sm.moments.s0 > 0.0))
        return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    const double r1 = sm.moments.s1 / sm.moments.s0;
    const double r2 = sm.moments.s2 / sm.moments.s0;
    return {r1 - 1.0 / (1.0 + alpha), alpha * r2 - r1 - alpha * r1 * r1};
}

ScoreEval score_normal_location(std::span<const double> x, double m, double sigma,
                                double alpha) {
    const auto sm = kernels::stable_gaussian_moments(x, m, sigma, alpha);
    const double r1 = sm.moments.s1 / sm.moments.s0;
    const double r2 = sm.moments.s2 / sm.moments.s0;
    return {r1, (alpha * r2 - 1.0 - alpha * r1 * r1) / sigma};
}

EstimatorResult mle_closed_form(const ParametricModel& model, const Sample& sample) {
    EstimatorResult out;
    out.starts_tried = 1;
    out.converged = true;
    Eigen::VectorXd theta;
    switch (model.kind()) {
        case ModelKind::normal_location:
            theta = Eigen::VectorXd::Constant(1, sample.points.col(0).mean());
            break;
        case ModelKind::normal_scale: {
            const double m = model.fixed_mean();
            const double msq =
                (sample.points.col(0).array() - m).square().mean();
            if (!(msq > 0.0))
                throw DegenerateSample("all observations equal the fixed mean");
            theta = Eigen::VectorXd::Constant(1, std::sqrt(msq));
            break;
        }
        case ModelKind::exponential_scale: {
            const double mean = sample.points.col(0).mean();
            if (!(mean > 0.0))
                throw DegenerateSample("nonpositive sample mean for the exponential scale");
            theta = Eigen::VectorXd::Constant(1, mean);
            break;
        }
        case ModelKind::mvn_mean:
            theta = sample.points.colwise().mean().transpose();
            break;
    }
    out.theta_hat = theta;
    out.criterion_at_opt = criterion(model, theta, sample, Alpha(0.0)).value;
    return out;
}

Candidate solve_univariate_start(const ParametricModel& model, const Sample& sample,
                                 double alpha, double start, double limit_lo,
                                 double limit_hi, double initial_step,
                                 const SolverOptions& opts, bool log_coordinate) {
    const auto x = sample.univariate();
    auto eval = [&](double z) -> ScoreEval {
        switch (model.kind()) {
            case ModelKind::normal_scale:
                return score_normal_scale(x, model.fixed_mean(), z, alpha);
            case ModelKind::exponential_scale:
                return score_exponential(x, z, alpha);
            case ModelKind::normal_location:
                return score_normal_location(x, z, model.fixed_sigma(), alpha);
            default:
                throw UnsupportedModel("not a univariate family");
        }
    };
    auto g_only = [&](double z) { return eval(z).g; };
    auto g_and_dg = [&](double z) {
        const ScoreEval e = eval(z);
        return std::make_pair(e.g, e.dg);
    };

    const auto bracket = solve::bracket_root(g_only, start, limit_lo, limit_hi,
                                             initial_step);
    if (!bracket) throw NoConvergence("no sign change around this start");
    const double x_tol = 1e-12 * std::max(1.0, std::abs(bracket->second));
    const auto root = solve::safeguarded_newton(g_and_dg, bracket->first,
                                                bracket->second, start, x_tol,
                                                opts.tol, opts.max_iter);
    if (!root.converged) throw NoConvergence("safeguarded Newton failed");

    Candidate cand;
    cand.theta = log_coordinate ? std::exp(root.x) : root.x;
    cand.iterations = root.iterations;
    cand.criterion = criterion(model, cand.theta, sample, Alpha(alpha)).value;
    // |g| converts to the criterion gradient in theta units
    if (model.kind() == ModelKind::normal_location)
        cand.gradient_norm = alpha * std::abs(root.g) / model.fixed_sigma();
    else
        cand.gradient_norm = std::abs(root.g) / cand.theta;
    return cand;
}

EstimatorResult pick_best(std::vector<Candidate> candidates, double robust_start,
                          int starts_tried) {
    if (candidates.empty())
        throw NoConvergence("every start failed to converge");
    const Candidate* best = &candidates.front();
    for (const Candidate& c : candidates) {
        if (c.criterion > best->criterion + 1e-10) {
            best = &c;
        } else if (std::abs(c.criterion - best->criterion) <= 1e-10 &&
                   std::abs(c.theta - robust_start) <
                       std::abs(best->theta - robust_start)) {
            best = &c;
        }
    }
    EstimatorResult out;
    out.theta_hat = Eigen::VectorXd::Constant(1, best->theta);
    out.criterion_at_opt = best->criterion;
    out.iterations = best->iterations;
    out.starts_tried = starts_tried;
    out.converged = true;
    out.gradient_norm = best->gradient_norm;
    return out;
}

EstimatorResult fit_univariate(const ParametricModel& model, const Sample& sample,
                               double alpha, const SolverOptions& opts) {
    const auto x = sample.univariate();
    StartSet starts;
    double limit_lo, limit_hi, initial_step;
    bool log_coordinate;

    switch (model.kind()) {
        case ModelKind::normal_scale: {
            const double m = model.fixed_mean();
            const double mad = median_abs_deviation(x, m);
            const double mle =
                std::sqrt((sample.points.col(0).array() - m).square().mean());
            if (!(mle > 0.0))
                throw DegenerateSample("all observations equal the fixed mean");
            const double robust = mad > 0.0 ? mad * kMadToSigma : mle;
            starts = scale_like_starts(mle, robust, opts);
            for (double& s : starts.points) s = std::log(s);
            starts.robust = std::log(starts.robust);
            const double anchor = std::log(std::min(robust, mle));
            limit_lo = anchor - std::log(1e4);
            limit_hi = std::log(std::max(robust, mle)) + std::log(1e4);
            initial_step = 0.5 * std::log(2.0);
            log_coordinate = true;
            break;
        }
        case ModelKind::exponential_scale: {
            const double mle = sample.points.col(0).mean();
            if (!(mle > 0.0))
                throw DegenerateSample("nonpositive sample mean for the exponential scale");
            std::vector<double> vals(x.begin(), x.end());
            const double med = median(std::move(vals));
            const double robust = med > 0.0 ? med / std::log(2.0) : mle;
            starts = scale_like_starts(mle, robust, opts);
            for (double& s : starts.points) s = std::log(s);
            starts.robust = std::log(starts.robust);
            limit_lo = std::log(std::min(robust, mle)) - std::log(1e4);
            limit_hi = std::log(std::max(robust, mle)) + std::log(1e4);
            initial_step = 0.5 * std::log(2.0);
            log_coordinate = true;
            break;
        }
        case ModelKind::normal_location: {
            std::vector<double> vals(x.begin(), x.end());
            const double med = median(std::move(vals));
            const double mad = median_abs_deviation(x, med);
            const double spread =
                std::max(mad * kMadToSigma, 0.1 * model.fixed_sigma());
            const double mle = sample.points.col(0).mean();
            starts = location_starts(mle, med, spread, opts);
            const double lo = *std::min_element(x.begin(), x.end());
            const double hi = *std::max_element(x.begin(), x.end());
            limit_lo = lo - spread;
            limit_hi = hi + spread;
            initial_step = 0.75 * spread;
            log_coordinate = false;
            break;
        }
        default:
            throw UnsupportedModel("not a univariate family");
    }

    std::vector<Candidate> candidates;
    int tried = 0;
    for (double s : starts.points) {
        ++tried;
        try {
            candidates.push_back(solve_univariate_start(
                model, sample, alpha, s, limit_lo, limit_hi, initial_step, opts,
                log_coordinate));
        } catch (const NoConvergence&) {
            // a start may sit in a basin without a root; others still count
        }
    }
    const double robust_theta =
        log_coordinate ? std::exp(starts.robust) : starts.robust;
    return pick_best(std::move(candidates), robust_theta, tried);
}

EstimatorResult fit_mvn(const ParametricModel& model, const Sample& sample,
                        double alpha, const SolverOptions& opts) {
    const int p = model.theta_dim();
    const int n = sample.n();
    const Eigen::MatrixXd& vinv = model.fixed_cov_inverse();

    Eigen::VectorXd mean = sample.points.colwise().mean().transpose();
    Eigen::VectorXd med(p);
    for (int d = 0; d < p; ++d) {
        std::vector<double> col(sample.points.col(d).data(),
                                sample.points.col(d).data() + n);
        med(d) = median(std::move(col));
    }

    std::vector<Eigen::VectorXd> starts = {med, mean, 0.5 * (med + mean),
                                           med + 2.0 * (mean - med),
                                           med - (mean - med)};
    if (static_cast<int>(starts.size()) > opts.n_starts) starts.resize(opts.n_starts);
    if (opts.start_strategy == StartStrategy::mle_start) starts = {mean};

    struct VecCandidate {
        Eigen::VectorXd theta;
        double criterion;
        double gradient_norm;
        int iterations;
    };
    std::vector<VecCandidate> candidates;

    Eigen::VectorXd w(n), q(n);
    auto weights_at = [&](const Eigen::VectorXd& m) {
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd d = sample.points.row(i).transpose() - m;
            q(i) = d.dot(vinv * d);
        }
        const double qmin = q.minCoeff();
        for (int i = 0; i < n; ++i) w(i) = std::exp(-0.5 * alpha * (q(i) - qmin));
    };

    int tried = 0;
    for (const Eigen::VectorXd& start : starts) {
        ++tried;
        Eigen::VectorXd m = start;
        double crit = criterion(model, m, sample, Alpha(alpha)).value;
        bool ok = false;
        double gnorm = 0.0;
        int it = 0;
        for (; it < opts.max_iter; ++it) {
            weights_at(m);
            const double wsum = w.sum();
            const Eigen::VectorXd shift =
                (sample.points.transpose() * w) / wsum - m;
            gnorm = (vinv * shift).norm();
            if (gnorm < opts.tol) {
                ok = true;
                break;
            }
            // Mean-shift step with halving when the criterion drops; the
            // redescending weights make plain fixed-point iteration oscillate
            // on multimodal samples.
            double t = 1.0;
            bool improved = false;
            for (int h = 0; h < 20; ++h, t *= 0.5) {
                const Eigen::VectorXd trial = m + t * shift;
                const double trial_crit =
                    criterion(model, trial, sample, Alpha(alpha)).value;
                if (trial_crit >= crit - 1e-15) {
                    m = trial;
                    crit = trial_crit;
                    improved = true;
                    break;
                }
            }
            if (!improved) break;
        }
        if (ok) candidates.push_back({m, crit, gnorm, it});
    }
    if (candidates.empty()) throw NoConvergence("every start failed to converge");

    const VecCandidate* best = &candidates.front();
    for (const VecCandidate& c : candidates) {
        if (c.criterion > best->criterion + 1e-10) best = &c;
        else if (std::abs(c.criterion - best->criterion) <= 1e-10 &&
                 (c.theta - med).norm() < (best->theta - med).norm())
            best = &c;
    }
    EstimatorResult out;
    out.theta_hat = best->theta;
    out.criterion_at_opt = best->criterion;
    out.iterations = best->iterations;
    out.starts_tried = tried;
    out.converged = true;
    out.gradient_norm = best->gradient_norm;
    return out;
}

} // namespace

EstimatorResult fit_min_r_alpha(const ParametricModel& model, const Sample& sample,
                                Alpha alpha, const SolverOptions& opts) {
    opts.validate();
    if (sample.n() == 0) throw EmptySample("fit needs a nonempty sample");
    if (sample.dim() != (model.univariate() ? 1 : model.theta_dim()))
        throw DomainError("sample dimension mismatch");
    if (!alpha.positive()) return mle_closed_form(model, sample);
    if (model.kind() == ModelKind::mvn_mean)
        return fit_mvn(model, sample, alpha.value(), opts);
    return fit_univariate(model, sample, alpha.value(), opts);
}

Eigen::VectorXd estimating_equation(const ParametricModel& model,
                                    const Eigen::VectorXd& theta,
                                    const Sample& sample, Alpha alpha) {
    if (!alpha.positive())
        throw UnsupportedAlpha("the estimating equation is defined for alpha > 0");
    model.check_theta(theta);
    if (sample.n() == 0) throw EmptySample("estimating equation needs a sample");
    const double a = alpha.value();
    const double n = sample.n();

    switch (model.kind()) {
        case ModelKind::normal_scale: {
            const double sigma = theta(0);
            const auto sm = kernels::stable_gaussian_moments(
                sample.univariate(), model.fixed_mean(), sigma, a);
            const double factor =
                std::exp(-a * (std::log(sigma) + kLogSqrt2Pi) - sm.log_shift);
            const double value = factor / (n * sigma) *
                                 (sm.moments.s2 - sm.moments.s0 / (1.0 + a));
            return Eigen::VectorXd::Constant(1, value);
        }
        case ModelKind::normal_location: {
            const double sigma = model.fixed_sigma();
            const auto sm = kernels::stable_gaussian_moments(sample.univariate(),
                                                             theta(0), sigma, a);
            const double factor =
                std::exp(-a * (std::log(sigma) + kLogSqrt2Pi) - sm.log_shift);
            return Eigen::VectorXd::Constant(1,
                                             factor / (n * sigma) * sm.moments.s1);
        }
        case ModelKind::exponential_scale: {
            const double th = theta(0);
            const auto sm =
                kernels::stable_exp_decay_moments(sample.univariate(), th, a);
            const double factor = std::exp(-a * std::log(th) - sm.log_shift);
            const double value = factor / (n * th) *
                                 (sm.moments.s1 - sm.moments.s0 / (1.0 + a));
            return Eigen::VectorXd::Constant(1, value);
        }
        case ModelKind::mvn_mean: {
            const Eigen::MatrixXd& vinv = model.fixed_cov_inverse();
            Eigen::VectorXd q(sample.n());
            for (int i = 0; i < sample.n(); ++i) {
                const Eigen::VectorXd d = sample.points.row(i).transpose() - theta;
                q(i) = d.dot(vinv * d);
            }
            const double qmin = q.minCoeff();
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(model.theta_dim());
            for (int i = 0; i < sample.n(); ++i) {
                const double w = std::exp(-0.5 * a * (q(i) - qmin));
                acc += w * (sample.points.row(i).transpose() - theta);
            }
            const double log_k =
                a * model.log_density(theta, theta) - 0.5 * a * qmin;
            return std::exp(log_k) / n * (vinv * acc);
        }
    }
    throw std::logic_error("unreachable");
}

double estimating_equation(const ParametricModel& model, double theta,
                           const Sample& sample, Alpha alpha) {
    return estimating_equation(model, Eigen::VectorXd::Constant(1, theta), sample,
                               alpha)(0);
}

EstimatorResult fit_basu_dpd(const Sample& sample, Alpha alpha, double m,
                             const SolverOptions& opts) {
    opts.validate();
    if (sample.n() == 0) throw EmptySample("fit needs a nonempty sample");
    if (sample.dim() != 1) throw DomainError("the power divergence fit is univariate");
    const auto x = sample.univariate();
    const double a = alpha.value();
    const double n = sample.n();
    const double s_mle = std::sqrt((sample.points.col(0).array() - m).square().mean());
    if (!(s_mle > 0.0)) throw DegenerateSample("all observations equal the fixed mean");

    EstimatorResult out;
    out.starts_tried = 1;
    if (!alpha.positive()) {
        out.theta_hat = Eigen::VectorXd::Constant(1, s_mle);
        out.converged = true;
        const ParametricModel model = ParametricModel::normal_scale(m);
        out.criterion_at_opt = criterion(model, s_mle, sample, alpha).value;
        return out;
    }

    auto g = [&](double sigma) {
        const auto sums = kernels::gaussian_power_moments(x, m, sigma, a);
        return a / std::pow(1.0 + a, 1.5) + (sums.s2 - sums.s0) / n;
    };

    // log-spaced scan over the spec'd bracket, then Brent on the first sign
    // change
    const double lo = 1e-3 * s_mle, hi = 1e3 * s_mle;
    const int scan = 121;
    double prev_s = lo, prev_g = g(lo);
    double root_lo = 0.0, root_hi = 0.0;
    bool found = false;
    for (int i = 1; i < scan; ++i) {
        const double s =
            lo * std::pow(hi / lo, static_cast<double>(i) / (scan - 1));
        const double gs = g(s);
        if (std::isfinite(prev_g) && std::isfinite(gs) && prev_g * gs <= 0.0) {
            root_lo = prev_s;
            root_hi = s;
            found = true;
            break;
        }
        prev_s = s;
        prev_g = gs;
    }
    if (!found)
        throw NoRoot("no sign change of the power divergence equation in the bracket");

    const auto root = solve::brent_root(g, root_lo, root_hi, 1e-12 * s_mle);
    if (!root.converged) throw NoConvergence("Brent failed on the power divergence equation");

    const double sigma = root.x;
    out.theta_hat = Eigen::VectorXd::Constant(1, sigma);
    out.iterations = root.iterations;
    out.converged = true;
    out.gradient_norm = std::abs(root.g);
    // negated empirical divergence objective, so that bigger stays better
    const auto sums = kernels::gaussian_power_moments(x, m, sigma, a);
    const double k = std::pow(sigma * std::sqrt(2.0 * M_PI), -a);
    out.criterion_at_opt =
        -k * (1.0 / std::sqrt(1.0 + a) - (1.0 + 1.0 / a) * sums.s0 / n);
    return out;
}

double r_alpha_hat(const ParametricModel& model, const Sample& sample, Alpha alpha,
                   const SolverOptions& opts) {
    if (!alpha.positive()) throw UnsupportedAlpha("r_alpha_hat requires alpha > 0");
    const EstimatorResult fit = fit_min_r_alpha(model, sample, alpha, opts);
    double acc = 0.0;
    if (model.univariate()) {
        for (int i = 0; i < sample.n(); ++i)
            acc += h_kernel(model, fit.theta_hat(0), alpha, sample.points(i, 0));
    } else {
        for (int i = 0; i < sample.n(); ++i)
            acc += h_kernel(model, fit.theta_hat, alpha,
                            Eigen::VectorXd(sample.points.row(i).transpose()));
    }
    return acc / sample.n();
}

} // namespace robrenyi
