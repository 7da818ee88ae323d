#include "robrenyi/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace robrenyi::kernels {

PowerMoments gaussian_power_moments_scalar(std::span<const double> x, double m,
                                           double sigma, double alpha,
                                           double log_shift) {
    const double inv_sigma = 1.0 / sigma;
    const double half_alpha = 0.5 * alpha;
    PowerMoments out;
    for (double xi : x) {
        const double u = (xi - m) * inv_sigma;
        const double u2 = u * u;
        const double w = std::exp(log_shift - half_alpha * u2);
        out.s0 += w;
        out.s1 += w * u;
        out.s2 += w * u2;
        out.s3 += w * u2 * u;
        out.s4 += w * u2 * u2;
    }
    return out;
}

DecayMoments exp_decay_moments_scalar(std::span<const double> x, double theta,
                                      double alpha, double log_shift) {
    const double inv_theta = 1.0 / theta;
    DecayMoments out;
    for (double xi : x) {
        if (xi < 0.0) continue;
        const double v = xi * inv_theta;
        const double w = std::exp(log_shift - alpha * v);
        out.s0 += w;
        out.s1 += w * v;
        out.s2 += w * v * v;
    }
    return out;
}

void exp_weights_scalar(std::span<const double> residuals, double sigma,
                        double alpha, std::span<double> w) {
    const double inv_sigma = 1.0 / sigma;
    const double half_alpha = 0.5 * alpha;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        const double u = residuals[i] * inv_sigma;
        w[i] = std::exp(-half_alpha * u * u);
    }
}

bool avx2_supported() {
#if defined(ROBRENYI_HAVE_AVX2_KERNELS) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

std::atomic<Backend> g_backend{Backend::automatic};

Backend resolve(Backend b) {
    if (b != Backend::automatic) return b;
    return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

} // namespace

void set_backend(Backend b) {
#if !defined(ROBRENYI_HAVE_AVX2_KERNELS)
    if (b == Backend::avx2) b = Backend::scalar;
#endif
    g_backend.store(resolve(b), std::memory_order_relaxed);
}

Backend active_backend() {
    Backend b = g_backend.load(std::memory_order_relaxed);
    if (b == Backend::automatic) {
        b = resolve(b);
        g_backend.store(b, std::memory_order_relaxed);
    }
    return b;
}

PowerMoments gaussian_power_moments(std::span<const double> x, double m,
                                    double sigma, double alpha,
                                    double log_shift) {
#if defined(ROBRENYI_HAVE_AVX2_KERNELS)
    if (active_backend() == Backend::avx2)
        return gaussian_power_moments_avx2(x, m, sigma, alpha, log_shift);
#endif
    return gaussian_power_moments_scalar(x, m, sigma, alpha, log_shift);
}

DecayMoments exp_decay_moments(std::span<const double> x, double theta,
                               double alpha, double log_shift) {
#if defined(ROBRENYI_HAVE_AVX2_KERNELS)
    if (active_backend() == Backend::avx2)
        return exp_decay_moments_avx2(x, theta, alpha, log_shift);
#endif
    return exp_decay_moments_scalar(x, theta, alpha, log_shift);
}

void exp_weights(std::span<const double> residuals, double sigma, double alpha,
                 std::span<double> w) {
#if defined(ROBRENYI_HAVE_AVX2_KERNELS)
    if (active_backend() == Backend::avx2) {
        exp_weights_avx2(residuals, sigma, alpha, w);
        return;
    }
#endif
    exp_weights_scalar(residuals, sigma, alpha, w);
}

ShiftedPowerMoments stable_gaussian_moments(std::span<const double> x, double m,
                                            double sigma, double alpha) {
    double min_abs = std::numeric_limits<double>::infinity();
    for (double xi : x) min_abs = std::min(min_abs, std::abs(xi - m));
    const double u_min = x.empty() ? 0.0 : min_abs / sigma;
    ShiftedPowerMoments out;
    out.log_shift = 0.5 * alpha * u_min * u_min;
    out.moments = gaussian_power_moments(x, m, sigma, alpha, out.log_shift);
    return out;
}

ShiftedDecayMoments stable_exp_decay_moments(std::span<const double> x,
                                             double theta, double alpha) {
    double min_x = std::numeric_limits<double>::infinity();
    for (double xi : x)
        if (xi >= 0.0) min_x = std::min(min_x, xi);
    ShiftedDecayMoments out;
    out.log_shift = std::isfinite(min_x) ? alpha * min_x / theta : 0.0;
    out.moments = exp_decay_moments(x, theta, alpha, out.log_shift);
    return out;
}

} // namespace robrenyi::kernels
