#pragma once

#include <cstddef>
#include <span>

namespace robrenyi::kernels {

// Weighted power sums of standardized observations. With u_i = (x_i - m)/sigma
// and w_i = exp(-0.5*alpha*u_i^2 + log_shift),
//   s0 = sum w_i,  s1 = sum w_i u_i,  ...,  s4 = sum w_i u_i^4.
// These five sums drive the normal-family criteria, estimating equations and
// their Newton derivatives. log_shift rescales all weights by a common factor
// so that ratios s_k/s0 stay well defined when the raw weights underflow.
struct PowerMoments {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
};

// Same for the exponential family on the half line. With v_i = x_i/theta and
// w_i = exp(-alpha*v_i + log_shift), observations with x_i < 0 contribute 0.
struct DecayMoments {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
};

enum class Backend { automatic, scalar, avx2 };

// Runtime-dispatched entry points. The backend is resolved once per process
// (AVX2+FMA when the CPU has them, scalar otherwise) unless overridden.
PowerMoments gaussian_power_moments(std::span<const double> x, double m,
                                    double sigma, double alpha,
                                    double log_shift = 0.0);
DecayMoments exp_decay_moments(std::span<const double> x, double theta,
                               double alpha, double log_shift = 0.0);
// w_i = exp(-0.5*alpha*(r_i/sigma)^2), the IRLS weights of the regression fit.
void exp_weights(std::span<const double> residuals, double sigma, double alpha,
                 std::span<double> w);

// Scalar reference implementations (always available; the equivalence tests
// compare the dispatched backend against these).
PowerMoments gaussian_power_moments_scalar(std::span<const double> x, double m,
                                           double sigma, double alpha,
                                           double log_shift);
DecayMoments exp_decay_moments_scalar(std::span<const double> x, double theta,
                                      double alpha, double log_shift);
void exp_weights_scalar(std::span<const double> residuals, double sigma,
                        double alpha, std::span<double> w);

#if defined(__x86_64__) || defined(_M_X64)
#define ROBRENYI_HAVE_AVX2_KERNELS 1
PowerMoments gaussian_power_moments_avx2(std::span<const double> x, double m,
                                         double sigma, double alpha,
                                         double log_shift);
DecayMoments exp_decay_moments_avx2(std::span<const double> x, double theta,
                                    double alpha, double log_shift);
void exp_weights_avx2(std::span<const double> residuals, double sigma,
                      double alpha, std::span<double> w);
#endif

bool avx2_supported();
void set_backend(Backend b);   // test hook; automatic re-probes the CPU
Backend active_backend();      // resolved backend (never `automatic`)

// Moment sums with the log shift chosen so the largest weight is exactly 1.
// true ln(s_k) = ln(moments.s_k) - log_shift, and s0 >= 1 whenever the data
// set is nonempty, which keeps ratio statistics finite at extreme parameters.
struct ShiftedPowerMoments {
    PowerMoments moments;
    double log_shift = 0.0;
};
struct ShiftedDecayMoments {
    DecayMoments moments;
    double log_shift = 0.0;
};
ShiftedPowerMoments stable_gaussian_moments(std::span<const double> x, double m,
                                            double sigma, double alpha);
ShiftedDecayMoments stable_exp_decay_moments(std::span<const double> x,
                                             double theta, double alpha);

} // namespace robrenyi::kernels
