#pragma once

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "robrenyi/estimation.hpp"

namespace robrenyi {

enum class EstimatorFamily { min_r, min_d, mle };

const char* to_string(EstimatorFamily family);

struct EstimatorSpec {
    EstimatorFamily family = EstimatorFamily::min_r;
    std::vector<double> alphas;  // ignored for mle
};

// A contamination study: replicated seeded samples of size n from the model
// (optionally contaminated), each fitted by every configured estimator.
// Restricted to the scalar-parameter families, matching the scalar report
// rows below.
struct StudyConfig {
    ParametricModel model = ParametricModel::normal_scale(0.0);
    double theta_true = 1.0;
    int n = 100;
    int n_replicates = 2000;
    std::optional<ContaminantSpec> contaminant;
    std::vector<EstimatorSpec> estimators;
    std::uint64_t seed = 0;
    double beta_max = kDefaultBetaMax;

    void validate() const;
};

struct StudyRow {
    EstimatorFamily family;
    double alpha = 0.0;
    double mean_estimate = 0.0;
    double mse_hat = 0.0;
    double mc_se = 0.0;    // standard error of mean_estimate
    int n_failed = 0;      // non-converged replicates, excluded from the stats
};

struct StudyReport {
    StudyConfig config;
    std::vector<StudyRow> rows;
    // estimates per row, in replicate order (converged ones only)
    std::vector<std::vector<double>> estimates;
};

// Standard error of the replicate mean: sd / sqrt(count).
double mc_standard_error(std::span<const double> estimates);

// Runs the study. Replicate r draws from the (seed, r) stream, so results do
// not depend on the number of worker threads; the reduction over replicates
// is done in replicate order. n_threads = 0 picks the hardware count, capped
// by the ROBUST_RENYI_THREADS environment variable.
StudyReport run_study(const StudyConfig& config, int n_threads = 0);

// Same, with the per-replicate estimator supplied by the caller. Used by the
// tests to stub the fit out.
using FitFunction = std::function<double(const ParametricModel&, const Sample&,
                                         EstimatorFamily, double alpha)>;
StudyReport run_study_with(const StudyConfig& config, const FitFunction& fit,
                           int n_threads = 0);

StudyConfig parse_study_config(const nlohmann::json& doc);
StudyConfig load_study_config(const std::string& path);

} // namespace robrenyi
