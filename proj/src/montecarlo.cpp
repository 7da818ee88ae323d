#include "robrenyi/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

namespace robrenyi {

const char* to_string(EstimatorFamily family) {
    switch (family) {
        case EstimatorFamily::min_r: return "minR";
        case EstimatorFamily::min_d: return "minD";
        case EstimatorFamily::mle: return "mle";
    }
    return "?";
}

void StudyConfig::validate() const {
    if (!model.univariate())
        throw std::invalid_argument("studies report a scalar estimate; use a scalar-parameter family");
    model.check_theta(theta_true);
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");
    if (n_replicates < 1) throw std::invalid_argument("need at least one replicate");
    if (estimators.empty()) throw std::invalid_argument("no estimators configured");
    if (contaminant) contaminant->validate();
    for (const EstimatorSpec& e : estimators) {
        if (e.family == EstimatorFamily::mle) continue;
        if (e.alphas.empty())
            throw std::invalid_argument("estimator has an empty alpha list");
        for (double a : e.alphas) Alpha(a, beta_max);  // range check
        if (e.family == EstimatorFamily::min_d &&
            model.kind() != ModelKind::normal_scale)
            throw std::invalid_argument(
                "the power divergence competitor is implemented for normal-scale only");
    }
}

double mc_standard_error(std::span<const double> estimates) {
    const std::size_t n = estimates.size();
    if (n < 2) throw TooFewReplicates("standard error needs at least two replicates");
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double e : estimates) ss += (e - mean) * (e - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return sd / std::sqrt(static_cast<double>(n));
}

namespace {

int resolve_threads(int requested) {
    int n = requested;
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* cap = std::getenv("ROBUST_RENYI_THREADS")) {
        const int limit = std::atoi(cap);
        if (limit >= 1) n = std::min(n, limit);
    }
    return n;
}

struct RowKey {
    EstimatorFamily family;
    double alpha;
};

double default_fit(const ParametricModel& model, const Sample& sample,
                   EstimatorFamily family, double alpha) {
    switch (family) {
        case EstimatorFamily::mle:
            return fit_min_r_alpha(model, sample, Alpha(0.0)).scalar();
        case EstimatorFamily::min_r:
            return fit_min_r_alpha(model, sample, Alpha(alpha)).scalar();
        case EstimatorFamily::min_d:
            return fit_basu_dpd(sample, Alpha(alpha), model.fixed_mean()).scalar();
    }
    throw std::logic_error("unreachable");
}

} // namespace

StudyReport run_study_with(const StudyConfig& config, const FitFunction& fit,
                           int n_threads) {
    config.validate();
    std::vector<RowKey> keys;
    for (const EstimatorSpec& e : config.estimators) {
        if (e.family == EstimatorFamily::mle) {
            keys.push_back({EstimatorFamily::mle, 0.0});
        } else {
            for (double a : e.alphas) keys.push_back({e.family, a});
        }
    }

    const int n_rows = static_cast<int>(keys.size());
    const int reps = config.n_replicates;
    // per-replicate results, NaN marking a failed fit
    std::vector<std::vector<double>> results(
        n_rows, std::vector<double>(reps, std::numeric_limits<double>::quiet_NaN()));

    auto run_replicate = [&](int r) {
        Sample sample =
            config.contaminant
                ? config.model.sample_contaminated(config.theta_true, config.n,
                                                   *config.contaminant, config.seed,
                                                   static_cast<std::uint64_t>(r))
                : config.model.sample(config.theta_true, config.n, config.seed,
                                      static_cast<std::uint64_t>(r));
        for (int row = 0; row < n_rows; ++row) {
            try {
                results[row][r] =
                    fit(config.model, sample, keys[row].family, keys[row].alpha);
            } catch (const Error&) {
                // counted as a failed replicate for this row
            }
        }
    };

    const int workers = std::min(resolve_threads(n_threads), reps);
    if (workers <= 1) {
        for (int r = 0; r < reps; ++r) run_replicate(r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1))
                    run_replicate(r);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    StudyReport report;
    report.config = config;
    report.rows.reserve(n_rows);
    report.estimates.reserve(n_rows);
    for (int row = 0; row < n_rows; ++row) {
        StudyRow out{keys[row].family, keys[row].alpha, 0.0, 0.0, 0.0, 0};
        std::vector<double> kept;
        kept.reserve(reps);
        for (int r = 0; r < reps; ++r) {
            const double v = results[row][r];
            if (std::isnan(v))
                ++out.n_failed;
            else
                kept.push_back(v);
        }
        if (!kept.empty()) {
            double mean = 0.0, mse = 0.0;
            for (double v : kept) {
                mean += v;
                mse += (v - config.theta_true) * (v - config.theta_true);
            }
            out.mean_estimate = mean / static_cast<double>(kept.size());
            out.mse_hat = mse / static_cast<double>(kept.size());
            out.mc_se = kept.size() >= 2 ? mc_standard_error(kept) : 0.0;
        }
        report.rows.push_back(out);
        report.estimates.push_back(std::move(kept));
    }
    return report;
}

StudyReport run_study(const StudyConfig& config, int n_threads) {
    return run_study_with(config, default_fit, n_threads);
}

namespace {

ContaminantSpec parse_contaminant(const nlohmann::json& doc) {
    const std::string kind = doc.at("kind").get<std::string>();
    const double eps = doc.at("epsilon").get<double>();
    if (kind == "point-mass") return ContaminantSpec::point_mass(doc.at("at").get<double>(), eps);
    if (kind == "gaussian")
        return ContaminantSpec::gaussian(doc.at("mean").get<double>(),
                                         doc.at("sd").get<double>(), eps);
    throw ParseError("unknown contaminant kind: " + kind);
}

} // namespace

StudyConfig parse_study_config(const nlohmann::json& doc) {
    try {
        StudyConfig config;
        const nlohmann::json& model = doc.at("model");
        const std::string kind = model.at("kind").get<std::string>();
        if (kind == "normal-scale")
            config.model = ParametricModel::normal_scale(model.value("m", 0.0));
        else if (kind == "normal-location")
            config.model = ParametricModel::normal_location(model.value("sigma", 1.0));
        else if (kind == "exponential")
            config.model = ParametricModel::exponential_scale();
        else
            throw ParseError("unknown model kind: " + kind);

        config.theta_true = doc.at("theta").get<double>();
        config.n = doc.at("n").get<int>();
        config.n_replicates = doc.value("replicates", 2000);
        config.seed = doc.value("seed", 0ull);
        config.beta_max = doc.value("beta_max", kDefaultBetaMax);
        if (doc.contains("contaminant") && !doc.at("contaminant").is_null())
            config.contaminant = parse_contaminant(doc.at("contaminant"));

        for (const nlohmann::json& e : doc.at("estimators")) {
            EstimatorSpec spec;
            const std::string family = e.at("family").get<std::string>();
            if (family == "mle") spec.family = EstimatorFamily::mle;
            else if (family == "minR") spec.family = EstimatorFamily::min_r;
            else if (family == "minD") spec.family = EstimatorFamily::min_d;
            else throw ParseError("unknown estimator family: " + family);
            if (spec.family != EstimatorFamily::mle)
                spec.alphas = e.at("alphas").get<std::vector<double>>();
            config.estimators.push_back(std::move(spec));
        }
        config.validate();
        return config;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad study config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("bad study config: ") + e.what());
    }
}

StudyConfig load_study_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open study config: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return parse_study_config(doc);
}

} // namespace robrenyi
