#pragma once

// Estimation accuracy (MMRE, PRED) and the repeated train/test calibration
// experiment.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fpcal/calibrator.hpp"
#include "fpcal/effort_model.hpp"
#include "fpcal/error.hpp"
#include "fpcal/fp_core.hpp"

namespace fpcal {

struct EstimatePair {
    double estimated;
    double actual;
};

namespace detail {

inline void check_pairs(const std::vector<EstimatePair>& pairs) {
    if (pairs.empty()) throw ValidationError("accuracy metrics need at least one estimate");
    for (const auto& p : pairs)
        if (!(p.actual > 0)) throw ValidationError("actual effort must be positive");
}

inline double mre(const EstimatePair& p) { return std::abs(p.estimated - p.actual) / p.actual; }

}  // namespace detail

inline double mmre(const std::vector<EstimatePair>& pairs) {
    detail::check_pairs(pairs);
    double s = 0;
    for (const auto& p : pairs) s += detail::mre(p);
    return s / static_cast<double>(pairs.size());
}

/// Fraction of estimates with MRE <= level_percent / 100.
inline double pred(const std::vector<EstimatePair>& pairs, double level_percent) {
    detail::check_pairs(pairs);
    if (!(level_percent > 0)) throw ValidationError("PRED level must be positive");
    const double limit = level_percent / 100.0;
    const auto k = std::count_if(pairs.begin(), pairs.end(), [&](const EstimatePair& p) { return detail::mre(p) <= limit; });
    return static_cast<double>(k) / static_cast<double>(pairs.size());
}

struct AccuracyReport {
    double mmre = 0;
    std::map<double, double> pred;  ///< level percent -> fraction
    std::size_t n = 0;

    friend bool operator==(const AccuracyReport&, const AccuracyReport&) = default;
};

inline AccuracyReport accuracy(const std::vector<EstimatePair>& pairs, const std::vector<double>& levels) {
    AccuracyReport r;
    r.mmre = mmre(pairs);
    for (double level : levels) r.pred[level] = pred(pairs, level);
    r.n = pairs.size();
    return r;
}

struct ExperimentConfig {
    int n_trials = 5;
    double train_fraction = 100.0 / 184.0;
    long long seed = 0;
    std::vector<double> pred_levels = {25, 50, 75, 100};
    TrainingConfig training;

    void validate() const {
        if (n_trials <= 0) throw ValidationError("n_trials must be positive");
        if (!(train_fraction > 0 && train_fraction < 1)) throw ValidationError("train_fraction must be in (0, 1)");
        for (double l : pred_levels)
            if (!(l > 0)) throw ValidationError("PRED levels must be positive");
        training.validate();
    }

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Per-project test-side estimates under both weight matrices.
struct TestEstimate {
    std::string id;
    double actual = 0;
    double estimated_original = 0;
    double estimated_calibrated = 0;

    friend bool operator==(const TestEstimate&, const TestEstimate&) = default;
};

struct TrialResult {
    int trial = 0;
    bool ok = false;
    std::string error;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    CalibrationReport calibration;
    AccuracyReport original;
    AccuracyReport calibrated;
    double improvement_pct = 0;  ///< MMRE reduction relative to the original arm
    std::vector<TestEstimate> estimates;

    friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct ExperimentSummary {
    std::vector<TrialResult> trials;
    double mean_mmre_original = 0;
    double mean_mmre_calibrated = 0;
    double mean_improvement_pct = 0;
    std::map<double, double> mean_pred_original;
    std::map<double, double> mean_pred_calibrated;
    int successful_trials = 0;

    friend bool operator==(const ExperimentSummary&, const ExperimentSummary&) = default;
};

/// Seeded shuffle then prefix split; the first part is the training side.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, double train_fraction,
                                                                                   long long seed, int trial) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::seed_seq seq{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(trial)};
    std::mt19937_64 rng(seq);
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    return {std::vector<std::size_t>(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train)),
            std::vector<std::size_t>(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end())};
}

inline double improvement_percent(double before, double after) {
    return before > 0 ? (before - after) / before * 100.0 : 0.0;
}

/// Repeated random-split calibration experiment. The effort equation `fit` is
/// held fixed; both arms differ only in the weight matrix used to size the
/// test projects. Outliers are removed from the training side only.
inline ExperimentSummary run_experiments(const std::vector<ProjectRecord>& projects, const ExperimentConfig& cfg,
                                         const RegressionFit& fit,
                                         const WeightMatrix& original = WeightMatrix::original()) {
    cfg.validate();
    if (projects.size() < 20) throw ValidationError("experiments need at least 20 projects");
    const auto samples = training_samples(projects);

    ExperimentSummary summary;
    for (int t = 0; t < cfg.n_trials; ++t) {
        TrialResult tr;
        tr.trial = t + 1;
        const auto [train_idx, test_idx] = split_indices(samples.size(), cfg.train_fraction, cfg.seed, t);
        std::vector<TrainingSample> train;
        for (auto i : train_idx) {
            train.push_back(samples[i]);
            tr.train_ids.push_back(samples[i].id);
        }
        for (auto i : test_idx) tr.test_ids.push_back(samples[i].id);
        try {
            tr.calibration = calibrate(train, original, fit, cfg.training);
            std::vector<EstimatePair> orig_pairs, cal_pairs;
            for (auto i : test_idx) {
                const auto& p = projects[i];
                TestEstimate e;
                e.id = p.id;
                e.actual = *p.normalized_effort;
                e.estimated_original = predict_effort(fit, unadjusted_fp(*p.counts, original));
                e.estimated_calibrated = predict_effort(fit, unadjusted_fp(*p.counts, tr.calibration.final_weights));
                orig_pairs.push_back({e.estimated_original, e.actual});
                cal_pairs.push_back({e.estimated_calibrated, e.actual});
                tr.estimates.push_back(std::move(e));
            }
            tr.original = accuracy(orig_pairs, cfg.pred_levels);
            tr.calibrated = accuracy(cal_pairs, cfg.pred_levels);
            tr.improvement_pct = improvement_percent(tr.original.mmre, tr.calibrated.mmre);
            tr.ok = true;
        } catch (const std::exception& ex) {
            tr.ok = false;
            tr.error = ex.what();
        }
        summary.trials.push_back(std::move(tr));
    }

    for (const auto& tr : summary.trials) {
        if (!tr.ok) continue;
        ++summary.successful_trials;
        summary.mean_mmre_original += tr.original.mmre;
        summary.mean_mmre_calibrated += tr.calibrated.mmre;
        summary.mean_improvement_pct += tr.improvement_pct;
        for (const auto& [level, v] : tr.original.pred) summary.mean_pred_original[level] += v;
        for (const auto& [level, v] : tr.calibrated.pred) summary.mean_pred_calibrated[level] += v;
    }
    if (summary.successful_trials > 0) {
        const double n = summary.successful_trials;
        summary.mean_mmre_original /= n;
        summary.mean_mmre_calibrated /= n;
        summary.mean_improvement_pct /= n;
        for (auto& [level, v] : summary.mean_pred_original) v /= n;
        for (auto& [level, v] : summary.mean_pred_calibrated) v /= n;
    }
    return summary;
}

}  // namespace fpcal
