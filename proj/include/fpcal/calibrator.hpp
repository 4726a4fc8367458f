#pragma once

// Neural calibration of the 15 UFP weights. The network has a linear middle
// neuron Y = sum x_i w_i (the UFP formula) and an output neuron Z = v2 * Y^v1
// (the regression effort equation). Only w is trained; v1 and v2 stay at the
// regression values. Training minimizes E = sum 1/2 ((Z - Zd) / Zd)^2 by
// full-batch projected gradient descent under Low < Average < High.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fpcal/effort_model.hpp"
#include "fpcal/error.hpp"
#include "fpcal/fp_core.hpp"

namespace fpcal {

using WeightVector = std::array<double, kCellCount>;
using CountVector = std::array<double, kCellCount>;

/// Minimum gap between consecutive complexity weights of one component.
inline constexpr double kMonotoneGap = 1e-3;

struct NetworkState {
    WeightVector w{};  ///< X1 = EI low ... X15 = EIF high
    double v1 = 1;     ///< exponent B
    double v2 = 1;     ///< coefficient A

    static NetworkState from(const WeightMatrix& weights, const RegressionFit& fit) {
        return {weights.cells(), fit.B, fit.A};
    }
};

struct TrainingSample {
    std::string id;
    CountVector x{};
    double effort = 0;
};

struct TrainingConfig {
    double learning_rate = 1e-4;
    int max_epochs = 5000;
    double convergence_tol = 1e-8;
    double outlier_zscore = 3.0;
    long long seed = 0;  ///< kept for interchange; full-batch training draws no randomness

    void validate() const {
        if (!(learning_rate > 0) || max_epochs <= 0 || !(convergence_tol > 0) || !(outlier_zscore > 0))
            throw ValidationError("training config values must be positive");
    }

    friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

struct CalibrationReport {
    WeightMatrix initial_weights = WeightMatrix::original();
    WeightMatrix final_weights = WeightMatrix::original();
    double v1 = 1;
    double v2 = 1;
    std::vector<double> loss_trace;
    std::vector<std::string> excluded_outliers;
    int epochs_run = 0;
    bool converged = false;

    friend bool operator==(const CalibrationReport&, const CalibrationReport&) = default;
};

struct ForwardResult {
    double y;  ///< size (UFP)
    double z;  ///< estimated effort
};

inline CountVector count_vector(const ComponentCounts& counts) {
    CountVector x{};
    for (std::size_t i = 0; i < kCellCount; ++i) x[i] = counts.cells()[i];
    return x;
}

inline ForwardResult forward(const NetworkState& state, const CountVector& x) {
    double y = 0;
    bool any = false;
    for (std::size_t i = 0; i < kCellCount; ++i) {
        if (x[i] < 0) throw ValidationError("network inputs must be nonnegative");
        any = any || x[i] > 0;
        y += x[i] * state.w[i];
    }
    if (!any) throw ValidationError("network input has no positive count");
    return {y, state.v2 * std::pow(y, state.v1)};
}

namespace detail {

inline void check_efforts(const std::vector<TrainingSample>& projects) {
    for (const auto& p : projects)
        if (!(p.effort > 0)) throw ValidationError("project " + p.id + ": actual effort must be positive");
}

}  // namespace detail

inline double loss(const NetworkState& state, const std::vector<TrainingSample>& projects) {
    detail::check_efforts(projects);
    double e = 0;
    for (const auto& p : projects) {
        const double rel = (forward(state, p.x).z - p.effort) / p.effort;
        e += 0.5 * rel * rel;
    }
    return e;
}

/// dE/dw_i = sum_n (z_n - zd_n) / zd_n^2 * v2 * v1 * y_n^(v1-1) * x_ni
inline WeightVector gradient(const NetworkState& state, const std::vector<TrainingSample>& projects) {
    detail::check_efforts(projects);
    WeightVector g{};
    for (const auto& p : projects) {
        const auto [y, z] = forward(state, p.x);
        const double dz_dy = state.v2 * state.v1 * std::pow(y, state.v1 - 1);
        const double coef = (z - p.effort) / (p.effort * p.effort) * dz_dy;
        for (std::size_t i = 0; i < kCellCount; ++i) g[i] += coef * p.x[i];
    }
    return g;
}

/// Euclidean projection onto {gap <= low, low + gap <= average, average + gap <= high}
/// per component. Shifting by the gaps turns the constraint into a bounded
/// isotonic problem, solved by pool-adjacent-violators followed by clamping.
inline WeightVector project_monotone(const WeightVector& w, double gap = kMonotoneGap) {
    WeightVector out = w;
    for (std::size_t k = 0; k < kComponentCount; ++k) {
        std::array<double, 3> u{};
        for (std::size_t j = 0; j < 3; ++j) u[j] = w[k * 3 + j] - gap * static_cast<double>(j);

        // Pool adjacent violators over three points with unit weights.
        std::array<double, 3> block_sum{}, block_len{};
        std::array<std::size_t, 3> block_end{};
        std::size_t nb = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            block_sum[nb] = u[j];
            block_len[nb] = 1;
            block_end[nb] = j;
            ++nb;
            while (nb > 1 && block_sum[nb - 2] / block_len[nb - 2] > block_sum[nb - 1] / block_len[nb - 1]) {
                block_sum[nb - 2] += block_sum[nb - 1];
                block_len[nb - 2] += block_len[nb - 1];
                block_end[nb - 2] = block_end[nb - 1];
                --nb;
            }
        }
        std::size_t j = 0;
        for (std::size_t b = 0; b < nb; ++b)
            for (; j <= block_end[b]; ++j) u[j] = block_sum[b] / block_len[b];

        for (std::size_t j = 0; j < 3; ++j) out[k * 3 + j] = std::max(u[j], gap) + gap * static_cast<double>(j);
    }
    return out;
}

inline bool satisfies_monotone(const WeightVector& w, double gap = kMonotoneGap, double slack = 1e-12) {
    for (std::size_t k = 0; k < kComponentCount; ++k) {
        const double lo = w[k * 3], avg = w[k * 3 + 1], hi = w[k * 3 + 2];
        if (lo < gap - slack || lo + gap > avg + slack || avg + gap > hi + slack) return false;
    }
    return true;
}

/// Projects whose log-residual under `state` deviates from the mean by more
/// than `zscore` population standard deviations.
inline std::vector<std::size_t> detect_outliers(const std::vector<TrainingSample>& projects,
                                                const NetworkState& state, double zscore) {
    if (projects.size() < 3) throw ValidationError("outlier detection needs at least 3 projects");
    if (!(zscore > 0)) throw ValidationError("outlier z-score must be positive");
    detail::check_efforts(projects);
    std::vector<double> r;
    r.reserve(projects.size());
    for (const auto& p : projects) r.push_back(std::log(p.effort) - std::log(forward(state, p.x).z));
    const double n = static_cast<double>(r.size());
    double mean = 0;
    for (double v : r) mean += v;
    mean /= n;
    double var = 0;
    for (double v : r) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / n);

    std::vector<std::size_t> flagged;
    if (!(sd > 0) || std::isinf(zscore)) return flagged;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (std::abs(r[i] - mean) > zscore * sd) flagged.push_back(i);
    return flagged;
}

/// Training inputs from project records; every record needs counts with a
/// positive cell and a recorded effort.
inline std::vector<TrainingSample> training_samples(const std::vector<ProjectRecord>& records) {
    std::vector<TrainingSample> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (!r.counts) throw ValidationError("project " + r.id + " has no component counts");
        if (!r.counts->any_positive()) throw ValidationError("project " + r.id + " has no positive component count");
        if (!r.normalized_effort) throw ValidationError("project " + r.id + " has no recorded effort");
        out.push_back({r.id, count_vector(*r.counts), *r.normalized_effort});
    }
    return out;
}

inline CalibrationReport calibrate(const std::vector<TrainingSample>& projects, const WeightMatrix& initial,
                                   const RegressionFit& fit, const TrainingConfig& cfg) {
    cfg.validate();
    if (!(fit.A > 0)) throw ValidationError("effort equation coefficient A must be positive");
    for (const auto& p : projects) {
        bool any = false;
        for (double v : p.x) any = any || v > 0;
        if (!any) throw ValidationError("project " + p.id + " has no positive component count");
    }
    detail::check_efforts(projects);

    NetworkState state = NetworkState::from(initial, fit);
    state.w = project_monotone(state.w);

    CalibrationReport report;
    report.initial_weights = initial;
    report.v1 = state.v1;
    report.v2 = state.v2;

    std::vector<TrainingSample> train;
    if (projects.size() >= 3) {
        const auto outliers = detect_outliers(projects, state, cfg.outlier_zscore);
        std::size_t next = 0;
        for (std::size_t i = 0; i < projects.size(); ++i) {
            if (next < outliers.size() && outliers[next] == i) {
                report.excluded_outliers.push_back(projects[i].id);
                ++next;
            } else {
                train.push_back(projects[i]);
            }
        }
    }
    if (train.size() < 10)
        throw ValidationError("calibration needs at least 10 non-outlier projects, got " +
                              std::to_string(train.size()));

    constexpr int kMaxHalvings = 60;
    double current = loss(state, train);
    report.loss_trace.push_back(current);
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        const auto g = gradient(state, train);
        double lr = cfg.learning_rate;
        NetworkState candidate = state;
        double next_loss = std::numeric_limits<double>::infinity();
        int halvings = 0;
        for (; halvings <= kMaxHalvings; ++halvings, lr /= 2) {
            WeightVector stepped;
            for (std::size_t i = 0; i < kCellCount; ++i) stepped[i] = state.w[i] - lr * g[i];
            candidate.w = project_monotone(stepped);
            next_loss = loss(candidate, train);
            if (next_loss <= current) break;
        }
        ++report.epochs_run;
        if (halvings > kMaxHalvings) {
            report.converged = true;
            break;
        }
        const double improvement = (current - next_loss) / std::max(current, std::numeric_limits<double>::min());
        state = candidate;
        current = next_loss;
        report.loss_trace.push_back(current);
        if (improvement < cfg.convergence_tol) {
            report.converged = true;
            break;
        }
    }
    report.final_weights = WeightMatrix(state.w);
    return report;
}

inline CalibrationReport calibrate(const std::vector<ProjectRecord>& records, const WeightMatrix& initial,
                                   const RegressionFit& fit, const TrainingConfig& cfg) {
    return calibrate(training_samples(records), initial, fit, cfg);
}

}  // namespace fpcal
