#pragma once

// Project records, repository filtering and the log-log effort equation
// Effort = A * UFP^B.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fpcal/error.hpp"
#include "fpcal/fp_core.hpp"
#include "fpcal/fuzzy.hpp"

namespace fpcal {

enum class QualityRating : std::uint8_t { A, B, C, D };
enum class CountingMethod : std::uint8_t { IFPUG, COSMIC, MARK_II, OTHER };
enum class DevelopmentType : std::uint8_t { NewDevelopment, Enhancement, Redevelopment, Other };

constexpr std::string_view to_string(QualityRating q) {
    constexpr std::string_view names[] = {"A", "B", "C", "D"};
    return names[static_cast<int>(q)];
}
constexpr std::string_view to_string(CountingMethod m) {
    constexpr std::string_view names[] = {"IFPUG", "COSMIC", "MARK_II", "OTHER"};
    return names[static_cast<int>(m)];
}
constexpr std::string_view to_string(DevelopmentType t) {
    constexpr std::string_view names[] = {"NewDevelopment", "Enhancement", "Redevelopment", "Other"};
    return names[static_cast<int>(t)];
}

template <typename Enum, int N>
std::optional<Enum> parse_enum(std::string_view s) {
    for (int i = 0; i < N; ++i)
        if (to_string(static_cast<Enum>(i)) == s) return static_cast<Enum>(i);
    return std::nullopt;
}

inline std::optional<QualityRating> parse_quality(std::string_view s) { return parse_enum<QualityRating, 4>(s); }
inline std::optional<CountingMethod> parse_counting_method(std::string_view s) {
    return parse_enum<CountingMethod, 4>(s);
}
inline std::optional<DevelopmentType> parse_development_type(std::string_view s) {
    return parse_enum<DevelopmentType, 4>(s);
}

struct ProjectRecord {
    std::string id;
    QualityRating quality_rating = QualityRating::A;
    CountingMethod counting_method = CountingMethod::IFPUG;
    int resource_level = 1;
    DevelopmentType development_type = DevelopmentType::NewDevelopment;
    std::optional<ComponentCounts> counts;
    std::optional<GscRatings> gsc;
    std::optional<double> normalized_effort;  ///< person-hours
    std::vector<InventoryItem> inventory;     ///< optional, for fuzzy counting

    friend bool operator==(const ProjectRecord&, const ProjectRecord&) = default;
};

struct FilterCriteria {
    std::set<QualityRating> allowed_quality;
    std::set<CountingMethod> allowed_methods;
    std::set<int> allowed_resource_levels;
    std::set<DevelopmentType> allowed_dev_types;
    bool require_counts = true;
    bool require_gsc = true;

    /// Quality A/B, IFPUG counts, resource level 1, new development or
    /// redevelopment, all 15 UFP categories and all 14 GSC ratings recorded.
    static FilterCriteria repository_default() {
        return {{QualityRating::A, QualityRating::B},
                {CountingMethod::IFPUG},
                {1},
                {DevelopmentType::NewDevelopment, DevelopmentType::Redevelopment},
                true,
                true};
    }

    void validate() const {
        if (allowed_quality.empty() || allowed_methods.empty() || allowed_resource_levels.empty() ||
            allowed_dev_types.empty())
            throw ValidationError("filter criteria sets must be non-empty");
    }

    friend bool operator==(const FilterCriteria&, const FilterCriteria&) = default;
};

inline bool passes(const ProjectRecord& r, const FilterCriteria& c) {
    return c.allowed_quality.contains(r.quality_rating) && c.allowed_methods.contains(r.counting_method) &&
           c.allowed_resource_levels.contains(r.resource_level) && c.allowed_dev_types.contains(r.development_type) &&
           (!c.require_counts || r.counts.has_value()) && (!c.require_gsc || r.gsc.has_value());
}

/// Order-preserving selection of the records meeting every criterion.
inline std::vector<ProjectRecord> filter_projects(const std::vector<ProjectRecord>& records,
                                                  const FilterCriteria& criteria) {
    criteria.validate();
    std::vector<ProjectRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [&](const ProjectRecord& r) { return passes(r, criteria); });
    return out;
}

struct SizeEffort {
    double ufp;
    double effort;
};

/// ln(Effort) = alpha * ln(UFP) + beta, so A = exp(beta), B = alpha.
struct RegressionFit {
    double alpha = 1;
    double beta = 0;
    double A = 1;
    double B = 1;
    double r_squared = 0;
    double residual_mean = 0;
    double residual_std = 0;
    std::size_t n = 0;

    /// A fit carrying only the equation coefficients.
    static RegressionFit from_coefficients(double a, double b) {
        if (!(a > 0)) throw ValidationError("coefficient A must be positive");
        RegressionFit f;
        f.A = a;
        f.B = b;
        f.alpha = b;
        f.beta = std::log(a);
        return f;
    }

    friend bool operator==(const RegressionFit&, const RegressionFit&) = default;
};

namespace detail {

inline void check_samples(const std::vector<SizeEffort>& samples) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].ufp > 0)) throw ValidationError("sample " + std::to_string(i) + ": UFP must be positive");
        if (!(samples[i].effort > 0))
            throw ValidationError("sample " + std::to_string(i) + ": effort must be positive");
    }
}

inline std::vector<double> log_residuals(const RegressionFit& fit, const std::vector<SizeEffort>& samples) {
    std::vector<double> res;
    res.reserve(samples.size());
    for (const auto& s : samples) res.push_back(std::log(s.effort) - (fit.alpha * std::log(s.ufp) + fit.beta));
    return res;
}

}  // namespace detail

inline RegressionFit fit_effort_equation(const std::vector<SizeEffort>& samples) {
    if (samples.size() < 3) throw ValidationError("at least 3 samples are required for the effort regression");
    detail::check_samples(samples);

    const double n = static_cast<double>(samples.size());
    double mean_u = 0, mean_e = 0;
    for (const auto& s : samples) {
        mean_u += std::log(s.ufp);
        mean_e += std::log(s.effort);
    }
    mean_u /= n;
    mean_e /= n;

    // Centered sums; fixed iteration order keeps the fit deterministic.
    double suu = 0, sue = 0, see = 0;
    for (const auto& s : samples) {
        const double du = std::log(s.ufp) - mean_u;
        const double de = std::log(s.effort) - mean_e;
        suu += du * du;
        sue += du * de;
        see += de * de;
    }
    if (!(suu > 1e-12 * n)) throw ValidationError("degenerate design: ln UFP has zero variance");

    RegressionFit fit;
    fit.alpha = sue / suu;
    fit.beta = mean_e - fit.alpha * mean_u;
    fit.A = std::exp(fit.beta);
    fit.B = fit.alpha;
    fit.n = samples.size();

    const auto res = detail::log_residuals(fit, samples);
    double rm = 0, sse = 0;
    for (double r : res) rm += r;
    rm /= n;
    for (double r : res) sse += (r - rm) * (r - rm);
    fit.residual_mean = rm;
    fit.residual_std = std::sqrt(sse / n);
    fit.r_squared = see > 0 ? std::clamp(1.0 - sse / see, 0.0, 1.0) : 1.0;
    return fit;
}

inline double predict_effort(const RegressionFit& fit, double ufp) {
    if (!(ufp > 0)) throw ValidationError("UFP must be positive to predict effort");
    return fit.A * std::pow(ufp, fit.B);
}

struct ResidualDiagnostics {
    double mean = 0;
    double std = 0;
    double skewness = 0;
    double excess_kurtosis = 0;
    double r_squared = 0;
    double correlation_with_log_ufp = 0;
    bool skewness_warning = false;
    bool kurtosis_warning = false;
};

/// Moment-based checks on log-space residuals. Warnings are advisory.
inline ResidualDiagnostics residual_diagnostics(const RegressionFit& fit, const std::vector<SizeEffort>& samples) {
    detail::check_samples(samples);
    ResidualDiagnostics d;
    d.r_squared = fit.r_squared;
    if (samples.empty()) return d;

    const auto res = detail::log_residuals(fit, samples);
    const double n = static_cast<double>(res.size());
    for (double r : res) d.mean += r;
    d.mean /= n;
    double m2 = 0, m3 = 0, m4 = 0, mean_u = 0;
    for (const auto& s : samples) mean_u += std::log(s.ufp);
    mean_u /= n;
    double cov = 0, var_u = 0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        const double e = res[i] - d.mean;
        m2 += e * e;
        m3 += e * e * e;
        m4 += e * e * e * e;
        const double du = std::log(samples[i].ufp) - mean_u;
        cov += e * du;
        var_u += du * du;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    d.std = std::sqrt(m2);
    // A residual scale this small relative to ln(effort) is numerically zero.
    if (m2 > 1e-24) {
        d.skewness = m3 / std::pow(m2, 1.5);
        d.excess_kurtosis = m4 / (m2 * m2) - 3.0;
        if (var_u > 0) d.correlation_with_log_ufp = cov / std::sqrt(m2 * n * var_u);
    }
    d.skewness_warning = std::abs(d.skewness) > 1.0;
    d.kurtosis_warning = std::abs(d.excess_kurtosis) > 2.0;
    return d;
}

/// (UFP, effort) pairs of the records that carry both counts and effort.
inline std::vector<SizeEffort> size_effort_samples(const std::vector<ProjectRecord>& records,
                                                   const WeightMatrix& weights) {
    std::vector<SizeEffort> out;
    for (const auto& r : records)
        if (r.counts && r.normalized_effort) out.push_back({unadjusted_fp(*r.counts, weights), *r.normalized_effort});
    return out;
}

}  // namespace fpcal
