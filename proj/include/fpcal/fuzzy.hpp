#pragma once

// Mamdani fuzzy complexity measurement. Each component is described by two
// trapezoidal input axes (DET and RET/FTR), three triangular output sets
// peaking at the component's weights, and the shared 3x3 linguistic rule base.
// Inference is min for AND, min implication, max aggregation and centroid
// defuzzification.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fpcal/error.hpp"
#include "fpcal/fp_core.hpp"

namespace fpcal {

/// Trapezoid with feet a, d and shoulders b, c. a == b or c == d gives a
/// vertical edge (shouldered set at an axis end).
struct TrapezoidMF {
    double a = 0, b = 0, c = 0, d = 0;

    double operator()(double x) const {
        if (x < a || x > d) return 0.0;
        if (x >= b && x <= c) return 1.0;
        if (x < b) return (x - a) / (b - a);
        return (d - x) / (d - c);
    }

    bool valid() const { return a <= b && b <= c && c <= d && a < d; }
    friend bool operator==(const TrapezoidMF&, const TrapezoidMF&) = default;
};

/// Triangle with feet a, c and peak b; a == b or b == c gives a right angle.
struct TriangleMF {
    double a = 0, b = 0, c = 0;

    double operator()(double x) const {
        if (x < a || x > c) return 0.0;
        if (x == b) return 1.0;
        if (x < b) return (x - a) / (b - a);
        return (c - x) / (c - b);
    }

    bool valid() const { return a <= b && b <= c && a < c; }
    double centroid() const { return (a + b + c) / 3.0; }
    friend bool operator==(const TriangleMF&, const TriangleMF&) = default;
};

enum class InputTerm : std::uint8_t { Small, Medium, Large };

struct InputFuzzySets {
    TrapezoidMF small, medium, large;

    const TrapezoidMF& operator[](InputTerm t) const {
        switch (t) {
            case InputTerm::Small: return small;
            case InputTerm::Medium: return medium;
            case InputTerm::Large: return large;
        }
        throw InternalError("bad input term");
    }

    /// Upper end of the axis; larger inputs are clamped here.
    double axis_max() const { return large.d; }

    std::array<double, 3> memberships(double x) const {
        const double xc = std::clamp(x, 0.0, axis_max());
        return {small(xc), medium(xc), large(xc)};
    }

    void validate(const std::string& where) const {
        if (!small.valid() || !medium.valid() || !large.valid())
            throw ValidationError(where + ": trapezoid parameters must satisfy a <= b <= c <= d, a < d");
        if (!(small.a <= medium.a && medium.a <= large.a))
            throw ValidationError(where + ": sets must be ordered small, medium, large");
        if (small.a != 0 || small.b != 0) throw ValidationError(where + ": small must be left-shouldered at 0");
        if (large.c != large.d) throw ValidationError(where + ": large must be right-shouldered");
        if (!(small.d > medium.a && medium.d > large.a))
            throw ValidationError(where + ": adjacent supports must overlap");
    }

    friend bool operator==(const InputFuzzySets&, const InputFuzzySets&) = default;
};

struct OutputFuzzySets {
    TriangleMF low, average, high;

    const TriangleMF& operator[](ComplexityClass c) const {
        switch (c) {
            case ComplexityClass::Low: return low;
            case ComplexityClass::Average: return average;
            case ComplexityClass::High: return high;
        }
        throw InternalError("bad complexity class");
    }

    /// Low (wL,wL,wA), Average (wL,wA,wH), High (wA,wH,wH).
    static OutputFuzzySets from_weights(double w_low, double w_avg, double w_high) {
        return {{w_low, w_low, w_avg}, {w_low, w_avg, w_high}, {w_avg, w_high, w_high}};
    }

    void validate(const std::string& where) const {
        if (!low.valid() || !average.valid() || !high.valid())
            throw ValidationError(where + ": triangle parameters must satisfy a <= b <= c, a < c");
        if (!(low.b < average.b && average.b < high.b))
            throw ValidationError(where + ": output peaks must be ordered low < average < high");
    }

    friend bool operator==(const OutputFuzzySets&, const OutputFuzzySets&) = default;
};

struct ComponentFuzzySets {
    InputFuzzySets input1;  ///< DET axis
    InputFuzzySets input2;  ///< RET (ILF/EIF) or FTR (EI/EO/EQ) axis
    OutputFuzzySets output;

    friend bool operator==(const ComponentFuzzySets&, const ComponentFuzzySets&) = default;
};

/// rule(input2 term, input1 term) -> output term
using RuleBase = std::array<std::array<ComplexityClass, 3>, 3>;

inline constexpr RuleBase kLinguisticRules = {{
    {ComplexityClass::Low, ComplexityClass::Low, ComplexityClass::Average},
    {ComplexityClass::Low, ComplexityClass::Average, ComplexityClass::High},
    {ComplexityClass::Average, ComplexityClass::High, ComplexityClass::High},
}};

class FuzzySystemConfig {
public:
    explicit FuzzySystemConfig(const std::array<ComponentFuzzySets, kComponentCount>& components,
                               const RuleBase& rules = kLinguisticRules)
        : components_(components), rules_(rules) {
        if (rules_ != kLinguisticRules)
            throw ValidationError("rule base must be the 3x3 linguistic complexity matrix");
        for (auto k : kAllKinds) {
            const auto& c = components_[index_of(k)];
            const std::string name(to_string(k));
            c.input1.validate(name + ".input1");
            c.input2.validate(name + ".input2");
            c.output.validate(name + ".output");
        }
    }

    const ComponentFuzzySets& operator[](ComponentKind k) const { return components_[index_of(k)]; }
    const std::array<ComponentFuzzySets, kComponentCount>& components() const { return components_; }
    const RuleBase& rules() const { return rules_; }

    friend bool operator==(const FuzzySystemConfig&, const FuzzySystemConfig&) = default;

private:
    std::array<ComponentFuzzySets, kComponentCount> components_;
    RuleBase rules_;
};

/// Crisp matrix bands of one input axis: the middle band is [middle_first, middle_last].
struct AxisBands {
    int middle_first;
    int middle_last;
};

/// Builds overlapping small/medium/large trapezoids around the crisp band edges.
/// With r = max(1, round((t2 - t1) / 6)):
///   wide axes (t1 - r > 1):  small (0,0,t1-r,t1+r), medium (t1-r,t1+r,t2-r,t2+r),
///                            large (t2-r,t2+r,D,D), D = t2 + 4r
///   narrow axes:             small (0,0,t1-r,t1),   medium (0,t1,max(t1,t2-r),t2+r),
///                            large (t2-r,t2+r,D,D), D = 2*t2 (at least t2+r+1)
/// Reproduces the published ILF/EIF DET (20..50) and RET (2..5) sets exactly.
inline InputFuzzySets construct_input_sets(AxisBands bands) {
    const double t1 = bands.middle_first;
    const double t2 = bands.middle_last;
    if (t1 < 1 || t2 < t1) throw ValidationError("axis bands must satisfy 1 <= middle_first <= middle_last");
    const double r = std::max(1.0, std::round((t2 - t1) / 6.0));
    if (t1 - r > 1) {
        const double top = t2 + 4 * r;
        return {{0, 0, t1 - r, t1 + r}, {t1 - r, t1 + r, t2 - r, t2 + r}, {t2 - r, t2 + r, top, top}};
    }
    const double top = std::max(2 * t2, t2 + r + 1);
    return {{0, 0, t1 - r, t1}, {0, t1, std::max(t1, t2 - r), t2 + r}, {t2 - r, t2 + r, top, top}};
}

/// Crisp band layout per component: {DET axis, RET/FTR axis}.
inline std::pair<AxisBands, AxisBands> crisp_axis_bands(ComponentKind kind) {
    switch (kind) {
        case ComponentKind::ILF:
        case ComponentKind::EIF: return {{20, 50}, {2, 5}};
        case ComponentKind::EI: return {{5, 15}, {2, 2}};
        case ComponentKind::EO:
        case ComponentKind::EQ: return {{6, 19}, {2, 3}};
    }
    throw InternalError("bad component kind");
}

namespace detail {

inline const InputFuzzySets kPublishedDataDetSets = {{0, 0, 15, 25}, {15, 25, 45, 55}, {45, 55, 70, 70}};
inline const InputFuzzySets kPublishedDataRetSets = {{0, 0, 1, 2}, {0, 2, 4, 6}, {4, 6, 10, 10}};

}  // namespace detail

inline FuzzySystemConfig default_config(const WeightMatrix& weights = WeightMatrix::original()) {
    std::array<ComponentFuzzySets, kComponentCount> comps;
    for (auto k : kAllKinds) {
        auto& c = comps[index_of(k)];
        if (is_data_function(k)) {
            c.input1 = detail::kPublishedDataDetSets;
            c.input2 = detail::kPublishedDataRetSets;
        } else {
            const auto [det_bands, file_bands] = crisp_axis_bands(k);
            c.input1 = construct_input_sets(det_bands);
            c.input2 = construct_input_sets(file_bands);
        }
        c.output = OutputFuzzySets::from_weights(weights(k, ComplexityClass::Low), weights(k, ComplexityClass::Average),
                                                 weights(k, ComplexityClass::High));
    }
    return FuzzySystemConfig(comps);
}

/// Same inputs and rules; output triangles rebuilt from the calibrated weights.
inline FuzzySystemConfig retune(const FuzzySystemConfig& config, const WeightMatrix& calibrated) {
    auto comps = config.components();
    for (auto k : kAllKinds)
        comps[index_of(k)].output =
            OutputFuzzySets::from_weights(calibrated(k, ComplexityClass::Low), calibrated(k, ComplexityClass::Average),
                                          calibrated(k, ComplexityClass::High));
    return FuzzySystemConfig(comps, config.rules());
}

enum class CentroidMethod { Analytic, Grid };

/// Firing strength per output term and the defuzzified region.
struct InferenceResult {
    std::array<double, kClassCount> strengths{};
    double area = 0;
    double centroid = 0;
};

namespace detail {

// Aggregated output membership: max over terms of min(strength, triangle).
inline double envelope(const OutputFuzzySets& out, const std::array<double, kClassCount>& s, double x) {
    double f = 0;
    for (auto c : kAllClasses) f = std::max(f, std::min(s[index_of(c)], out[c](x)));
    return f;
}

struct Line {
    double x0, y0, x1, y1;
    double at(double x) const { return y0 + (y1 - y0) * (x - x0) / (x1 - x0); }
};

// Exact area and first moment of the piecewise-linear envelope. Every kink lies
// on a triangle parameter, an edge/clip-level crossing, or an edge/edge crossing;
// between consecutive kinks the envelope is linear.
inline std::pair<double, double> analytic_area_moment(const OutputFuzzySets& out,
                                                      const std::array<double, kClassCount>& s) {
    std::vector<double> xs;
    std::vector<Line> edges;
    for (auto c : kAllClasses) {
        const auto& t = out[c];
        xs.insert(xs.end(), {t.a, t.b, t.c});
        if (t.b > t.a) edges.push_back({t.a, 0, t.b, 1});
        if (t.c > t.b) edges.push_back({t.b, 1, t.c, 0});
    }
    for (const auto& e : edges) {
        for (double level : s)
            if (level > 0 && level < 1) xs.push_back(e.x0 + (level - e.y0) * (e.x1 - e.x0) / (e.y1 - e.y0));
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        for (std::size_t j = i + 1; j < edges.size(); ++j) {
            const auto& p = edges[i];
            const auto& q = edges[j];
            const double mp = (p.y1 - p.y0) / (p.x1 - p.x0);
            const double mq = (q.y1 - q.y0) / (q.x1 - q.x0);
            if (mp == mq) continue;
            // p.y0 + mp (x - p.x0) = q.y0 + mq (x - q.x0)
            xs.push_back((q.y0 - p.y0 + mp * p.x0 - mq * q.x0) / (mp - mq));
        }
    }
    const double lo = std::min({out.low.a, out.average.a, out.high.a});
    const double hi = std::max({out.low.c, out.average.c, out.high.c});
    std::erase_if(xs, [&](double x) { return !(x >= lo && x <= hi); });
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    double area = 0, moment = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double x0 = xs[i], x1 = xs[i + 1];
        const double h = x1 - x0;
        if (h <= 0) continue;
        // One-sided limits recovered from two interior samples; this avoids the
        // vertical edges of right-angled triangles at the interval ends.
        const double fa = envelope(out, s, x0 + h / 3);
        const double fb = envelope(out, s, x0 + 2 * h / 3);
        const double f0 = 2 * fa - fb;
        const double f1 = 2 * fb - fa;
        area += h * (f0 + f1) / 2;
        moment += h / 6 * (x0 * (2 * f0 + f1) + x1 * (f0 + 2 * f1));
    }
    return {area, moment};
}

inline std::pair<double, double> grid_area_moment(const OutputFuzzySets& out,
                                                  const std::array<double, kClassCount>& s) {
    constexpr int kSamples = 2001;
    const double lo = std::min({out.low.a, out.average.a, out.high.a});
    const double hi = std::max({out.low.c, out.average.c, out.high.c});
    const double h = (hi - lo) / (kSamples - 1);
    double area = 0, moment = 0;
    for (int i = 0; i < kSamples; ++i) {
        const double x = lo + i * h;
        const double wgt = (i == 0 || i == kSamples - 1) ? 0.5 : 1.0;
        const double f = envelope(out, s, x);
        area += wgt * f * h;
        moment += wgt * x * f * h;
    }
    return {area, moment};
}

}  // namespace detail

inline InferenceResult infer(const FuzzySystemConfig& config, ComponentKind kind, const FileCounts& files,
                             CentroidMethod method = CentroidMethod::Analytic) {
    validate(files);
    const auto& comp = config[kind];
    const auto mu1 = comp.input1.memberships(files.data_elements);
    const auto mu2 = comp.input2.memberships(files.primary_files);

    InferenceResult r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            auto& s = r.strengths[index_of(config.rules()[i][j])];
            s = std::max(s, std::min(mu2[i], mu1[j]));
        }

    const auto [area, moment] = method == CentroidMethod::Analytic
                                    ? detail::analytic_area_moment(comp.output, r.strengths)
                                    : detail::grid_area_moment(comp.output, r.strengths);
    if (!(area > 0))
        throw InternalError("aggregated fuzzy region has zero area for " + std::string(to_string(kind)));
    r.area = area;
    r.centroid = moment / area;
    return r;
}

/// Continuous complexity weight for one component.
inline double fuzzy_weight(const FuzzySystemConfig& config, ComponentKind kind, const FileCounts& files,
                           CentroidMethod method = CentroidMethod::Analytic) {
    return infer(config, kind, files, method).centroid;
}

struct InventoryItem {
    ComponentKind kind;
    FileCounts files;

    friend bool operator==(const InventoryItem&, const InventoryItem&) = default;
};

/// Sum of fuzzy weights over a project's component inventory.
inline double fuzzy_ufp(const FuzzySystemConfig& config, const std::vector<InventoryItem>& components) {
    double total = 0;
    for (const auto& item : components) total += fuzzy_weight(config, item.kind, item.files);
    return total;
}

}  // namespace fpcal
