#pragma once

// Crisp IFPUG function point arithmetic: complexity matrices, UFP, VAF, FP
// and the enhancement-project variant.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "fpcal/error.hpp"

namespace fpcal {

enum class ComponentKind : std::uint8_t { EI, EO, EQ, ILF, EIF };
enum class ComplexityClass : std::uint8_t { Low, Average, High };

inline constexpr std::size_t kComponentCount = 5;
inline constexpr std::size_t kClassCount = 3;
inline constexpr std::size_t kCellCount = kComponentCount * kClassCount;

inline constexpr std::array<ComponentKind, kComponentCount> kAllKinds = {
    ComponentKind::EI, ComponentKind::EO, ComponentKind::EQ, ComponentKind::ILF, ComponentKind::EIF};
inline constexpr std::array<ComplexityClass, kClassCount> kAllClasses = {
    ComplexityClass::Low, ComplexityClass::Average, ComplexityClass::High};

constexpr std::size_t index_of(ComponentKind k) { return static_cast<std::size_t>(k); }
constexpr std::size_t index_of(ComplexityClass c) { return static_cast<std::size_t>(c); }

/// Row-major cell index (kind, class) -> [0, 15), canonical EI..EIF x Low..High.
constexpr std::size_t cell_index(ComponentKind k, ComplexityClass c) {
    return index_of(k) * kClassCount + index_of(c);
}

constexpr std::string_view to_string(ComponentKind k) {
    constexpr std::array<std::string_view, kComponentCount> names = {"EI", "EO", "EQ", "ILF", "EIF"};
    return names[index_of(k)];
}

constexpr std::string_view to_string(ComplexityClass c) {
    constexpr std::array<std::string_view, kClassCount> names = {"low", "average", "high"};
    return names[index_of(c)];
}

inline std::optional<ComponentKind> parse_component_kind(std::string_view s) {
    for (auto k : kAllKinds)
        if (to_string(k) == s) return k;
    return std::nullopt;
}

inline std::optional<ComplexityClass> parse_complexity_class(std::string_view s) {
    for (auto c : kAllClasses)
        if (to_string(c) == s) return c;
    return std::nullopt;
}

/// RET for data functions (ILF/EIF), FTR for transactions (EI/EO/EQ), plus DET.
struct FileCounts {
    int primary_files = 0;
    int data_elements = 0;

    friend bool operator==(const FileCounts&, const FileCounts&) = default;
};

inline void validate(const FileCounts& f) {
    if (f.primary_files < 0 || f.data_elements < 0)
        throw ValidationError("file counts must be nonnegative");
}

inline constexpr bool is_data_function(ComponentKind k) {
    return k == ComponentKind::ILF || k == ComponentKind::EIF;
}

namespace detail {

// Band index 0/1/2 given the first value of band 1 and band 2.
constexpr int band(int value, int second_band_start, int third_band_start) {
    if (value >= third_band_start) return 2;
    if (value >= second_band_start) return 1;
    return 0;
}

// Shared Low/Avg/High layout of every IFPUG complexity matrix, [file band][det band].
inline constexpr std::array<std::array<ComplexityClass, 3>, 3> kMatrixPattern = {{
    {ComplexityClass::Low, ComplexityClass::Low, ComplexityClass::Average},
    {ComplexityClass::Low, ComplexityClass::Average, ComplexityClass::High},
    {ComplexityClass::Average, ComplexityClass::High, ComplexityClass::High},
}};

}  // namespace detail

/// Crisp IFPUG complexity matrix lookup. DET = 0 falls in the lowest DET band.
inline ComplexityClass classify_complexity(ComponentKind kind, const FileCounts& files) {
    validate(files);
    int file_band = 0;
    int det_band = 0;
    switch (kind) {
        case ComponentKind::ILF:
        case ComponentKind::EIF:
            file_band = detail::band(files.primary_files, 2, 6);
            det_band = detail::band(files.data_elements, 20, 51);
            break;
        case ComponentKind::EI:
            file_band = detail::band(files.primary_files, 2, 3);
            det_band = detail::band(files.data_elements, 5, 16);
            break;
        case ComponentKind::EO:
        case ComponentKind::EQ:
            file_band = detail::band(files.primary_files, 2, 4);
            det_band = detail::band(files.data_elements, 6, 20);
            break;
    }
    return detail::kMatrixPattern[static_cast<std::size_t>(file_band)][static_cast<std::size_t>(det_band)];
}

/// The Z_ij grid: how many components of each kind fell in each complexity class.
class ComponentCounts {
public:
    ComponentCounts() = default;
    explicit ComponentCounts(const std::array<int, kCellCount>& cells) : cells_(cells) {
        for (int c : cells_)
            if (c < 0) throw ValidationError("component counts must be nonnegative");
    }

    int operator()(ComponentKind k, ComplexityClass c) const { return cells_[cell_index(k, c)]; }
    void set(ComponentKind k, ComplexityClass c, int value) {
        if (value < 0) throw ValidationError("component counts must be nonnegative");
        cells_[cell_index(k, c)] = value;
    }
    void add(ComponentKind k, ComplexityClass c, int delta = 1) { set(k, c, (*this)(k, c) + delta); }

    const std::array<int, kCellCount>& cells() const { return cells_; }
    bool any_positive() const {
        for (int c : cells_)
            if (c > 0) return true;
        return false;
    }

    friend ComponentCounts operator+(const ComponentCounts& a, const ComponentCounts& b) {
        ComponentCounts out;
        for (std::size_t i = 0; i < kCellCount; ++i) out.cells_[i] = a.cells_[i] + b.cells_[i];
        return out;
    }
    friend bool operator==(const ComponentCounts&, const ComponentCounts&) = default;

private:
    std::array<int, kCellCount> cells_{};
};

/// The W_ij grid. Real-valued so calibrated weights use the same type.
/// Every component satisfies 0 < low < average < high.
class WeightMatrix {
public:
    explicit WeightMatrix(const std::array<double, kCellCount>& cells) : cells_(cells) { check(); }

    /// IFPUG standard weights.
    static WeightMatrix original() {
        return WeightMatrix({3, 4, 6,  //
                             4, 5, 7,  //
                             3, 4, 6,  //
                             7, 10, 15,  //
                             5, 7, 10});
    }

    double operator()(ComponentKind k, ComplexityClass c) const { return cells_[cell_index(k, c)]; }
    const std::array<double, kCellCount>& cells() const { return cells_; }

    WeightMatrix scaled(double factor) const {
        auto out = cells_;
        for (auto& w : out) w *= factor;
        return WeightMatrix(out);
    }

    friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

private:
    void check() const {
        for (auto k : kAllKinds) {
            const double lo = (*this)(k, ComplexityClass::Low);
            const double avg = (*this)(k, ComplexityClass::Average);
            const double hi = (*this)(k, ComplexityClass::High);
            const std::string where(to_string(k));
            for (auto c : kAllClasses)
                if (!((*this)(k, c) > 0) || !std::isfinite((*this)(k, c)))
                    throw ValidationError("weight for " + where + "." + std::string(to_string(c)) +
                                          " must be positive and finite");
            if (!(lo < avg)) throw ValidationError("weight for " + where + ".low must be below " + where + ".average");
            if (!(avg < hi)) throw ValidationError("weight for " + where + ".average must be below " + where + ".high");
        }
    }

    std::array<double, kCellCount> cells_{};
};

/// The 14 general system characteristic ratings, each a degree of influence 0..5.
class GscRatings {
public:
    static constexpr std::size_t kSize = 14;

    GscRatings() = default;
    explicit GscRatings(const std::array<int, kSize>& ratings) : ratings_(ratings) {
        for (std::size_t i = 0; i < kSize; ++i)
            if (ratings_[i] < 0 || ratings_[i] > 5)
                throw ValidationError("GSC rating " + std::to_string(i + 1) + " must be in [0, 5], got " +
                                      std::to_string(ratings_[i]));
    }

    const std::array<int, kSize>& ratings() const { return ratings_; }
    int total() const {
        int s = 0;
        for (int r : ratings_) s += r;
        return s;
    }

    friend bool operator==(const GscRatings&, const GscRatings&) = default;

private:
    std::array<int, kSize> ratings_{};
};

/// UFP = sum over the 15 cells of count x weight.
inline double unadjusted_fp(const ComponentCounts& counts, const WeightMatrix& weights) {
    double total = 0.0;
    for (std::size_t i = 0; i < kCellCount; ++i) total += counts.cells()[i] * weights.cells()[i];
    return total;
}

inline double value_adjustment_factor(const GscRatings& gsc) {
    return 0.65 + 0.01 * gsc.total();
}

inline double function_points(double ufp, double vaf) {
    if (ufp < 0) throw ValidationError("UFP must be nonnegative");
    if (vaf < 0.65 - 1e-12 || vaf > 1.35 + 1e-12) throw ValidationError("VAF must be in [0.65, 1.35]");
    return ufp * vaf;
}

/// Enhancement-project FP: added and changed functionality is adjusted by the
/// post-enhancement VAF, deleted functionality by the pre-enhancement VAF.
inline double enhancement_fp(double ufp_add, double ufp_change, double ufp_delete, double vaf_after,
                             double vaf_before) {
    if (ufp_add < 0 || ufp_change < 0 || ufp_delete < 0)
        throw ValidationError("enhancement UFP terms must be nonnegative");
    for (double vaf : {vaf_after, vaf_before})
        if (vaf < 0.65 - 1e-12 || vaf > 1.35 + 1e-12) throw ValidationError("VAF must be in [0.65, 1.35]");
    return (ufp_add + ufp_change) * vaf_after + ufp_delete * vaf_before;
}

}  // namespace fpcal
