#pragma once

// Seeded generators for property-style tests.

#include <array>
#include <filesystem>
#include <random>
#include <string>

#include "fpcal/fp_core.hpp"

namespace fpcal::testutil {

inline std::array<int, kCellCount> random_cells(std::mt19937_64& rng, int max_count = 20) {
    std::uniform_int_distribution<int> d(0, max_count);
    std::array<int, kCellCount> cells{};
    for (auto& c : cells) c = d(rng);
    return cells;
}

inline ComponentCounts random_counts(std::mt19937_64& rng, int max_count = 20) {
    return ComponentCounts(random_cells(rng, max_count));
}

/// Random weights with low < average < high per component, gaps of at least 0.05.
inline WeightMatrix random_weights(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> base(0.5, 8.0), step(0.05, 5.0);
    std::array<double, kCellCount> w{};
    for (std::size_t k = 0; k < kComponentCount; ++k) {
        w[k * 3] = base(rng);
        w[k * 3 + 1] = w[k * 3] + step(rng);
        w[k * 3 + 2] = w[k * 3 + 1] + step(rng);
    }
    return WeightMatrix(w);
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("fpcal-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string fixture(const std::string& name) { return std::string(FPCAL_FIXTURES) + "/" + name; }

}  // namespace fpcal::testutil
