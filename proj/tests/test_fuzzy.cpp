#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fpcal/fuzzy.hpp"
#include "test_support.hpp"

using namespace fpcal;

namespace {

const FuzzySystemConfig& original_config() {
    static const FuzzySystemConfig cfg = default_config(WeightMatrix::original());
    return cfg;
}

// Independent route: membership functions written out from their definitions,
// rules from the linguistic matrix, centroid by dense midpoint quadrature.
double oracle_weight(const ComponentFuzzySets& sets, double det, double files) {
    auto trap = [](const TrapezoidMF& m, double x) {
        if (x < m.a || x > m.d) return 0.0;
        if (x < m.b) return (x - m.a) / (m.b - m.a);
        if (x <= m.c) return 1.0;
        return (m.d - x) / (m.d - m.c);
    };
    auto tri = [](const TriangleMF& m, double x) {
        if (x < m.a || x > m.c) return 0.0;
        if (x < m.b) return (x - m.a) / (m.b - m.a);
        if (x > m.b) return (m.c - x) / (m.c - m.b);
        return 1.0;
    };
    det = std::min(det, sets.input1.large.d);
    files = std::min(files, sets.input2.large.d);
    const double in1[3] = {trap(sets.input1.small, det), trap(sets.input1.medium, det), trap(sets.input1.large, det)};
    const double in2[3] = {trap(sets.input2.small, files), trap(sets.input2.medium, files),
                           trap(sets.input2.large, files)};
    // rows: input2 small/medium/large; columns: input1 small/medium/large; 0 low, 1 average, 2 high
    const int table[3][3] = {{0, 0, 1}, {0, 1, 2}, {1, 2, 2}};
    double s[3] = {0, 0, 0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s[table[i][j]] = std::max(s[table[i][j]], std::min(in2[i], in1[j]));
    const TriangleMF outs[3] = {sets.output.low, sets.output.average, sets.output.high};
    const double lo = outs[0].a, hi = outs[2].c;
    constexpr int n = 200000;
    const double h = (hi - lo) / n;
    double area = 0, moment = 0;
    for (int i = 0; i < n; ++i) {
        const double x = lo + (i + 0.5) * h;
        double f = 0;
        for (int k = 0; k < 3; ++k) f = std::max(f, std::min(s[k], tri(outs[k], x)));
        area += f * h;
        moment += x * f * h;
    }
    return moment / area;
}

}  // namespace

TEST(Membership, TrapezoidShape) {
    const TrapezoidMF m{15, 25, 45, 55};
    EXPECT_EQ(m(10), 0.0);
    EXPECT_EQ(m(15), 0.0);
    EXPECT_DOUBLE_EQ(m(20), 0.5);
    EXPECT_EQ(m(25), 1.0);
    EXPECT_EQ(m(45), 1.0);
    EXPECT_DOUBLE_EQ(m(50), 0.5);
    EXPECT_EQ(m(60), 0.0);
    const TrapezoidMF shoulder{0, 0, 15, 25};
    EXPECT_EQ(shoulder(0), 1.0);
}

TEST(Membership, TriangleShapeWithRightAngles) {
    const TriangleMF low{7, 7, 10};
    EXPECT_EQ(low(7), 1.0);
    EXPECT_NEAR(low(8.5), 0.5, 1e-15);
    EXPECT_EQ(low(10), 0.0);
    const TriangleMF avg{7, 10, 15};
    EXPECT_EQ(avg(10), 1.0);
    EXPECT_NEAR(avg(12.5), 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(avg.centroid(), 32.0 / 3.0);
}

TEST(Membership, BoundedAndPiecewiseLinear) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> x(-5, 100);
    for (auto k : kAllKinds) {
        const auto& c = original_config()[k];
        for (const auto* sets : {&c.input1, &c.input2})
            for (auto t : {InputTerm::Small, InputTerm::Medium, InputTerm::Large}) {
                const auto& m = (*sets)[t];
                for (int i = 0; i < 500; ++i) {
                    const double v = m(x(rng));
                    EXPECT_GE(v, 0.0);
                    EXPECT_LE(v, 1.0);
                }
                // linear between breakpoints: midpoint value is the mean of the ends
                const double bp[4] = {m.a, m.b, m.c, m.d};
                for (int i = 0; i < 3; ++i) {
                    if (bp[i + 1] - bp[i] < 1e-9) continue;
                    const double l = bp[i] + 1e-9, r = bp[i + 1] - 1e-9;
                    EXPECT_NEAR(m((l + r) / 2), (m(l) + m(r)) / 2, 1e-6);
                }
            }
    }
}

TEST(DefaultConfig, DataFunctionInputsArePublishedSets) {
    for (auto k : {ComponentKind::ILF, ComponentKind::EIF}) {
        const auto& c = original_config()[k];
        EXPECT_EQ(c.input1.small, (TrapezoidMF{0, 0, 15, 25}));
        EXPECT_EQ(c.input1.medium, (TrapezoidMF{15, 25, 45, 55}));
        EXPECT_EQ(c.input1.large, (TrapezoidMF{45, 55, 70, 70}));
        EXPECT_EQ(c.input2.small, (TrapezoidMF{0, 0, 1, 2}));
        EXPECT_EQ(c.input2.medium, (TrapezoidMF{0, 2, 4, 6}));
        EXPECT_EQ(c.input2.large, (TrapezoidMF{4, 6, 10, 10}));
    }
}

TEST(DefaultConfig, ConstructionRuleReproducesPublishedSets) {
    EXPECT_EQ(construct_input_sets({20, 50}), original_config()[ComponentKind::ILF].input1);
    EXPECT_EQ(construct_input_sets({2, 5}), original_config()[ComponentKind::ILF].input2);
}

TEST(DefaultConfig, TransactionAxesFollowConstructionRule) {
    const auto& ei = original_config()[ComponentKind::EI];
    EXPECT_EQ(ei.input1, (InputFuzzySets{{0, 0, 3, 7}, {3, 7, 13, 17}, {13, 17, 23, 23}}));
    EXPECT_EQ(ei.input2, (InputFuzzySets{{0, 0, 1, 2}, {0, 2, 2, 3}, {1, 3, 4, 4}}));
    const auto& eo = original_config()[ComponentKind::EO];
    EXPECT_EQ(eo.input1, (InputFuzzySets{{0, 0, 4, 8}, {4, 8, 17, 21}, {17, 21, 27, 27}}));
    EXPECT_EQ(eo.input2, (InputFuzzySets{{0, 0, 1, 2}, {0, 2, 2, 4}, {2, 4, 6, 6}}));
    EXPECT_EQ(original_config()[ComponentKind::EQ].input1, eo.input1);
}

TEST(DefaultConfig, OutputTrianglesFromWeights) {
    const auto& ilf = original_config()[ComponentKind::ILF].output;
    EXPECT_EQ(ilf.low, (TriangleMF{7, 7, 10}));
    EXPECT_EQ(ilf.average, (TriangleMF{7, 10, 15}));
    EXPECT_EQ(ilf.high, (TriangleMF{10, 15, 15}));
    const auto& ei = original_config()[ComponentKind::EI].output;
    EXPECT_EQ(ei.low, (TriangleMF{3, 3, 4}));
    EXPECT_EQ(ei.average, (TriangleMF{3, 4, 6}));
    EXPECT_EQ(ei.high, (TriangleMF{4, 6, 6}));

    auto cells = WeightMatrix::original().cells();
    cells[0] = 1.8;
    cells[1] = 2.9;
    cells[2] = 5.4;
    const auto cal = default_config(WeightMatrix(cells))[ComponentKind::EI].output;
    EXPECT_EQ(cal.low, (TriangleMF{1.8, 1.8, 2.9}));
    EXPECT_EQ(cal.average, (TriangleMF{1.8, 2.9, 5.4}));
    EXPECT_EQ(cal.high, (TriangleMF{2.9, 5.4, 5.4}));
}

TEST(FuzzyWeight, PublishedIlfExamples) {
    EXPECT_NEAR(fuzzy_weight(original_config(), ComponentKind::ILF, {3, 50}), 11.4, 0.15);
    EXPECT_NEAR(fuzzy_weight(original_config(), ComponentKind::ILF, {3, 20}), 10.4, 0.15);
    EXPECT_NEAR(fuzzy_weight(original_config(), ComponentKind::ILF, {3, 19}), 10.2, 0.15);
    EXPECT_NEAR(fuzzy_weight(original_config(), ComponentKind::ILF, {3, 35}), 32.0 / 3.0, 0.05);
}

TEST(FuzzyWeight, AnalyticCentroidMatchesQuadratureOracle) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> det(0, 90), files(0, 14);
    for (int trial = 0; trial < 60; ++trial) {
        const auto cfg = trial % 2 ? original_config() : default_config(testutil::random_weights(rng));
        for (auto k : kAllKinds) {
            const FileCounts f{files(rng), det(rng)};
            EXPECT_NEAR(fuzzy_weight(cfg, k, f), oracle_weight(cfg[k], f.data_elements, f.primary_files), 1e-6)
                << to_string(k) << " det=" << f.data_elements << " files=" << f.primary_files;
        }
    }
}

TEST(FuzzyWeight, GridCentroidAgreesWithAnalytic) {
    for (int det = 0; det <= 80; det += 3)
        for (int ret = 0; ret <= 10; ++ret) {
            const FileCounts f{ret, det};
            EXPECT_NEAR(fuzzy_weight(original_config(), ComponentKind::ILF, f, CentroidMethod::Grid),
                        fuzzy_weight(original_config(), ComponentKind::ILF, f), 2e-3);
        }
}

TEST(FuzzyWeight, StaysWithinOutputRange) {
    for (auto k : kAllKinds) {
        const auto& out = original_config()[k].output;
        for (int det = 0; det <= 100; ++det)
            for (int f = 0; f <= 12; ++f) {
                const double w = fuzzy_weight(original_config(), k, {f, det});
                EXPECT_GE(w, out.low.b);
                EXPECT_LE(w, out.high.b);
            }
    }
}

TEST(FuzzyWeight, SingleFullRuleGivesTriangleCentroid) {
    for (auto k : kAllKinds) {
        const auto& c = original_config()[k];
        for (auto t2 : {InputTerm::Small, InputTerm::Medium, InputTerm::Large})
            for (auto t1 : {InputTerm::Small, InputTerm::Medium, InputTerm::Large}) {
                // a point on each set's plateau where no neighbour fires
                auto plateau = [](const InputFuzzySets& s, InputTerm t) -> std::optional<int> {
                    for (int x = 0; x <= static_cast<int>(s.axis_max()); ++x) {
                        const auto mu = s.memberships(x);
                        if (mu[static_cast<std::size_t>(t)] == 1.0 && mu[0] + mu[1] + mu[2] == 1.0) return x;
                    }
                    return std::nullopt;
                };
                const auto x1 = plateau(c.input1, t1);
                const auto x2 = plateau(c.input2, t2);
                if (!x1 || !x2) continue;
                const auto out = kLinguisticRules[static_cast<std::size_t>(t2)][static_cast<std::size_t>(t1)];
                EXPECT_NEAR(fuzzy_weight(original_config(), k, {*x2, *x1}), c.output[out].centroid(), 1e-12);
            }
    }
}

TEST(FuzzyWeight, ScalesWithOutputAxis) {
    std::mt19937_64 rng(5);
    for (double factor : {0.5, 1.7, 3.0}) {
        const auto w = testutil::random_weights(rng);
        const auto base = default_config(w);
        const auto scaled = default_config(w.scaled(factor));
        for (auto k : kAllKinds)
            for (int det = 0; det <= 60; det += 7)
                for (int f = 0; f <= 8; ++f)
                    EXPECT_NEAR(fuzzy_weight(scaled, k, {f, det}), factor * fuzzy_weight(base, k, {f, det}), 1e-9);
    }
}

TEST(FuzzyWeight, InputsBeyondAxisClamp) {
    EXPECT_EQ(fuzzy_weight(original_config(), ComponentKind::ILF, {3, 200}),
              fuzzy_weight(original_config(), ComponentKind::ILF, {3, 70}));
    EXPECT_EQ(fuzzy_weight(original_config(), ComponentKind::ILF, {40, 200}),
              fuzzy_weight(original_config(), ComponentKind::ILF, {10, 70}));
}

TEST(FuzzyWeight, RemovesCrispBoundaryJump) {
    const double crisp_jump = WeightMatrix::original()(ComponentKind::ILF, ComplexityClass::Average) -
                              WeightMatrix::original()(ComponentKind::ILF, ComplexityClass::Low);
    const double fuzzy_jump = fuzzy_weight(original_config(), ComponentKind::ILF, {3, 20}) -
                              fuzzy_weight(original_config(), ComponentKind::ILF, {3, 19});
    EXPECT_EQ(crisp_jump, 3.0);
    EXPECT_GT(fuzzy_jump, 0.0);
    EXPECT_LT(fuzzy_jump, 0.5);
}

// Min implication clips a right-angled output triangle; the clipped region's
// centroid sits left of the full triangle's, so a weaker single-consequent
// firing can give a smaller weight than a full-strength one.
TEST(FuzzyWeight, ClippingShoulderedOutputMovesCentroid) {
    const double full_high = fuzzy_weight(original_config(), ComponentKind::ILF, {4, 70});
    const double half_high = fuzzy_weight(original_config(), ComponentKind::ILF, {5, 70});
    EXPECT_NEAR(full_high, (10.0 + 15 + 15) / 3, 1e-12);
    EXPECT_LT(half_high, full_high);
}

TEST(FuzzyUfp, SumsInventory) {
    EXPECT_EQ(fuzzy_ufp(original_config(), {}), 0.0);
    const std::vector<InventoryItem> three_files = {
        {ComponentKind::ILF, {3, 50}}, {ComponentKind::ILF, {3, 20}}, {ComponentKind::ILF, {3, 19}}};
    EXPECT_NEAR(fuzzy_ufp(original_config(), three_files), 32.0, 0.45);
    EXPECT_NEAR(fuzzy_ufp(original_config(), {{ComponentKind::ILF, {3, 35}}}), 32.0 / 3.0, 1e-12);
}

TEST(Retune, RebuildsOutputsOnly) {
    EXPECT_EQ(retune(original_config(), WeightMatrix::original()), original_config());

    auto cells = WeightMatrix::original().cells();
    cells[cell_index(ComponentKind::ILF, ComplexityClass::Low)] = 5.4;
    cells[cell_index(ComponentKind::ILF, ComplexityClass::Average)] = 9.8;
    cells[cell_index(ComponentKind::ILF, ComplexityClass::High)] = 14.9;
    const WeightMatrix calibrated(cells);
    const auto once = retune(original_config(), calibrated);
    const auto& ilf = once[ComponentKind::ILF];
    EXPECT_EQ(ilf.output.low, (TriangleMF{5.4, 5.4, 9.8}));
    EXPECT_EQ(ilf.output.average, (TriangleMF{5.4, 9.8, 14.9}));
    EXPECT_EQ(ilf.output.high, (TriangleMF{9.8, 14.9, 14.9}));
    EXPECT_EQ(ilf.input1, original_config()[ComponentKind::ILF].input1);
    EXPECT_EQ(ilf.input2, original_config()[ComponentKind::ILF].input2);
    EXPECT_EQ(retune(once, calibrated), once);
}

TEST(FuzzySystemConfig, RejectsInvalidSets) {
    auto comps = original_config().components();
    comps[0].input1.medium = {10, 5, 6, 8};
    EXPECT_THROW(FuzzySystemConfig{comps}, ValidationError);
    comps = original_config().components();
    comps[0].output.high = {4, 3.5, 6};
    EXPECT_THROW(FuzzySystemConfig{comps}, ValidationError);
    comps = original_config().components();
    comps[3].input2.large = {7, 8, 10, 10};  // gap after medium (0,2,4,6)
    EXPECT_THROW(FuzzySystemConfig{comps}, ValidationError);
    auto rules = kLinguisticRules;
    rules[0][0] = ComplexityClass::High;
    EXPECT_THROW(FuzzySystemConfig(original_config().components(), rules), ValidationError);
}
