#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "fpcal/dataio.hpp"
#include "test_support.hpp"

using namespace fpcal;

namespace {

std::string header_line() {
    std::string s;
    for (const auto& h : project_csv_header()) s += (s.empty() ? "" : ",") + h;
    return s;
}

std::string row(const std::string& head, const std::string& counts, const std::string& gsc, const std::string& effort) {
    return head + "," + counts + "," + gsc + "," + effort;
}

const std::string kCounts = "1,0,0,0,0,0,0,0,0,0,1,0,0,0,0";
const std::string kGsc = "0,0,0,0,0,0,0,0,0,0,0,0,0,0";

std::vector<ProjectRecord> parse_text(const std::string& text) {
    std::istringstream in(text);
    return read_projects_csv(in);
}

std::vector<CsvIssue> issues_of(const std::string& text) {
    try {
        parse_text(text);
    } catch (const CsvError& e) {
        return e.issues();
    }
    return {};
}

}  // namespace

TEST(Csv, ParserHandlesQuotingAndLineEndings) {
    const auto rows = csv::parse("a,\"b,c\",\"say \"\"hi\"\"\"\r\n\n\"multi\nline\",,x\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b,c", "say \"hi\""}));
    EXPECT_EQ(rows[1], (std::vector<std::string>{"multi\nline", "", "x"}));
    EXPECT_THROW(csv::parse("\"open"), CsvError);
    EXPECT_EQ(csv::escape("plain"), "plain");
    EXPECT_EQ(csv::escape("a\"b"), "\"a\"\"b\"");
}

TEST(Csv, HeaderNamesEveryCell) {
    const auto h = project_csv_header();
    ASSERT_EQ(h.size(), 5u + 15u + 14u + 1u);
    EXPECT_EQ(h[5], "z_ei_low");
    EXPECT_EQ(h[6], "z_ei_average");
    EXPECT_EQ(h[19], "z_eif_high");
    EXPECT_EQ(h[20], "gsc_1");
    EXPECT_EQ(h.back(), "normalized_effort");
}

TEST(ProjectCsv, HeaderOnlyGivesEmptyList) {
    EXPECT_TRUE(load_csv(testutil::fixture("header_only.csv")).empty());
}

TEST(ProjectCsv, ReadsFixture) {
    const auto records = load_csv(testutil::fixture("one_average_ilf.csv"));
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].id, "ILF-1");
    EXPECT_EQ((*records[0].counts)(ComponentKind::ILF, ComplexityClass::Average), 1);
    EXPECT_EQ(records[0].gsc->total(), 0);
    EXPECT_EQ(*records[0].normalized_effort, 100.0);
}

TEST(ProjectCsv, InvalidQualityNamesTheRow) {
    const auto issues = issues_of(header_line() + "\n" + row("ok,A,IFPUG,1,NewDevelopment", kCounts, kGsc, "10") + "\n" +
                                  row("bad,E,IFPUG,1,NewDevelopment", kCounts, kGsc, "10") + "\n");
    ASSERT_EQ(issues.size(), 1u);
    EXPECT_EQ(issues[0].row, 3u);
    EXPECT_NE(issues[0].message.find("quality_rating"), std::string::npos);
    try {
        parse_text(header_line() + "\n" + row("bad,E,IFPUG,1,NewDevelopment", kCounts, kGsc, "10") + "\n");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
    }
}

TEST(ProjectCsv, CollectsValueErrorsAcrossRows) {
    const auto issues =
        issues_of(header_line() + "\n" + row("x,A,IFPUG,7,NewDevelopment", kCounts, kGsc, "10") + "\n" +
                  row("x,A,SNAP,1,Sideways", "1,0,0,0,0,0,0,0,0,0,-1,0,0,0,0", "6,0,0,0,0,0,0,0,0,0,0,0,0,0", "-3") +
                  "\n" + row("y,A,IFPUG,1,NewDevelopment", "1,,,,,,,,,,,,,,", kGsc, "") + "\n");
    std::vector<std::size_t> rows;
    for (const auto& i : issues) rows.push_back(i.row);
    // row 2: level; row 3: duplicate, method, type, count, gsc, effort; row 4: partial counts
    EXPECT_EQ(rows, (std::vector<std::size_t>{2, 3, 3, 3, 3, 3, 3, 4}));
    EXPECT_NE(issues[1].message.find("duplicate id"), std::string::npos);
}

TEST(ProjectCsv, StructuralErrorsAbort) {
    EXPECT_FALSE(issues_of("").empty());
    EXPECT_FALSE(issues_of("id,quality\n").empty());
    const auto issues = issues_of(header_line() + "\nshort,A,IFPUG\n");
    ASSERT_EQ(issues.size(), 1u);
    EXPECT_EQ(issues[0].row, 2u);
    EXPECT_THROW(load_csv("/nonexistent/fpcal.csv"), ValidationError);
}

TEST(ProjectCsv, RoundTripsOptionalFieldsAndQuotedIds) {
    ProjectRecord a;
    a.id = "has,comma \"and quotes\"";
    a.quality_rating = QualityRating::C;
    a.counting_method = CountingMethod::MARK_II;
    a.resource_level = 3;
    a.development_type = DevelopmentType::Other;
    ProjectRecord b;
    b.id = "full";
    std::mt19937_64 rng(12);
    b.counts = testutil::random_counts(rng);
    b.gsc = GscRatings({5, 4, 3, 2, 1, 0, 5, 4, 3, 2, 1, 0, 5, 4});
    b.normalized_effort = 0.1 + 0.2;
    std::stringstream buf;
    write_projects_csv(buf, {a, b});
    EXPECT_EQ(read_projects_csv(buf), (std::vector<ProjectRecord>{a, b}));
}

TEST(ProjectCsv, GeneratedRoundTripIsExact) {
    GeneratorSpec g;
    g.n_projects = 300;
    g.seed = 77;
    const auto records = generate(g);
    testutil::TempDir dir;
    save_csv(dir.file("p.csv"), records);
    EXPECT_EQ(load_csv(dir.file("p.csv")), records);
}

TEST(InventoryCsv, GroupsRowsById) {
    std::istringstream in("id,kind,det,primary_files\nP,ILF,50,3\nQ,EI,4,1\nP,EO,7,2\n");
    const auto inv = read_inventory_csv(in);
    ASSERT_EQ(inv.size(), 2u);
    EXPECT_EQ(inv[0].id, "P");
    ASSERT_EQ(inv[0].items.size(), 2u);
    EXPECT_EQ(inv[0].items[1].kind, ComponentKind::EO);
    EXPECT_EQ(inv[0].items[1].files.data_elements, 7);
    EXPECT_EQ(inv[0].items[1].files.primary_files, 2);

    std::stringstream out;
    write_inventory_csv(out, inv);
    EXPECT_EQ(read_inventory_csv(out), inv);
}

TEST(InventoryCsv, RejectsBadRows) {
    std::istringstream bad_header("id,kind\n");
    EXPECT_THROW(read_inventory_csv(bad_header), CsvError);
    std::istringstream bad_values("id,kind,det,primary_files\nP,XYZ,5,1\nP,EI,-1,1\n");
    try {
        read_inventory_csv(bad_values);
        FAIL();
    } catch (const CsvError& e) {
        ASSERT_EQ(e.issues().size(), 2u);
        EXPECT_EQ(e.issues()[0].row, 2u);
        EXPECT_EQ(e.issues()[1].row, 3u);
    }
}

TEST(Generator, DeterministicPerSeed) {
    GeneratorSpec g;
    g.n_projects = 50;
    EXPECT_EQ(generate(g), generate(g));
    auto h = g;
    h.seed = g.seed + 1;
    EXPECT_NE(generate(g), generate(h));
}

TEST(Generator, NoiselessEffortFollowsEquation) {
    GeneratorSpec g;
    g.noise_sigma = 0;
    g.n_projects = 100;
    for (const auto& r : generate(g)) {
        ASSERT_TRUE(r.counts->any_positive());
        const double ufp = unadjusted_fp(*r.counts, g.true_weights);
        EXPECT_NEAR(*r.normalized_effort, g.true_A * std::pow(ufp, g.true_B), 1e-9 * *r.normalized_effort);
    }
}

TEST(Generator, NoiseLevelDoesNotShiftCounts) {
    GeneratorSpec a, b;
    a.n_projects = b.n_projects = 40;
    b.noise_sigma = 0;
    const auto x = generate(a), y = generate(b);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].counts, y[i].counts);
}

TEST(Generator, RecordsPassTheRepositoryFilter) {
    GeneratorSpec g;
    g.n_projects = 120;
    g.outlier_rate = 0.1;
    const auto records = generate(g);
    EXPECT_EQ(filter_projects(records, FilterCriteria::repository_default()).size(), records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        for (int c : records[i].counts->cells()) {
            EXPECT_GE(c, 0);
            EXPECT_LE(c, 20);
        }
}

TEST(Generator, FitRecoversTrueCoefficients) {
    GeneratorSpec g;
    g.noise_sigma = 0.1;
    g.n_projects = 400;
    const auto fit = fit_effort_equation(size_effort_samples(generate(g), g.true_weights));
    EXPECT_NEAR(fit.B, g.true_B, 0.05);
    EXPECT_NEAR(fit.A, g.true_A, 0.25 * g.true_A);
}

TEST(Generator, OutlierRateInflatesSomeEfforts) {
    GeneratorSpec clean, dirty;
    clean.n_projects = dirty.n_projects = 300;
    dirty.outlier_rate = 0.1;
    const auto x = generate(clean), y = generate(dirty);
    int inflated = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double ratio = *y[i].normalized_effort / *x[i].normalized_effort;
        if (std::abs(ratio - 10) < 1e-9) ++inflated;
        else EXPECT_NEAR(ratio, 1, 1e-12);
    }
    EXPECT_GT(inflated, 10);
    EXPECT_LT(inflated, 60);
}

TEST(Generator, RejectsBadSpec) {
    GeneratorSpec g;
    g.n_projects = 0;
    EXPECT_THROW(generate(g), ValidationError);
    g = GeneratorSpec{};
    g.max_counts.fill(0);
    EXPECT_THROW(generate(g), ValidationError);
    g = GeneratorSpec{};
    g.outlier_rate = 1;
    EXPECT_THROW(generate(g), ValidationError);
}
