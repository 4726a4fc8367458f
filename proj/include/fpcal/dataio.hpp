#pragma once

// Project-record CSV interchange, component-inventory CSV, and the seeded
// synthetic repository generator.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpcal/effort_model.hpp"
#include "fpcal/error.hpp"
#include "fpcal/fp_core.hpp"
#include "fpcal/fuzzy.hpp"

namespace fpcal {

struct CsvIssue {
    std::size_t row;  ///< 1-based, header is row 1
    std::string message;
};

class CsvError : public ValidationError {
public:
    explicit CsvError(std::vector<CsvIssue> issues) : ValidationError(summarize(issues)), issues_(std::move(issues)) {}

    const std::vector<CsvIssue>& issues() const { return issues_; }

private:
    static std::string summarize(const std::vector<CsvIssue>& issues) {
        std::string s;
        for (const auto& i : issues) {
            if (!s.empty()) s += "; ";
            s += "row " + std::to_string(i.row) + ": " + i.message;
        }
        return s;
    }

    std::vector<CsvIssue> issues_;
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace csv {

inline std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

/// Splits RFC 4180 text into records of fields. Quoted fields may hold commas,
/// doubled quotes and line breaks. Blank lines are skipped.
inline std::vector<std::vector<std::string>> parse(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    auto end_row = [&] {
        if (field_started || !row.empty()) {
            row.push_back(std::move(field));
            rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        field_started = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                field_started = true;
                break;
            case '\r': break;
            case '\n': end_row(); break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (in_quotes) throw CsvError({{rows.size() + 1, "unterminated quoted field"}});
    end_row();
    return rows;
}

inline std::string read_all(std::istream& in) {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    T v{};
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) return std::nullopt;
    return v;
}

}  // namespace csv

/// Header of the project-record CSV.
inline std::vector<std::string> project_csv_header() {
    std::vector<std::string> h = {"id", "quality_rating", "counting_method", "resource_level", "development_type"};
    for (auto k : kAllKinds)
        for (auto c : kAllClasses) {
            std::string name = "z_";
            for (char ch : to_string(k)) name += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            name += "_";
            name += to_string(c);
            h.push_back(name);
        }
    for (std::size_t i = 1; i <= GscRatings::kSize; ++i) h.push_back("gsc_" + std::to_string(i));
    h.push_back("normalized_effort");
    return h;
}

inline void write_projects_csv(std::ostream& out, const std::vector<ProjectRecord>& records) {
    const auto header = project_csv_header();
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& r : records) {
        out << csv::escape(r.id) << ',' << to_string(r.quality_rating) << ',' << to_string(r.counting_method) << ','
            << r.resource_level << ',' << to_string(r.development_type);
        for (std::size_t i = 0; i < kCellCount; ++i) {
            out << ',';
            if (r.counts) out << r.counts->cells()[i];
        }
        for (std::size_t i = 0; i < GscRatings::kSize; ++i) {
            out << ',';
            if (r.gsc) out << r.gsc->ratings()[i];
        }
        out << ',';
        if (r.normalized_effort) out << format_number(*r.normalized_effort);
        out << '\n';
    }
}

/// Structural problems (header, column count) abort immediately; value
/// problems are collected across all rows and reported together.
inline std::vector<ProjectRecord> read_projects_csv(std::istream& in) {
    const auto rows = csv::parse(csv::read_all(in));
    const auto header = project_csv_header();
    if (rows.empty()) throw CsvError({{1, "missing header row"}});
    if (rows.front() != header) throw CsvError({{1, "header does not match the project record schema"}});

    std::vector<ProjectRecord> out;
    std::vector<CsvIssue> issues;
    std::set<std::string> seen_ids;
    constexpr std::size_t kFirstCount = 5;
    constexpr std::size_t kFirstGsc = kFirstCount + kCellCount;
    constexpr std::size_t kEffort = kFirstGsc + GscRatings::kSize;

    for (std::size_t ri = 1; ri < rows.size(); ++ri) {
        const auto& f = rows[ri];
        const std::size_t row_no = ri + 1;
        if (f.size() != header.size())
            throw CsvError({{row_no, "expected " + std::to_string(header.size()) + " columns, found " +
                                         std::to_string(f.size())}});
        auto issue = [&](std::string msg) { issues.push_back({row_no, std::move(msg)}); };

        ProjectRecord r;
        r.id = f[0];
        if (r.id.empty()) issue("id is empty");
        else if (!seen_ids.insert(r.id).second) issue("duplicate id '" + r.id + "'");

        if (auto q = parse_quality(f[1])) r.quality_rating = *q;
        else issue("invalid quality_rating '" + f[1] + "'");
        if (auto m = parse_counting_method(f[2])) r.counting_method = *m;
        else issue("invalid counting_method '" + f[2] + "'");
        auto level = csv::parse_number<int>(f[3]);
        if (level && *level >= 1 && *level <= 4) r.resource_level = *level;
        else issue("invalid resource_level '" + f[3] + "'");
        if (auto t = parse_development_type(f[4])) r.development_type = *t;
        else issue("invalid development_type '" + f[4] + "'");

        // Counts and GSC are all-or-nothing groups.
        std::size_t empty_counts = 0;
        std::array<int, kCellCount> cells{};
        bool counts_ok = true;
        for (std::size_t i = 0; i < kCellCount; ++i) {
            const auto& cell = f[kFirstCount + i];
            if (cell.empty()) {
                ++empty_counts;
                continue;
            }
            auto v = csv::parse_number<int>(cell);
            if (!v || *v < 0) {
                issue("invalid count '" + cell + "' in " + header[kFirstCount + i]);
                counts_ok = false;
            } else {
                cells[i] = *v;
            }
        }
        if (empty_counts != 0 && empty_counts != kCellCount) {
            issue("component counts must be all present or all empty");
        } else if (empty_counts == 0 && counts_ok) {
            r.counts = ComponentCounts(cells);
        }

        std::size_t empty_gsc = 0;
        std::array<int, GscRatings::kSize> ratings{};
        bool gsc_ok = true;
        for (std::size_t i = 0; i < GscRatings::kSize; ++i) {
            const auto& cell = f[kFirstGsc + i];
            if (cell.empty()) {
                ++empty_gsc;
                continue;
            }
            auto v = csv::parse_number<int>(cell);
            if (!v || *v < 0 || *v > 5) {
                issue("invalid GSC rating '" + cell + "' in " + header[kFirstGsc + i]);
                gsc_ok = false;
            } else {
                ratings[i] = *v;
            }
        }
        if (empty_gsc != 0 && empty_gsc != GscRatings::kSize) {
            issue("GSC ratings must be all present or all empty");
        } else if (empty_gsc == 0 && gsc_ok) {
            r.gsc = GscRatings(ratings);
        }

        if (!f[kEffort].empty()) {
            auto e = csv::parse_number<double>(f[kEffort]);
            if (e && *e > 0 && std::isfinite(*e)) r.normalized_effort = *e;
            else issue("invalid normalized_effort '" + f[kEffort] + "'");
        }
        out.push_back(std::move(r));
    }
    if (!issues.empty()) throw CsvError(std::move(issues));
    return out;
}

inline std::vector<ProjectRecord> load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    return read_projects_csv(in);
}

inline void save_csv(const std::string& path, const std::vector<ProjectRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    write_projects_csv(out, records);
}

/// One project's fuzzy-countable components, in file order.
struct ProjectInventory {
    std::string id;
    std::vector<InventoryItem> items;

    friend bool operator==(const ProjectInventory&, const ProjectInventory&) = default;
};

inline const std::vector<std::string> kInventoryHeader = {"id", "kind", "det", "primary_files"};

inline void write_inventory_csv(std::ostream& out, const std::vector<ProjectInventory>& projects) {
    out << "id,kind,det,primary_files\n";
    for (const auto& p : projects)
        for (const auto& item : p.items)
            out << csv::escape(p.id) << ',' << to_string(item.kind) << ',' << item.files.data_elements << ','
                << item.files.primary_files << '\n';
}

/// Rows sharing an id are grouped into one inventory, ordered by first appearance.
inline std::vector<ProjectInventory> read_inventory_csv(std::istream& in) {
    const auto rows = csv::parse(csv::read_all(in));
    if (rows.empty() || rows.front() != kInventoryHeader)
        throw CsvError({{1, "header must be id,kind,det,primary_files"}});
    std::vector<ProjectInventory> out;
    std::vector<CsvIssue> issues;
    for (std::size_t ri = 1; ri < rows.size(); ++ri) {
        const auto& f = rows[ri];
        const std::size_t row_no = ri + 1;
        if (f.size() != kInventoryHeader.size()) throw CsvError({{row_no, "expected 4 columns"}});
        const auto kind = parse_component_kind(f[1]);
        const auto det = csv::parse_number<int>(f[2]);
        const auto files = csv::parse_number<int>(f[3]);
        if (!kind) issues.push_back({row_no, "invalid kind '" + f[1] + "'"});
        if (!det || *det < 0) issues.push_back({row_no, "invalid det '" + f[2] + "'"});
        if (!files || *files < 0) issues.push_back({row_no, "invalid primary_files '" + f[3] + "'"});
        if (!kind || !det || !files || *det < 0 || *files < 0) continue;
        auto it = std::find_if(out.begin(), out.end(), [&](const ProjectInventory& p) { return p.id == f[0]; });
        if (it == out.end()) {
            out.push_back({f[0], {}});
            it = std::prev(out.end());
        }
        it->items.push_back({*kind, {*files, *det}});
    }
    if (!issues.empty()) throw CsvError(std::move(issues));
    return out;
}

struct GeneratorSpec {
    int n_projects = 184;
    WeightMatrix true_weights = default_true_weights();
    double true_A = 3.5;
    double true_B = 0.9;
    std::array<int, kCellCount> max_counts = default_max_counts();
    double noise_sigma = 0.3;
    double outlier_rate = 0.0;
    double outlier_multiplier = 10.0;
    std::uint64_t seed = 42;

    /// Non-uniform departure from the standard weights: transactions and low
    /// classes cheaper, high data-function classes nearly unchanged.
    static WeightMatrix default_true_weights() {
        return WeightMatrix({2.0, 3.0, 5.5,  //
                             3.2, 3.8, 6.2,  //
                             1.8, 2.9, 5.4,  //
                             5.4, 9.8, 14.9,  //
                             4.6, 6.9, 10.0});
    }

    /// Uniform per-cell maxima, skewed toward inputs, outputs and internal files.
    static std::array<int, kCellCount> default_max_counts() {
        constexpr std::array<int, kComponentCount> per_kind = {20, 20, 12, 15, 6};
        std::array<int, kCellCount> out{};
        for (std::size_t k = 0; k < kComponentCount; ++k)
            for (std::size_t c = 0; c < kClassCount; ++c) out[k * kClassCount + c] = per_kind[k];
        return out;
    }

    void validate() const {
        if (n_projects <= 0) throw ValidationError("n_projects must be positive");
        if (!(true_A > 0)) throw ValidationError("true_A must be positive");
        if (!std::isfinite(true_B)) throw ValidationError("true_B must be finite");
        bool any = false;
        for (int m : max_counts) {
            if (m < 0) throw ValidationError("max_counts must be nonnegative");
            any = any || m > 0;
        }
        if (!any) throw ValidationError("max_counts must allow at least one positive cell");
        if (!(noise_sigma >= 0)) throw ValidationError("noise_sigma must be nonnegative");
        if (!(outlier_rate >= 0 && outlier_rate < 1)) throw ValidationError("outlier_rate must be in [0, 1)");
        if (!(outlier_multiplier > 0)) throw ValidationError("outlier_multiplier must be positive");
    }
};

/// Deterministic per seed. Every record passes the repository filter.
inline std::vector<ProjectRecord> generate(const GeneratorSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> rating(0, 5);

    std::vector<ProjectRecord> out;
    out.reserve(static_cast<std::size_t>(spec.n_projects));
    const int width = std::max(4, static_cast<int>(std::to_string(spec.n_projects).size()));
    for (int p = 0; p < spec.n_projects; ++p) {
        ComponentCounts counts;
        do {
            std::array<int, kCellCount> cells{};
            for (std::size_t i = 0; i < kCellCount; ++i)
                cells[i] = std::uniform_int_distribution<int>(0, spec.max_counts[i])(rng);
            counts = ComponentCounts(cells);
        } while (!counts.any_positive());

        std::array<int, GscRatings::kSize> gsc{};
        for (auto& g : gsc) g = rating(rng);

        const double ufp = unadjusted_fp(counts, spec.true_weights);
        double effort = spec.true_A * std::pow(ufp, spec.true_B);
        const double eps = noise(rng);
        if (spec.noise_sigma > 0) effort *= std::exp(spec.noise_sigma * eps);
        if (unit(rng) < spec.outlier_rate) effort *= spec.outlier_multiplier;

        std::string id = std::to_string(p + 1);
        id.insert(0, static_cast<std::size_t>(std::max(0, width - static_cast<int>(id.size()))), '0');

        ProjectRecord r;
        r.id = "SYN-" + id;
        r.counts = counts;
        r.gsc = GscRatings(gsc);
        r.normalized_effort = effort;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace fpcal
