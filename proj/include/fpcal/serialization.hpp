#pragma once

// JSON documents exchanged by the CLI stages.

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpcal/calibrator.hpp"
#include "fpcal/dataio.hpp"
#include "fpcal/effort_model.hpp"
#include "fpcal/error.hpp"
#include "fpcal/evaluation.hpp"
#include "fpcal/fp_core.hpp"
#include "fpcal/fuzzy.hpp"

namespace fpcal {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& member(const Json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw ValidationError(where + "." + key + ": missing");
    return *it;
}

inline double number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ValidationError(where + ": must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ValidationError(where + ": must be finite");
    return v;
}

inline double number_at(const Json& j, const std::string& key, const std::string& where) {
    return number(member(j, key, where), where + "." + key);
}

inline long long integer_at(const Json& j, const std::string& key, const std::string& where) {
    const auto& v = member(j, key, where);
    if (!v.is_number_integer()) throw ValidationError(where + "." + key + ": must be an integer");
    return v.get<long long>();
}

template <typename T, typename Fn>
void optional_field(const Json& j, const std::string& key, T& out, Fn&& read) {
    if (j.is_object() && j.contains(key)) out = read(key);
}

inline std::vector<double> numbers(const Json& j, std::size_t expected, const std::string& where) {
    if (!j.is_array() || j.size() != expected)
        throw ValidationError(where + ": expected an array of " + std::to_string(expected) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < expected; ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::string level_key(double level) { return format_number(level); }

inline double parse_level(const std::string& key, const std::string& where) {
    auto v = csv::parse_number<double>(key);
    if (!v || !(*v > 0)) throw ValidationError(where + ": invalid PRED level '" + key + "'");
    return *v;
}

}  // namespace detail

// ---- WeightMatrix --------------------------------------------------------------

inline Json to_json(const WeightMatrix& w) {
    Json j = Json::object();
    for (auto k : kAllKinds) {
        Json row = Json::object();
        for (auto c : kAllClasses) row[std::string(to_string(c))] = w(k, c);
        j[std::string(to_string(k))] = row;
    }
    return j;
}

inline WeightMatrix weights_from_json(const Json& j) {
    std::array<double, kCellCount> cells{};
    for (auto k : kAllKinds) {
        const std::string kn(to_string(k));
        const auto& row = detail::member(j, kn, "weights");
        for (auto c : kAllClasses) cells[cell_index(k, c)] = detail::number_at(row, std::string(to_string(c)), kn);
    }
    return WeightMatrix(cells);
}

// ---- FuzzySystemConfig ---------------------------------------------------------

inline Json to_json(const InputFuzzySets& s) {
    auto t = [](const TrapezoidMF& m) { return Json::array({m.a, m.b, m.c, m.d}); };
    return Json{{"small", t(s.small)}, {"medium", t(s.medium)}, {"large", t(s.large)}};
}

inline Json to_json(const OutputFuzzySets& s) {
    auto t = [](const TriangleMF& m) { return Json::array({m.a, m.b, m.c}); };
    return Json{{"low", t(s.low)}, {"average", t(s.average)}, {"high", t(s.high)}};
}

inline Json to_json(const FuzzySystemConfig& cfg) {
    Json j = Json::object();
    for (auto k : kAllKinds) {
        const auto& c = cfg[k];
        j[std::string(to_string(k))] = Json{{"input1", to_json(c.input1)}, {"input2", to_json(c.input2)},
                                            {"output", to_json(c.output)}};
    }
    constexpr const char* terms[] = {"small", "medium", "large"};
    Json rules = Json::array();
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t jn = 0; jn < 3; ++jn)
            rules.push_back(Json{{"input2", terms[i]}, {"input1", terms[jn]},
                                 {"output", std::string(to_string(cfg.rules()[i][jn]))}});
    j["rules"] = rules;
    return j;
}

inline FuzzySystemConfig fuzzy_config_from_json(const Json& j) {
    auto trap = [](const Json& s, const std::string& key, const std::string& where) {
        const auto v = detail::numbers(detail::member(s, key, where), 4, where + "." + key);
        return TrapezoidMF{v[0], v[1], v[2], v[3]};
    };
    auto tri = [](const Json& s, const std::string& key, const std::string& where) {
        const auto v = detail::numbers(detail::member(s, key, where), 3, where + "." + key);
        return TriangleMF{v[0], v[1], v[2]};
    };
    auto inputs = [&](const Json& s, const std::string& where) {
        return InputFuzzySets{trap(s, "small", where), trap(s, "medium", where), trap(s, "large", where)};
    };

    std::array<ComponentFuzzySets, kComponentCount> comps;
    for (auto k : kAllKinds) {
        const std::string kn(to_string(k));
        const auto& cj = detail::member(j, kn, "config");
        auto& c = comps[index_of(k)];
        c.input1 = inputs(detail::member(cj, "input1", kn), kn + ".input1");
        c.input2 = inputs(detail::member(cj, "input2", kn), kn + ".input2");
        const auto& oj = detail::member(cj, "output", kn);
        c.output = {tri(oj, "low", kn + ".output"), tri(oj, "average", kn + ".output"), tri(oj, "high", kn + ".output")};
    }

    RuleBase rules = kLinguisticRules;
    if (j.contains("rules")) {
        const auto& rj = j["rules"];
        if (!rj.is_array() || rj.size() != 9) throw ValidationError("config.rules: expected 9 rules");
        auto term = [](const Json& v, const std::string& where) -> std::size_t {
            const std::string s = v.is_string() ? v.get<std::string>() : "";
            if (s == "small") return 0;
            if (s == "medium") return 1;
            if (s == "large") return 2;
            throw ValidationError(where + ": invalid input term");
        };
        std::array<std::array<bool, 3>, 3> seen{};
        for (const auto& r : rj) {
            const auto i = term(detail::member(r, "input2", "rule"), "rule.input2");
            const auto jn = term(detail::member(r, "input1", "rule"), "rule.input1");
            const auto& out = detail::member(r, "output", "rule");
            const auto cls = parse_complexity_class(out.is_string() ? out.get<std::string>() : "");
            if (!cls) throw ValidationError("rule.output: invalid output term");
            if (seen[i][jn]) throw ValidationError("config.rules: duplicate rule");
            seen[i][jn] = true;
            rules[i][jn] = *cls;
        }
    }
    return FuzzySystemConfig(comps, rules);
}

// ---- FilterCriteria ------------------------------------------------------------

inline Json to_json(const FilterCriteria& c) {
    Json q = Json::array(), m = Json::array(), l = Json::array(), t = Json::array();
    for (auto v : c.allowed_quality) q.push_back(std::string(to_string(v)));
    for (auto v : c.allowed_methods) m.push_back(std::string(to_string(v)));
    for (auto v : c.allowed_resource_levels) l.push_back(v);
    for (auto v : c.allowed_dev_types) t.push_back(std::string(to_string(v)));
    return Json{{"allowed_quality", q},       {"allowed_methods", m},   {"allowed_resource_levels", l},
                {"allowed_dev_types", t},     {"require_counts", c.require_counts},
                {"require_gsc", c.require_gsc}};
}

inline FilterCriteria criteria_from_json(const Json& j) {
    auto strings = [&](const std::string& key) {
        const auto& a = detail::member(j, key, "criteria");
        if (!a.is_array()) throw ValidationError("criteria." + key + ": expected an array");
        std::vector<std::string> out;
        for (const auto& v : a) {
            if (!v.is_string()) throw ValidationError("criteria." + key + ": expected strings");
            out.push_back(v.get<std::string>());
        }
        return out;
    };
    FilterCriteria c;
    for (const auto& s : strings("allowed_quality")) {
        auto v = parse_quality(s);
        if (!v) throw ValidationError("criteria.allowed_quality: invalid rating '" + s + "'");
        c.allowed_quality.insert(*v);
    }
    for (const auto& s : strings("allowed_methods")) {
        auto v = parse_counting_method(s);
        if (!v) throw ValidationError("criteria.allowed_methods: invalid method '" + s + "'");
        c.allowed_methods.insert(*v);
    }
    for (const auto& s : strings("allowed_dev_types")) {
        auto v = parse_development_type(s);
        if (!v) throw ValidationError("criteria.allowed_dev_types: invalid type '" + s + "'");
        c.allowed_dev_types.insert(*v);
    }
    const auto& levels = detail::member(j, "allowed_resource_levels", "criteria");
    if (!levels.is_array()) throw ValidationError("criteria.allowed_resource_levels: expected an array");
    for (const auto& v : levels) {
        if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > 4)
            throw ValidationError("criteria.allowed_resource_levels: levels are integers 1-4");
        c.allowed_resource_levels.insert(v.get<int>());
    }
    auto flag = [&](const std::string& key, bool& out) {
        if (!j.contains(key)) return;
        if (!j[key].is_boolean()) throw ValidationError("criteria." + key + ": expected a boolean");
        out = j[key].get<bool>();
    };
    flag("require_counts", c.require_counts);
    flag("require_gsc", c.require_gsc);
    c.validate();
    return c;
}

// ---- RegressionFit -------------------------------------------------------------

inline Json to_json(const RegressionFit& f) {
    return Json{{"alpha", f.alpha},           {"beta", f.beta},
                {"A", f.A},                   {"B", f.B},
                {"r_squared", f.r_squared},   {"residual_mean", f.residual_mean},
                {"residual_std", f.residual_std}, {"n", f.n}};
}

inline RegressionFit fit_from_json(const Json& j) {
    RegressionFit f = RegressionFit::from_coefficients(detail::number_at(j, "A", "fit"), detail::number_at(j, "B", "fit"));
    detail::optional_field(j, "alpha", f.alpha, [&](const std::string& k) { return detail::number_at(j, k, "fit"); });
    detail::optional_field(j, "beta", f.beta, [&](const std::string& k) { return detail::number_at(j, k, "fit"); });
    detail::optional_field(j, "r_squared", f.r_squared,
                           [&](const std::string& k) { return detail::number_at(j, k, "fit"); });
    detail::optional_field(j, "residual_mean", f.residual_mean,
                           [&](const std::string& k) { return detail::number_at(j, k, "fit"); });
    detail::optional_field(j, "residual_std", f.residual_std,
                           [&](const std::string& k) { return detail::number_at(j, k, "fit"); });
    detail::optional_field(j, "n", f.n,
                           [&](const std::string& k) { return static_cast<std::size_t>(detail::integer_at(j, k, "fit")); });
    return f;
}

// ---- TrainingConfig / ExperimentConfig ------------------------------------------

inline Json to_json(const TrainingConfig& c) {
    return Json{{"learning_rate", c.learning_rate},
                {"max_epochs", c.max_epochs},
                {"convergence_tol", c.convergence_tol},
                {"outlier_zscore", c.outlier_zscore},
                {"seed", c.seed}};
}

/// Missing keys keep their defaults.
inline TrainingConfig training_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("training: expected an object");
    TrainingConfig c;
    auto num = [&](const std::string& k) { return detail::number_at(j, k, "training"); };
    detail::optional_field(j, "learning_rate", c.learning_rate, num);
    detail::optional_field(j, "max_epochs", c.max_epochs,
                           [&](const std::string& k) { return static_cast<int>(detail::integer_at(j, k, "training")); });
    detail::optional_field(j, "convergence_tol", c.convergence_tol, num);
    detail::optional_field(j, "outlier_zscore", c.outlier_zscore, num);
    detail::optional_field(j, "seed", c.seed, [&](const std::string& k) { return detail::integer_at(j, k, "training"); });
    c.validate();
    return c;
}

inline Json to_json(const ExperimentConfig& c) {
    return Json{{"n_trials", c.n_trials},
                {"train_fraction", c.train_fraction},
                {"seed", c.seed},
                {"pred_levels", c.pred_levels},
                {"training", to_json(c.training)}};
}

inline ExperimentConfig experiment_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("experiment: expected an object");
    ExperimentConfig c;
    detail::optional_field(j, "n_trials", c.n_trials,
                           [&](const std::string& k) { return static_cast<int>(detail::integer_at(j, k, "experiment")); });
    detail::optional_field(j, "train_fraction", c.train_fraction,
                           [&](const std::string& k) { return detail::number_at(j, k, "experiment"); });
    detail::optional_field(j, "seed", c.seed, [&](const std::string& k) { return detail::integer_at(j, k, "experiment"); });
    if (j.contains("pred_levels")) {
        const auto& a = j["pred_levels"];
        if (!a.is_array() || a.empty()) throw ValidationError("experiment.pred_levels: expected a non-empty array");
        c.pred_levels.clear();
        for (std::size_t i = 0; i < a.size(); ++i)
            c.pred_levels.push_back(detail::number(a[i], "experiment.pred_levels[" + std::to_string(i) + "]"));
    }
    if (j.contains("training")) c.training = training_from_json(j["training"]);
    c.validate();
    return c;
}

// ---- CalibrationReport -----------------------------------------------------------

inline Json to_json(const CalibrationReport& r) {
    return Json{{"initial_weights", to_json(r.initial_weights)},
                {"final_weights", to_json(r.final_weights)},
                {"v1", r.v1},
                {"v2", r.v2},
                {"loss_trace", r.loss_trace},
                {"excluded_outliers", r.excluded_outliers},
                {"epochs_run", r.epochs_run},
                {"converged", r.converged}};
}

inline CalibrationReport report_from_json(const Json& j) {
    CalibrationReport r;
    r.initial_weights = weights_from_json(detail::member(j, "initial_weights", "report"));
    r.final_weights = weights_from_json(detail::member(j, "final_weights", "report"));
    r.v1 = detail::number_at(j, "v1", "report");
    r.v2 = detail::number_at(j, "v2", "report");
    const auto& trace = detail::member(j, "loss_trace", "report");
    if (!trace.is_array()) throw ValidationError("report.loss_trace: expected an array");
    for (const auto& v : trace) r.loss_trace.push_back(detail::number(v, "report.loss_trace"));
    const auto& outl = detail::member(j, "excluded_outliers", "report");
    if (!outl.is_array()) throw ValidationError("report.excluded_outliers: expected an array");
    for (const auto& v : outl) {
        if (!v.is_string()) throw ValidationError("report.excluded_outliers: expected strings");
        r.excluded_outliers.push_back(v.get<std::string>());
    }
    r.epochs_run = static_cast<int>(detail::integer_at(j, "epochs_run", "report"));
    const auto& conv = detail::member(j, "converged", "report");
    if (!conv.is_boolean()) throw ValidationError("report.converged: expected a boolean");
    r.converged = conv.get<bool>();
    return r;
}

/// Accepts either a bare weight matrix or a calibration report (its final weights).
inline WeightMatrix weights_from_document(const Json& j) {
    if (j.is_object() && j.contains("final_weights")) return weights_from_json(j["final_weights"]);
    return weights_from_json(j);
}

// ---- Experiment summary ------------------------------------------------------------

inline Json to_json(const AccuracyReport& a) {
    Json p = Json::object();
    for (const auto& [level, v] : a.pred) p[detail::level_key(level)] = v;
    return Json{{"mmre", a.mmre}, {"pred", p}, {"n", a.n}};
}

inline AccuracyReport accuracy_from_json(const Json& j) {
    AccuracyReport a;
    a.mmre = detail::number_at(j, "mmre", "accuracy");
    a.n = static_cast<std::size_t>(detail::integer_at(j, "n", "accuracy"));
    const auto& p = detail::member(j, "pred", "accuracy");
    if (!p.is_object()) throw ValidationError("accuracy.pred: expected an object");
    for (auto it = p.begin(); it != p.end(); ++it)
        a.pred[detail::parse_level(it.key(), "accuracy.pred")] = detail::number(it.value(), "accuracy.pred");
    return a;
}

inline Json to_json(const ExperimentSummary& s) {
    Json trials = Json::array();
    for (const auto& t : s.trials) {
        Json tj{{"trial", t.trial}, {"ok", t.ok}};
        if (!t.ok) {
            tj["error"] = t.error;
        } else {
            tj["n_train"] = t.train_ids.size();
            tj["n_test"] = t.test_ids.size();
            tj["excluded_outliers"] = t.calibration.excluded_outliers;
            tj["epochs_run"] = t.calibration.epochs_run;
            tj["converged"] = t.calibration.converged;
            tj["calibrated_weights"] = to_json(t.calibration.final_weights);
            tj["original"] = to_json(t.original);
            tj["calibrated"] = to_json(t.calibrated);
            tj["improvement_pct"] = t.improvement_pct;
        }
        trials.push_back(tj);
    }
    auto levels = [](const std::map<double, double>& m) {
        Json p = Json::object();
        for (const auto& [level, v] : m) p[detail::level_key(level)] = v;
        return p;
    };
    return Json{{"trials", trials},
                {"successful_trials", s.successful_trials},
                {"mean_mmre_original", s.mean_mmre_original},
                {"mean_mmre_calibrated", s.mean_mmre_calibrated},
                {"mean_improvement_pct", s.mean_improvement_pct},
                {"mean_pred_original", levels(s.mean_pred_original)},
                {"mean_pred_calibrated", levels(s.mean_pred_calibrated)}};
}

// ---- GeneratorSpec -------------------------------------------------------------

inline Json to_json(const GeneratorSpec& g) {
    return Json{{"n_projects", g.n_projects},
                {"true_weights", to_json(g.true_weights)},
                {"true_A", g.true_A},
                {"true_B", g.true_B},
                {"max_counts", g.max_counts},
                {"noise_sigma", g.noise_sigma},
                {"outlier_rate", g.outlier_rate},
                {"outlier_multiplier", g.outlier_multiplier},
                {"seed", g.seed}};
}

/// Missing keys keep their defaults.
inline GeneratorSpec generator_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("generator: expected an object");
    GeneratorSpec g;
    auto num = [&](const std::string& k) { return detail::number_at(j, k, "generator"); };
    detail::optional_field(j, "n_projects", g.n_projects,
                           [&](const std::string& k) { return static_cast<int>(detail::integer_at(j, k, "generator")); });
    if (j.contains("true_weights")) g.true_weights = weights_from_json(j["true_weights"]);
    detail::optional_field(j, "true_A", g.true_A, num);
    detail::optional_field(j, "true_B", g.true_B, num);
    if (j.contains("max_counts")) {
        const auto& a = j["max_counts"];
        if (a.is_number_integer()) {
            g.max_counts.fill(a.get<int>());
        } else {
            if (!a.is_array() || a.size() != kCellCount)
                throw ValidationError("generator.max_counts: expected an integer or 15 integers");
            for (std::size_t i = 0; i < kCellCount; ++i) {
                if (!a[i].is_number_integer()) throw ValidationError("generator.max_counts: expected integers");
                g.max_counts[i] = a[i].get<int>();
            }
        }
    }
    detail::optional_field(j, "noise_sigma", g.noise_sigma, num);
    detail::optional_field(j, "outlier_rate", g.outlier_rate, num);
    detail::optional_field(j, "outlier_multiplier", g.outlier_multiplier, num);
    detail::optional_field(j, "seed", g.seed, [&](const std::string& k) {
        const auto v = detail::integer_at(j, k, "generator");
        if (v < 0) throw ValidationError("generator.seed: must be nonnegative");
        return static_cast<std::uint64_t>(v);
    });
    g.validate();
    return g;
}

// ---- files -------------------------------------------------------------------------

inline Json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path + ": invalid JSON: " + e.what());
    }
}

}  // namespace fpcal
