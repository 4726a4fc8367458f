#pragma once

// Command-line front end. Each pipeline stage is a subcommand that reads its
// predecessor's CSV/JSON output. Data goes to stdout (or --output), diagnostics
// to stderr. Exit codes: 0 success, 1 validation error, 2 internal error.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fpcal/fpcal.hpp"

namespace fpcal::cli {

struct CommandConfig {
    std::string input;
    std::string output;
    std::string weights;
    std::string criteria;
    std::string spec;
    std::string fit;
    std::string config;
    std::string mre_csv;
    std::optional<long long> seed;
    std::string format = "json";
};

namespace detail {

inline std::string fixed(double v, int digits = 2) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

inline void require_file(const std::string& path, const std::string& flag) {
    if (path.empty()) throw ValidationError(flag + " is required");
    std::ifstream in(path);
    if (!in) throw ValidationError(flag + ": cannot open " + path);
}

inline WeightMatrix load_weights(const CommandConfig& c) {
    if (c.weights.empty()) return WeightMatrix::original();
    try {
        return weights_from_document(load_json(c.weights));
    } catch (const ValidationError& e) {
        throw ValidationError(c.weights + ": " + e.what());
    }
}

class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw ValidationError("cannot write " + path);
        }
        out_ = path.empty() ? &fallback : &file_;
    }
    std::ostream& operator*() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

inline void write_json(const CommandConfig& c, std::ostream& out, const Json& j) {
    Sink sink(c.output, out);
    *sink << j.dump(2) << '\n';
}

inline RegressionFit load_fit_or_fit(const CommandConfig& c, const std::vector<ProjectRecord>& records,
                                     const WeightMatrix& weights, std::ostream& err) {
    if (!c.fit.empty()) return fit_from_json(load_json(c.fit));
    err << "no --fit given; fitting the effort equation on the input records\n";
    return fit_effort_equation(size_effort_samples(records, weights));
}

inline std::string component_label(ComponentKind k) {
    switch (k) {
        case ComponentKind::EI: return "External Inputs";
        case ComponentKind::EO: return "External Outputs";
        case ComponentKind::EQ: return "External Inquiries";
        case ComponentKind::ILF: return "Internal Logical Files";
        case ComponentKind::EIF: return "External Interface Files";
    }
    return {};
}

}  // namespace detail

inline int cmd_count(const CommandConfig& c, std::ostream& out) {
    detail::require_file(c.input, "--input");
    const auto weights = detail::load_weights(c);
    const auto records = load_csv(c.input);

    Json rows = Json::array();
    std::ostringstream table;
    table << std::left << std::setw(16) << "id" << std::right << std::setw(12) << "UFP" << std::setw(8) << "VAF"
          << std::setw(12) << "FP" << '\n';
    for (const auto& r : records) {
        Json row{{"id", r.id}};
        std::string ufp_s = "-", vaf_s = "-", fp_s = "-";
        std::optional<double> ufp, vaf;
        if (r.counts) {
            ufp = unadjusted_fp(*r.counts, weights);
            row["ufp"] = *ufp;
            ufp_s = detail::fixed(*ufp);
        } else {
            row["ufp"] = nullptr;
        }
        if (r.gsc) {
            vaf = value_adjustment_factor(*r.gsc);
            row["vaf"] = *vaf;
            vaf_s = detail::fixed(*vaf);
        } else {
            row["vaf"] = nullptr;
        }
        if (ufp && vaf) {
            const double fp = function_points(*ufp, *vaf);
            row["fp"] = fp;
            fp_s = detail::fixed(fp);
        } else {
            row["fp"] = nullptr;
        }
        rows.push_back(row);
        table << std::left << std::setw(16) << r.id << std::right << std::setw(12) << ufp_s << std::setw(8) << vaf_s
              << std::setw(12) << fp_s << '\n';
    }
    if (c.format == "table") {
        detail::Sink sink(c.output, out);
        if (!records.empty()) *sink << table.str();
    } else {
        detail::write_json(c, out, rows);
    }
    return 0;
}

inline int cmd_fuzzy_count(const CommandConfig& c, std::ostream& out) {
    detail::require_file(c.input, "--input");
    const auto weights = detail::load_weights(c);
    FuzzySystemConfig config = default_config(WeightMatrix::original());
    if (!c.config.empty()) config = fuzzy_config_from_json(load_json(c.config));
    config = retune(config, weights);

    std::ifstream in(c.input, std::ios::binary);
    const auto inventories = read_inventory_csv(in);

    Json rows = Json::array();
    std::ostringstream table;
    table << std::left << std::setw(16) << "id" << std::setw(6) << "kind" << std::right << std::setw(6) << "DET"
          << std::setw(8) << "RET/FTR" << std::setw(8) << "crisp" << std::setw(8) << "fuzzy" << '\n';
    for (const auto& p : inventories) {
        Json items = Json::array();
        double crisp_total = 0;
        for (const auto& item : p.items) {
            const double fw = fuzzy_weight(config, item.kind, item.files);
            const auto cls = classify_complexity(item.kind, item.files);
            const double crisp = weights(item.kind, cls);
            crisp_total += crisp;
            items.push_back(Json{{"kind", std::string(to_string(item.kind))},
                                 {"det", item.files.data_elements},
                                 {"primary_files", item.files.primary_files},
                                 {"crisp_class", std::string(to_string(cls))},
                                 {"crisp_weight", crisp},
                                 {"fuzzy_weight", fw}});
            table << std::left << std::setw(16) << p.id << std::setw(6) << to_string(item.kind) << std::right
                  << std::setw(6) << item.files.data_elements << std::setw(8) << item.files.primary_files
                  << std::setw(8) << detail::fixed(crisp, 1) << std::setw(8) << detail::fixed(fw, 1) << '\n';
        }
        const double total = fuzzy_ufp(config, p.items);
        rows.push_back(Json{{"id", p.id}, {"components", items}, {"crisp_ufp", crisp_total}, {"fuzzy_ufp", total}});
        table << std::left << std::setw(16) << p.id << std::setw(6) << "total" << std::right << std::setw(30)
              << detail::fixed(total, 1) << '\n';
    }
    if (c.format == "table") {
        detail::Sink sink(c.output, out);
        *sink << table.str();
    } else {
        detail::write_json(c, out, rows);
    }
    return 0;
}

inline int cmd_filter(const CommandConfig& c, std::ostream& out, std::ostream& err) {
    detail::require_file(c.input, "--input");
    const auto criteria =
        c.criteria.empty() ? FilterCriteria::repository_default() : criteria_from_json(load_json(c.criteria));
    const auto records = load_csv(c.input);
    const auto kept = filter_projects(records, criteria);
    err << "kept " << kept.size() << " of " << records.size() << " records\n";
    detail::Sink sink(c.output, out);
    write_projects_csv(*sink, kept);
    return 0;
}

inline int cmd_fit(const CommandConfig& c, std::ostream& out) {
    detail::require_file(c.input, "--input");
    const auto weights = detail::load_weights(c);
    const auto records = load_csv(c.input);
    const auto samples = size_effort_samples(records, weights);
    const auto fit = fit_effort_equation(samples);
    const auto diag = residual_diagnostics(fit, samples);
    if (c.format == "table") {
        detail::Sink sink(c.output, out);
        *sink << "Effort = " << fit.A << " * UFP^" << fit.B << "\n"
              << "n = " << fit.n << ", R^2 = " << detail::fixed(fit.r_squared, 4)
              << ", residual std = " << detail::fixed(diag.std, 4) << ", skewness = " << detail::fixed(diag.skewness, 3)
              << ", excess kurtosis = " << detail::fixed(diag.excess_kurtosis, 3) << '\n';
        if (diag.skewness_warning) *sink << "warning: residual skewness exceeds 1\n";
        if (diag.kurtosis_warning) *sink << "warning: residual excess kurtosis exceeds 2\n";
        return 0;
    }
    Json j = to_json(fit);
    j["diagnostics"] = Json{{"mean", diag.mean},
                            {"std", diag.std},
                            {"skewness", diag.skewness},
                            {"excess_kurtosis", diag.excess_kurtosis},
                            {"skewness_warning", diag.skewness_warning},
                            {"kurtosis_warning", diag.kurtosis_warning}};
    detail::write_json(c, out, j);
    return 0;
}

inline std::string calibration_table(const CalibrationReport& r) {
    std::ostringstream s;
    s << std::left << std::setw(26) << "Component" << std::right;
    for (const char* h : {"Low", "Average", "High"}) s << std::setw(24) << h;
    s << '\n' << std::left << std::setw(26) << "" << std::right;
    for (int i = 0; i < 3; ++i) s << std::setw(12) << "Original" << std::setw(12) << "Calibrated";
    s << '\n';
    for (auto k : kAllKinds) {
        s << std::left << std::setw(26) << detail::component_label(k) << std::right;
        for (auto cls : kAllClasses)
            s << std::setw(12) << detail::fixed(r.initial_weights(k, cls), 1) << std::setw(12)
              << detail::fixed(r.final_weights(k, cls), 1);
        s << '\n';
    }
    s << "epochs " << r.epochs_run << (r.converged ? " (converged)" : " (max epochs reached)") << ", loss "
      << r.loss_trace.front() << " -> " << r.loss_trace.back() << ", outliers excluded " << r.excluded_outliers.size()
      << '\n';
    return s.str();
}

inline int cmd_calibrate(const CommandConfig& c, std::ostream& out, std::ostream& err) {
    detail::require_file(c.input, "--input");
    const auto initial = detail::load_weights(c);
    TrainingConfig training;
    if (!c.spec.empty()) training = training_from_json(load_json(c.spec));
    if (c.seed) training.seed = *c.seed;
    const auto records = load_csv(c.input);
    const auto fit = detail::load_fit_or_fit(c, records, initial, err);
    const auto report = calibrate(records, initial, fit, training);
    if (!report.converged) err << "calibration stopped at max_epochs without meeting convergence_tol\n";
    if (c.format == "table") {
        detail::Sink sink(c.output, out);
        *sink << calibration_table(report);
    } else {
        detail::write_json(c, out, to_json(report));
    }
    return 0;
}

inline std::string experiment_table(const ExperimentSummary& s) {
    std::ostringstream o;
    auto row = [&](const std::string& label, auto value_of) {
        o << std::left << std::setw(20) << label << std::right;
        for (const auto& t : s.trials) o << std::setw(10) << (t.ok ? value_of(t) : std::string("failed"));
        o << '\n';
    };
    o << std::left << std::setw(20) << "" << std::right;
    for (const auto& t : s.trials) o << std::setw(10) << ("Exp." + std::to_string(t.trial));
    o << '\n';
    row("MMRE Original", [](const TrialResult& t) { return detail::fixed(t.original.mmre); });
    row("MMRE Calibrated", [](const TrialResult& t) { return detail::fixed(t.calibrated.mmre); });
    row("Improvement %", [](const TrialResult& t) { return detail::fixed(t.improvement_pct, 0) + "%"; });
    o << "Average Improvement % " << detail::fixed(s.mean_improvement_pct, 0) << "%\n\n";

    o << std::left << std::setw(20) << "" << std::right;
    for (const auto& [level, v] : s.mean_pred_original) o << std::setw(10) << ("Pred " + format_number(level));
    o << '\n' << std::left << std::setw(20) << "Original" << std::right;
    for (const auto& [level, v] : s.mean_pred_original) o << std::setw(10) << (detail::fixed(v * 100, 0) + "%");
    o << '\n' << std::left << std::setw(20) << "Calibrated" << std::right;
    for (const auto& [level, v] : s.mean_pred_calibrated) o << std::setw(10) << (detail::fixed(v * 100, 0) + "%");
    o << '\n';
    return o.str();
}

inline void write_mre_csv(const std::string& path, const ExperimentSummary& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + path);
    f << "trial,id,actual,estimated_original,estimated_calibrated,mre_original,mre_calibrated\n";
    for (const auto& t : s.trials)
        for (const auto& e : t.estimates)
            f << t.trial << ',' << csv::escape(e.id) << ',' << format_number(e.actual) << ','
              << format_number(e.estimated_original) << ',' << format_number(e.estimated_calibrated) << ','
              << format_number(std::abs(e.estimated_original - e.actual) / e.actual) << ','
              << format_number(std::abs(e.estimated_calibrated - e.actual) / e.actual) << '\n';
}

inline int cmd_evaluate(const CommandConfig& c, std::ostream& out, std::ostream& err) {
    detail::require_file(c.input, "--input");
    const auto original = detail::load_weights(c);
    ExperimentConfig cfg;
    if (!c.spec.empty()) cfg = experiment_from_json(load_json(c.spec));
    if (c.seed) cfg.seed = *c.seed;
    const auto records = load_csv(c.input);
    const auto fit = detail::load_fit_or_fit(c, records, original, err);
    const auto summary = run_experiments(records, cfg, fit, original);
    for (const auto& t : summary.trials)
        if (!t.ok) err << "trial " << t.trial << " failed: " << t.error << '\n';
    if (!c.mre_csv.empty()) write_mre_csv(c.mre_csv, summary);
    if (c.format == "table") {
        detail::Sink sink(c.output, out);
        *sink << experiment_table(summary);
    } else {
        detail::write_json(c, out, to_json(summary));
    }
    return 0;
}

inline int cmd_generate(const CommandConfig& c, std::ostream& out) {
    GeneratorSpec spec;
    if (!c.spec.empty()) spec = generator_from_json(load_json(c.spec));
    if (c.seed) {
        if (*c.seed < 0) throw ValidationError("--seed must be nonnegative for generate");
        spec.seed = static_cast<std::uint64_t>(*c.seed);
    }
    const auto records = generate(spec);
    detail::Sink sink(c.output, out);
    write_projects_csv(*sink, records);
    return 0;
}

inline int cmd_dump_config(const CommandConfig& c, std::ostream& out) {
    FuzzySystemConfig config = default_config(WeightMatrix::original());
    if (!c.config.empty()) config = fuzzy_config_from_json(load_json(c.config));
    if (!c.weights.empty()) config = retune(config, detail::load_weights(c));
    detail::write_json(c, out, to_json(config));
    return 0;
}

/// Runs one invocation; argv[0] is the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Function point counting, fuzzy complexity weighting and weight calibration"};
    app.require_subcommand(1, 1);
    CommandConfig c;
    long long seed = 0;

    auto add_common = [&](CLI::App* sub, bool with_input) {
        if (with_input) sub->add_option("--input", c.input, "input file")->required();
        sub->add_option("--output", c.output, "output file (default: stdout)");
        sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "table"}));
    };

    auto* count = app.add_subcommand("count", "UFP, VAF and FP per project record");
    add_common(count, true);
    count->add_option("--weights", c.weights, "weight matrix or calibration report JSON");

    auto* fuzzy = app.add_subcommand("fuzzy-count", "fuzzy complexity weights for a component inventory");
    add_common(fuzzy, true);
    fuzzy->add_option("--weights", c.weights, "weight matrix or calibration report JSON (retunes outputs)");
    fuzzy->add_option("--config", c.config, "fuzzy system config JSON");

    auto* filter = app.add_subcommand("filter", "keep records meeting the filter criteria");
    add_common(filter, true);
    filter->add_option("--criteria", c.criteria, "filter criteria JSON");

    auto* fit = app.add_subcommand("fit", "fit Effort = A * UFP^B");
    add_common(fit, true);
    fit->add_option("--weights", c.weights, "weights used to size the projects");

    auto* cal = app.add_subcommand("calibrate", "calibrate the 15 UFP weights");
    add_common(cal, true);
    cal->add_option("--weights", c.weights, "initial weights");
    cal->add_option("--fit", c.fit, "effort equation JSON");
    cal->add_option("--spec", c.spec, "training config JSON");
    cal->add_option("--seed", seed, "seed override");

    auto* eval = app.add_subcommand("evaluate", "repeated train/test calibration experiment");
    add_common(eval, true);
    eval->add_option("--weights", c.weights, "original weights");
    eval->add_option("--fit", c.fit, "effort equation JSON");
    eval->add_option("--spec", c.spec, "experiment config JSON");
    eval->add_option("--seed", seed, "seed override");
    eval->add_option("--mre-csv", c.mre_csv, "write per-project MREs as CSV");

    auto* gen = app.add_subcommand("generate", "synthetic project repository");
    add_common(gen, false);
    gen->add_option("--spec", c.spec, "generator spec JSON");
    gen->add_option("--seed", seed, "seed override");

    auto* dump = app.add_subcommand("dump-config", "fuzzy system config as JSON");
    add_common(dump, false);
    dump->add_option("--weights", c.weights, "retune outputs to these weights");
    dump->add_option("--config", c.config, "base fuzzy system config JSON");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    for (auto* sub : {cal, eval, gen})
        if (sub->parsed() && sub->count("--seed") > 0) c.seed = seed;

    try {
        if (count->parsed()) return cmd_count(c, out);
        if (fuzzy->parsed()) return cmd_fuzzy_count(c, out);
        if (filter->parsed()) return cmd_filter(c, out, err);
        if (fit->parsed()) return cmd_fit(c, out);
        if (cal->parsed()) return cmd_calibrate(c, out, err);
        if (eval->parsed()) return cmd_evaluate(c, out, err);
        if (gen->parsed()) return cmd_generate(c, out);
        if (dump->parsed()) return cmd_dump_config(c, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace fpcal::cli
