#include "sptest/cli.hpp"

#include "sptest/adaptive_selection.hpp"
#include "sptest/csv.hpp"
#include "sptest/error.hpp"
#include "sptest/monte_carlo.hpp"
#include "sptest/panel.hpp"
#include "sptest/pipeline.hpp"
#include "sptest/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace sptest {
namespace {

// Values given on the command line; unset ones leave the config-file value alone.
struct Overrides {
    std::optional<std::string> data, id, time, y, transform, basis, stat, inference, boot_law;
    std::optional<std::string> out, boot_out, csv, dgp, errors;
    std::vector<std::string> x, dummies, variants;
    std::vector<int> null_an, alt_an, a_values;
    std::optional<int> alt_interaction, null_interaction, grid_min, grid_max, spline_order;
    std::optional<std::size_t> boot_reps, n, T, M;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<double> penalty_c, level;
};

void add_data_flags(CLI::App& app, Overrides& o) {
    app.add_option("--data", o.data, "long-format CSV panel");
    app.add_option("--id", o.id, "individual column (default id)");
    app.add_option("--time", o.time, "period column (default time)");
    app.add_option("--y", o.y, "outcome column (default y)");
    app.add_option("--x", o.x, "continuous regressors")->delimiter(',');
    app.add_option("--dummies", o.dummies, "dummy regressors, linear in both models")->delimiter(',');
    app.add_option("--transform", o.transform, "within | fd");
    app.add_option("--null-an", o.null_an,
                   "terms per regressor under the null: 0 omit, 2 linear, >=3 series")
        ->delimiter(',');
    app.add_option("--alt-an", o.alt_an, "terms per regressor under the alternative")->delimiter(',');
    app.add_option("--null-interaction", o.null_interaction, "interaction order of the null (default 1)");
    app.add_option("--alt-interaction", o.alt_interaction, "interaction order of the alternative (default 2)");
    app.add_option("--spline-order", o.spline_order, "spline degree (default 3)");
    app.add_option("--out", o.out, "JSON report path, '-' for stdout");
}

void add_common_flags(CLI::App& app, Overrides& o) {
    app.add_option("--basis", o.basis, "power | spline");
    app.add_option("--stat", o.stat, "hom | hc");
    app.add_option("--seed", o.seed, "master seed");
    app.add_option("--threads", o.threads, "worker threads, 0 = all cores");
}

void add_grid_flags(CLI::App& app, Overrides& o) {
    app.add_option("--grid-min", o.grid_min, "smallest a_n of the data-driven grid");
    app.add_option("--grid-max", o.grid_max, "largest a_n of the data-driven grid");
    app.add_option("--penalty-c", o.penalty_c, "penalty constant c (> 1)");
}

void add_boot_flags(CLI::App& app, Overrides& o) {
    app.add_option("--boot-law", o.boot_law, "mammen | rademacher");
    app.add_option("--boot-reps", o.boot_reps, "bootstrap replicates B");
}

std::vector<int> broadcast(const std::vector<int>& values, std::size_t count, const char* flag) {
    if (values.size() == 1) return std::vector<int>(count, values.front());
    if (values.size() != count) {
        throw Error(ErrorKind::InvalidConfig, std::string(flag) + " needs one value or one per --x column");
    }
    return values;
}

BasisSpec spec_from_flags(const RunConfig& cfg, const std::vector<int>& an, int interaction,
                          bool null_side) {
    BasisSpec spec;
    spec.family = cfg.alt_spec.family;
    spec.spline_order = cfg.alt_spec.spline_order;
    spec.interaction_order = interaction;
    spec.a_n = 2;
    for (std::size_t j = 0; j < cfg.x_cols.size(); ++j) {
        const int a = an[j];
        if (a == 0 && null_side) continue;
        if (a < 2) {
            throw Error(ErrorKind::DegreeTooSmall,
                        "a_n for '" + cfg.x_cols[j] + "' must be 2 (linear) or more");
        }
        VariableSpec v;
        v.name = cfg.x_cols[j];
        v.role = a == 2 ? VariableRole::Parametric : VariableRole::Nonparametric;
        if (a > 2) v.a_n = a;
        spec.variables.push_back(std::move(v));
    }
    for (const auto& d : cfg.dummies) spec.variables.push_back({d, VariableRole::Dummy, {}, {}});
    return spec;
}

std::vector<std::string> spec_columns(const RunConfig& cfg) {
    std::vector<std::string> cols;
    auto add = [&](const std::string& name) {
        for (const auto& c : cols) {
            if (c == name) return;
        }
        cols.push_back(name);
    };
    for (const auto& c : cfg.x_cols) add(c);
    for (const auto& c : cfg.dummies) add(c);
    for (const auto* spec : {&cfg.null_spec, &cfg.alt_spec}) {
        for (const auto& v : spec->variables) add(v.name);
    }
    return cols;
}

void resolve(RunConfig& cfg, const Overrides& o, Subcommand sub) {
    cfg.subcommand = sub;
    if (o.data) cfg.data = *o.data;
    if (o.id) cfg.id_col = *o.id;
    if (o.time) cfg.time_col = *o.time;
    if (o.y) cfg.y_col = *o.y;
    if (!o.x.empty()) cfg.x_cols = o.x;
    if (!o.dummies.empty()) cfg.dummies = o.dummies;
    if (o.transform) cfg.transform = parse_transform(*o.transform);
    if (o.basis) {
        cfg.alt_spec.family = cfg.null_spec.family = parse_family(*o.basis);
        cfg.mc.family = cfg.alt_spec.family;
    }
    if (o.spline_order) cfg.alt_spec.spline_order = cfg.null_spec.spline_order = *o.spline_order;
    if (o.stat) cfg.kind = parse_stat_kind(*o.stat);
    if (o.inference) cfg.inference = parse_inference(*o.inference);
    if (o.boot_law) {
        cfg.boot_law = parse_multiplier_kind(*o.boot_law);
        if (cfg.inference == Inference::Asymptotic && sub != Subcommand::Mc) {
            throw Error(ErrorKind::InvalidConfig, "--boot-law requires --inference boot or both");
        }
    }
    if (o.boot_reps) cfg.boot_reps = *o.boot_reps;
    if ((o.grid_min || o.grid_max) && sub == Subcommand::Test) {
        throw Error(ErrorKind::InvalidConfig, "grid bounds apply to `select` and `mc` only");
    }
    if (o.grid_min) cfg.grid_min = *o.grid_min;
    if (o.grid_max) cfg.grid_max = *o.grid_max;
    if (o.penalty_c) cfg.penalty_c = *o.penalty_c;
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    if (o.out) cfg.out = *o.out;
    if (o.boot_out) cfg.boot_out = *o.boot_out;
    if (o.csv) cfg.csv_out = *o.csv;
    if (o.dgp) cfg.dgp.dgp = parse_dgp(*o.dgp);
    if (o.errors) cfg.dgp.errors = parse_error_law(*o.errors);
    if (o.n) cfg.dgp.n = *o.n;
    if (o.T) cfg.dgp.T = *o.T;
    if (o.M) cfg.M = *o.M;
    if (o.level) cfg.mc.level = *o.level;
    if (!o.a_values.empty()) cfg.mc.a_values = o.a_values;
    if (!o.variants.empty()) {
        cfg.mc.variants.clear();
        for (const auto& v : o.variants) cfg.mc.variants.push_back(parse_variant(v));
    }

    // Per-regressor a_n flags rebuild both specs from the column lists.
    const bool rebuild = !o.null_an.empty() || !o.alt_an.empty() || o.alt_interaction ||
                         o.null_interaction ||
                         (cfg.alt_spec.variables.empty() && !cfg.x_cols.empty());
    if (rebuild && sub != Subcommand::Mc) {
        if (cfg.x_cols.empty()) throw Error(ErrorKind::InvalidConfig, "--x is required");
        const std::size_t d = cfg.x_cols.size();
        const auto null_an = broadcast(o.null_an.empty() ? std::vector<int>{2} : o.null_an, d, "--null-an");
        const auto alt_an = broadcast(o.alt_an.empty() ? std::vector<int>{4} : o.alt_an, d, "--alt-an");
        const int null_int = o.null_interaction.value_or(1);
        const int alt_int = o.alt_interaction.value_or(2);
        const BasisSpec null_spec = spec_from_flags(cfg, null_an, null_int, true);
        const BasisSpec alt_spec = spec_from_flags(cfg, alt_an, alt_int, false);
        cfg.null_spec = null_spec;
        cfg.alt_spec = alt_spec;
    }

    cfg.mc.kind = cfg.kind;
    cfg.mc.transform = cfg.transform;
    cfg.mc.grid_min = cfg.grid_min;
    cfg.mc.grid_max = cfg.grid_max;
    cfg.mc.c = cfg.penalty_c;
    cfg.mc.B = cfg.boot_reps;
    cfg.mc.threads = cfg.threads;
    cfg.dgp.seed = cfg.seed;
    cfg.validate();
}

json decision(double p) {
    return {{"p_value", p}, {"reject_05", p <= 0.05}, {"reject_10", p <= 0.10}};
}

void write_json(const json& report, const std::string& path, std::ostream& out) {
    if (path == "-") {
        out << report.dump(2) << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write report to " + path);
    f << report.dump(2) << '\n';
}

TransformedPanel load_transformed(const RunConfig& cfg, json& panel_info) {
    const CsvTable table = read_csv(cfg.data);
    const PanelDataset panel = load_panel(table, cfg.id_col, cfg.time_col, cfg.y_col, spec_columns(cfg));
    panel_info = {{"n", panel.n},
                  {"T", panel.T},
                  {"transform", std::string(to_string(cfg.transform))},
                  {"warnings", panel.warnings}};
    return transform_panel(panel, cfg.transform);
}

std::string verdict(double p) {
    if (p <= 0.05) return "rejected at 5%";
    if (p <= 0.10) return "not rejected at 5%, rejected at 10%";
    return "not rejected at 10%";
}

int cmd_test(const RunConfig& cfg, std::ostream& out) {
    json report = {{"subcommand", "test"}, {"config", run_config_to_json(cfg)}, {"seed", cfg.seed}};
    json panel_info;
    const TransformedPanel tp = load_transformed(cfg, panel_info);
    report["panel"] = panel_info;

    TestOptions opts;
    opts.kind = cfg.kind;
    opts.bootstrap = cfg.inference != Inference::Asymptotic;
    opts.law = cfg.boot_law;
    opts.B = cfg.boot_reps;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    const TestRun run = run_specification_test(tp, cfg.null_spec, cfg.alt_spec, opts);
    const TestResult& r = run.result;

    report["design"] = design_to_json(run.design);
    report["result"] = test_result_to_json(r);
    json decisions;
    if (cfg.inference != Inference::Bootstrap) {
        decisions["xi_chi2"] = decision(r.p_chi2);
        decisions["t_normal"] = decision(r.p_normal);
        decisions["t_kn"] = decision(r.p_normal_kn);
        decisions["t_kn"]["note"] = "no df correction (for comparison)";
    }
    if (run.bootstrap) {
        const auto& b = *run.bootstrap;
        decisions["t_bootstrap"] = decision(*r.bootstrap_p);
        report["bootstrap"] = {{"law", std::string(to_string(b.law.kind))},
                               {"B", b.B},
                               {"failed", b.failed},
                               {"seed", b.seed},
                               {"critical_05", bootstrap_critical_value(b, 0.05)},
                               {"critical_10", bootstrap_critical_value(b, 0.10)}};
        if (!cfg.boot_out.empty()) {
            std::ofstream f(cfg.boot_out);
            if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write " + cfg.boot_out);
            write_bootstrap_csv(f, b);
        }
    }
    report["decisions"] = decisions;
    write_json(report, cfg.out, out);

    if (cfg.out != "-") {
        out << summary_line(r) << '\n';
        out << "xi vs chi2(" << r.r_n << "): " << verdict(r.p_chi2) << '\n';
        out << "t vs N(0,1): " << verdict(r.p_normal) << '\n';
        if (r.bootstrap_p) out << "bootstrap t: p = " << *r.bootstrap_p << ", " << verdict(*r.bootstrap_p) << '\n';
        for (const auto& d : run.design.dropped) out << "dropped " << d.label << ": " << d.reason << '\n';
    }
    return 0;
}

int cmd_select(const RunConfig& cfg, std::ostream& out) {
    json report = {{"subcommand", "select"}, {"config", run_config_to_json(cfg)}, {"seed", cfg.seed}};
    json panel_info;
    const TransformedPanel tp = load_transformed(cfg, panel_info);
    report["panel"] = panel_info;

    const SelectionGrid grid = build_selection_grid(tp, cfg.null_spec, cfg.alt_spec, cfg.grid_min,
                                                    cfg.grid_max, cfg.penalty_c);
    const RestrictedFit fit = fit_restricted(tp, grid.candidates.front().design);
    const SelectionResult sel = select_rn(fit, grid, cfg.kind);
    report["selection"] = selection_to_json(sel);
    report["selection"]["nested"] = grid.nested;
    report["design"] = design_to_json(grid.candidates[sel.chosen].design);
    report["result"] = test_result_to_json(sel.test);
    report["decisions"] = {{"xi_chi2", decision(sel.test.p_chi2)}, {"t_normal", decision(sel.test.p_normal)}};
    write_json(report, cfg.out, out);

    if (cfg.out != "-") {
        out << "chosen a_n = " << sel.a_n << " (r_n = " << sel.test.r_n
            << "), post-selection inference is nominal\n";
        out << summary_line(sel.test) << '\n';
        out << "xi vs chi2(" << sel.test.r_n << "): " << verdict(sel.test.p_chi2) << '\n';
    }
    return 0;
}

int cmd_mc(const RunConfig& cfg, std::ostream& out) {
    const McResult result = run_mc(cfg.dgp, cfg.mc, cfg.M);
    {
        std::ofstream f(cfg.csv_out);
        if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write " + cfg.csv_out);
        write_mc_csv(f, result);
    }
    json report = {{"subcommand", "mc"},
                   {"config", run_config_to_json(cfg)},
                   {"seed", cfg.seed},
                   {"mc", mc_result_to_json(result)}};
    write_json(report, cfg.out, out);
    if (cfg.out != "-") {
        out << "M = " << result.M << ", failures = " << result.failures << ", wrote " << cfg.csv_out << '\n';
        for (const auto& c : result.cells) {
            out << to_string(c.variant) << " a_n=" << (c.variant == Variant::DataDriven ? std::string("dd") : std::to_string(c.a_n))
                << " rate=" << c.rate << " se=" << c.mc_se << '\n';
        }
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Series specification test for fixed-effects panel models"};
    app.require_subcommand(1);
    std::optional<std::string> config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its values");

    Overrides o;
    CLI::App* test = app.add_subcommand("test", "run the specification test on a panel CSV");
    CLI::App* select = app.add_subcommand("select", "data-driven choice of the number of test directions");
    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo size and power study");
    for (CLI::App* sub : {test, select}) {
        add_data_flags(*sub, o);
        add_common_flags(*sub, o);
    }
    test->add_option("--inference", o.inference, "asym | boot | both");
    test->add_option("--boot-out", o.boot_out, "CSV of bootstrap statistics");
    add_boot_flags(*test, o);
    add_grid_flags(*select, o);

    add_common_flags(*mc, o);
    add_grid_flags(*mc, o);
    add_boot_flags(*mc, o);
    mc->add_option("--transform", o.transform, "within | fd");
    mc->add_option("--dgp", o.dgp, "sp_null | np_alt | linear_null | linear_smooth_alt | linear_orthogonal_alt");
    mc->add_option("--errors", o.errors, "hom | het");
    mc->add_option("--n", o.n, "individuals");
    mc->add_option("--T", o.T, "periods");
    mc->add_option("--M", o.M, "replications");
    mc->add_option("--a-values", o.a_values, "fixed a_n values")->delimiter(',');
    mc->add_option("--variants", o.variants,
                   "xi_rn,t_rn,xi_kn,t_kn,boot_rademacher,boot_mammen,data_driven")
        ->delimiter(',');
    mc->add_option("--level", o.level, "nominal level (default 0.05)");
    mc->add_option("--csv", o.csv, "CSV output path");
    mc->add_option("--out", o.out, "JSON summary path, '-' for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    const Subcommand sub = test->parsed() ? Subcommand::Test
                           : select->parsed() ? Subcommand::Select
                                              : Subcommand::Mc;
    try {
        RunConfig cfg;
        if (sub == Subcommand::Mc) cfg.kind = StatKind::Homoskedastic;
        if (config_path) {
            std::ifstream f(*config_path);
            if (!f) throw Error(ErrorKind::InvalidConfig, "cannot read config file " + *config_path);
            json j;
            try {
                f >> j;
            } catch (const json::exception& e) {
                throw Error(ErrorKind::ParseError, std::string("config file: ") + e.what());
            }
            apply_run_config_json(j, cfg);
        }
        resolve(cfg, o, sub);
        switch (sub) {
            case Subcommand::Test: return cmd_test(cfg, out);
            case Subcommand::Select: return cmd_select(cfg, out);
            case Subcommand::Mc: return cmd_mc(cfg, out);
        }
    } catch (const Error& e) {
        err << json{{"error", {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}}}}.dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace sptest
