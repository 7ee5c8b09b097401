#include "sptest/report.hpp"

#include "sptest/error.hpp"

namespace sptest {

std::string_view to_string(Subcommand s) noexcept {
    switch (s) {
        case Subcommand::Test: return "test";
        case Subcommand::Mc: return "mc";
        case Subcommand::Select: return "select";
    }
    return "test";
}

std::string_view to_string(Inference i) noexcept {
    switch (i) {
        case Inference::Asymptotic: return "asym";
        case Inference::Bootstrap: return "boot";
        case Inference::Both: return "both";
    }
    return "asym";
}

Inference parse_inference(std::string_view s) {
    if (s == "asym") return Inference::Asymptotic;
    if (s == "boot") return Inference::Bootstrap;
    if (s == "both") return Inference::Both;
    throw Error(ErrorKind::InvalidConfig, "unknown inference mode: " + std::string(s));
}

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); };
    if (subcommand != Subcommand::Mc) {
        if (data.empty()) fail("--data is required");
        if (null_spec.variables.empty() && alt_spec.variables.empty()) {
            fail("no regressors selected (use --x or a config file)");
        }
    }
    if (inference != Inference::Asymptotic && boot_reps < 1) fail("--boot-reps must be >= 1");
    if (subcommand == Subcommand::Select || subcommand == Subcommand::Mc) {
        if (grid_min > grid_max) fail("--grid-min exceeds --grid-max");
        if (grid_min < 2) fail("--grid-min must be >= 2");
    }
    if (subcommand == Subcommand::Mc) {
        dgp.validate();
        if (M < 1) fail("--M must be >= 1");
    }
    if (penalty_c <= 1.0) fail("penalty constant c must exceed 1");
}

json basis_spec_to_json(const BasisSpec& spec) {
    json vars = json::array();
    for (const auto& v : spec.variables) {
        json jv = {{"name", v.name}, {"role", std::string(to_string(v.role))}};
        if (v.a_n) jv["a_n"] = *v.a_n;
        if (!v.knots.empty()) jv["knots"] = v.knots;
        vars.push_back(std::move(jv));
    }
    return {{"family", std::string(to_string(spec.family))},
            {"a_n", spec.a_n},
            {"spline_order", spec.spline_order},
            {"interaction_order", spec.interaction_order},
            {"variables", std::move(vars)}};
}

BasisSpec basis_spec_from_json(const json& j) {
    BasisSpec spec;
    try {
        if (j.contains("family")) spec.family = parse_family(j.at("family").get<std::string>());
        spec.a_n = j.value("a_n", spec.a_n);
        spec.spline_order = j.value("spline_order", spec.spline_order);
        spec.interaction_order = j.value("interaction_order", spec.interaction_order);
        for (const auto& jv : j.value("variables", json::array())) {
            VariableSpec v;
            v.name = jv.at("name").get<std::string>();
            if (jv.contains("role")) v.role = parse_role(jv.at("role").get<std::string>());
            if (jv.contains("a_n")) v.a_n = jv.at("a_n").get<int>();
            if (jv.contains("knots")) v.knots = jv.at("knots").get<std::vector<double>>();
            spec.variables.push_back(std::move(v));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("malformed basis spec: ") + e.what());
    }
    return spec;
}

json run_config_to_json(const RunConfig& cfg) {
    std::vector<std::string> variants;
    for (Variant v : cfg.mc.variants) variants.emplace_back(to_string(v));
    return {
        {"subcommand", std::string(to_string(cfg.subcommand))},
        {"data", cfg.data},
        {"id", cfg.id_col},
        {"time", cfg.time_col},
        {"y", cfg.y_col},
        {"x", cfg.x_cols},
        {"dummies", cfg.dummies},
        {"transform", std::string(to_string(cfg.transform))},
        {"null_spec", basis_spec_to_json(cfg.null_spec)},
        {"alt_spec", basis_spec_to_json(cfg.alt_spec)},
        {"stat", std::string(to_string(cfg.kind))},
        {"inference", std::string(to_string(cfg.inference))},
        {"boot_law", std::string(to_string(cfg.boot_law))},
        {"boot_reps", cfg.boot_reps},
        {"grid_min", cfg.grid_min},
        {"grid_max", cfg.grid_max},
        {"penalty_c", cfg.penalty_c},
        {"seed", cfg.seed},
        {"threads", cfg.threads},
        {"dgp",
         {{"name", std::string(to_string(cfg.dgp.dgp))},
          {"errors", std::string(to_string(cfg.dgp.errors))},
          {"n", cfg.dgp.n},
          {"T", cfg.dgp.T},
          {"regressor_low", cfg.dgp.regressors.low},
          {"regressor_high", cfg.dgp.regressors.high},
          {"effect_sd", cfg.dgp.effect_sd},
          {"error_sd", cfg.dgp.error_sd}}},
        {"mc",
         {{"family", std::string(to_string(cfg.mc.family))},
          {"a_values", cfg.mc.a_values},
          {"variants", variants},
          {"level", cfg.mc.level},
          {"M", cfg.M}}},
        {"out", cfg.out},
        {"csv_out", cfg.csv_out},
        {"boot_out", cfg.boot_out},
    };
}

void apply_run_config_json(const json& j, RunConfig& cfg) {
    try {
        if (j.contains("data")) cfg.data = j.at("data").get<std::string>();
        if (j.contains("id")) cfg.id_col = j.at("id").get<std::string>();
        if (j.contains("time")) cfg.time_col = j.at("time").get<std::string>();
        if (j.contains("y")) cfg.y_col = j.at("y").get<std::string>();
        if (j.contains("x")) cfg.x_cols = j.at("x").get<std::vector<std::string>>();
        if (j.contains("dummies")) cfg.dummies = j.at("dummies").get<std::vector<std::string>>();
        if (j.contains("transform")) cfg.transform = parse_transform(j.at("transform").get<std::string>());
        if (j.contains("null_spec")) cfg.null_spec = basis_spec_from_json(j.at("null_spec"));
        if (j.contains("alt_spec")) cfg.alt_spec = basis_spec_from_json(j.at("alt_spec"));
        if (j.contains("stat")) cfg.kind = parse_stat_kind(j.at("stat").get<std::string>());
        if (j.contains("inference")) cfg.inference = parse_inference(j.at("inference").get<std::string>());
        if (j.contains("boot_law")) cfg.boot_law = parse_multiplier_kind(j.at("boot_law").get<std::string>());
        cfg.boot_reps = j.value("boot_reps", cfg.boot_reps);
        cfg.grid_min = j.value("grid_min", cfg.grid_min);
        cfg.grid_max = j.value("grid_max", cfg.grid_max);
        cfg.penalty_c = j.value("penalty_c", cfg.penalty_c);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.threads = j.value("threads", cfg.threads);
        if (j.contains("dgp")) {
            const auto& d = j.at("dgp");
            if (d.contains("name")) cfg.dgp.dgp = parse_dgp(d.at("name").get<std::string>());
            if (d.contains("errors")) cfg.dgp.errors = parse_error_law(d.at("errors").get<std::string>());
            cfg.dgp.n = d.value("n", cfg.dgp.n);
            cfg.dgp.T = d.value("T", cfg.dgp.T);
            cfg.dgp.regressors.low = d.value("regressor_low", cfg.dgp.regressors.low);
            cfg.dgp.regressors.high = d.value("regressor_high", cfg.dgp.regressors.high);
            cfg.dgp.effect_sd = d.value("effect_sd", cfg.dgp.effect_sd);
            cfg.dgp.error_sd = d.value("error_sd", cfg.dgp.error_sd);
        }
        if (j.contains("mc")) {
            const auto& m = j.at("mc");
            if (m.contains("family")) cfg.mc.family = parse_family(m.at("family").get<std::string>());
            if (m.contains("a_values")) cfg.mc.a_values = m.at("a_values").get<std::vector<int>>();
            if (m.contains("variants")) {
                cfg.mc.variants.clear();
                for (const auto& v : m.at("variants")) cfg.mc.variants.push_back(parse_variant(v.get<std::string>()));
            }
            cfg.mc.level = m.value("level", cfg.mc.level);
            cfg.M = m.value("M", cfg.M);
        }
        if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        if (j.contains("csv_out")) cfg.csv_out = j.at("csv_out").get<std::string>();
        if (j.contains("boot_out")) cfg.boot_out = j.at("boot_out").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("malformed config file: ") + e.what());
    }
}

json test_result_to_json(const TestResult& r) {
    json j = {{"xi", r.xi},
              {"kind", std::string(to_string(r.kind))},
              {"m_n", r.m_n},
              {"r_n", r.r_n},
              {"k_n", r.k_n},
              {"t_rn", r.t_rn},
              {"t_kn", r.t_kn},
              {"p_chi2", r.p_chi2},
              {"p_normal", r.p_normal},
              {"p_chi2_kn", r.p_chi2_kn},
              {"p_normal_kn", r.p_normal_kn},
              {"crit_chi2_05", r.crit_chi2_05},
              {"crit_chi2_10", r.crit_chi2_10},
              {"crit_normal_05", r.crit_normal_05},
              {"crit_normal_10", r.crit_normal_10},
              {"omega_condition", r.omega_condition},
              {"perfect_fit", r.perfect_fit},
              {"bootstrap_p", nullptr}};
    if (r.bootstrap_p) j["bootstrap_p"] = *r.bootstrap_p;
    return j;
}

TestResult test_result_from_json(const json& j) {
    TestResult r;
    r.xi = j.at("xi").get<double>();
    r.kind = parse_stat_kind(j.at("kind").get<std::string>());
    r.m_n = j.at("m_n").get<std::size_t>();
    r.r_n = j.at("r_n").get<std::size_t>();
    r.k_n = j.at("k_n").get<std::size_t>();
    r.t_rn = j.at("t_rn").get<double>();
    r.t_kn = j.at("t_kn").get<double>();
    r.p_chi2 = j.at("p_chi2").get<double>();
    r.p_normal = j.at("p_normal").get<double>();
    r.p_chi2_kn = j.at("p_chi2_kn").get<double>();
    r.p_normal_kn = j.at("p_normal_kn").get<double>();
    r.crit_chi2_05 = j.at("crit_chi2_05").get<double>();
    r.crit_chi2_10 = j.at("crit_chi2_10").get<double>();
    r.crit_normal_05 = j.at("crit_normal_05").get<double>();
    r.crit_normal_10 = j.at("crit_normal_10").get<double>();
    r.omega_condition = j.at("omega_condition").get<double>();
    r.perfect_fit = j.at("perfect_fit").get<bool>();
    if (!j.at("bootstrap_p").is_null()) r.bootstrap_p = j.at("bootstrap_p").get<double>();
    return r;
}

json design_to_json(const DesignSplit& ds) {
    json dropped = json::array();
    for (const auto& d : ds.dropped) dropped.push_back({{"label", d.label}, {"reason", d.reason}});
    return {{"m_n", ds.m_n()},
            {"r_n", ds.r_n()},
            {"k_n", ds.k_n()},
            {"w_labels", ds.w_labels},
            {"z_labels", ds.z_labels},
            {"dropped", std::move(dropped)}};
}

json selection_to_json(const SelectionResult& sel) {
    json table = json::array();
    for (const auto& row : sel.table) {
        table.push_back({{"a_n", row.a_n},
                         {"r_n", row.r_n},
                         {"xi", row.xi},
                         {"criterion", row.criterion}});
    }
    return {{"chosen_a_n", sel.a_n},
            {"chosen_r_n", sel.test.r_n},
            {"gamma_n", sel.gamma_n},
            {"r_min", sel.r_min},
            {"criterion_table", std::move(table)},
            {"inference", "post-selection: nominal"}};
}

json mc_result_to_json(const McResult& r) {
    json cells = json::array();
    for (const auto& c : r.cells) {
        cells.push_back({{"variant", std::string(to_string(c.variant))},
                         {"a_n", c.variant == Variant::DataDriven ? json("dd") : json(c.a_n)},
                         {"m_n", c.m_n},
                         {"r_n", c.r_n},
                         {"k_n", c.k_n},
                         {"rejections", c.rejections},
                         {"trials", c.trials},
                         {"rejection_rate", c.rate},
                         {"mc_se", c.mc_se}});
    }
    return {{"M", r.M},
            {"failures", r.failures},
            {"failure_messages", r.failure_messages},
            {"cells", std::move(cells)}};
}

}  // namespace sptest
