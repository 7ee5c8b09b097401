#include "sptest/monte_carlo.hpp"

#include "sptest/adaptive_selection.hpp"
#include "sptest/error.hpp"
#include "sptest/parallel.hpp"
#include "sptest/projection.hpp"
#include "sptest/random.hpp"
#include "sptest/wild_bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace sptest {

std::string_view to_string(Dgp d) noexcept {
    switch (d) {
        case Dgp::SpNull: return "sp_null";
        case Dgp::NpAlt: return "np_alt";
        case Dgp::LinearNull: return "linear_null";
        case Dgp::LinearSmoothAlt: return "linear_smooth_alt";
        case Dgp::LinearOrthogonalAlt: return "linear_orthogonal_alt";
    }
    return "sp_null";
}

std::string_view to_string(ErrorLaw e) noexcept {
    return e == ErrorLaw::Homoskedastic ? "homoskedastic" : "heteroskedastic";
}

Dgp parse_dgp(std::string_view s) {
    for (Dgp d : {Dgp::SpNull, Dgp::NpAlt, Dgp::LinearNull, Dgp::LinearSmoothAlt,
                  Dgp::LinearOrthogonalAlt}) {
        if (s == to_string(d)) return d;
    }
    throw Error(ErrorKind::InvalidConfig, "unknown dgp: " + std::string(s));
}

ErrorLaw parse_error_law(std::string_view s) {
    if (s == "homoskedastic" || s == "hom") return ErrorLaw::Homoskedastic;
    if (s == "heteroskedastic" || s == "hc") return ErrorLaw::Heteroskedastic;
    throw Error(ErrorKind::InvalidConfig, "unknown error law: " + std::string(s));
}

bool is_linear_design(Dgp d) noexcept {
    return d == Dgp::LinearNull || d == Dgp::LinearSmoothAlt || d == Dgp::LinearOrthogonalAlt;
}

void DgpConfig::validate() const {
    if (n < 2 || T < 2) throw Error(ErrorKind::InvalidConfig, "simulation needs n >= 2 and T >= 2");
    if (!(regressors.high > regressors.low)) {
        throw Error(ErrorKind::InvalidConfig, "regressor law needs high > low");
    }
    if (!is_linear_design(dgp) && regressors.low <= -3.0) {
        throw Error(ErrorKind::InvalidConfig, "g(x2) needs x2 > -3");
    }
}

double g_function(double x2) { return 3.0 + 2.0 * (std::exp(x2) - 2.0 * std::log(x2 + 3.0)); }

double h_function(double x1, double x2) {
    return 1.25 * std::cos(x1 - 2.0) * std::sin(0.75 * x2);
}

double orthogonal_alternative(double x1, const RegressorLaw& law) {
    const double u = (2.0 * x1 - law.low - law.high) / (law.high - law.low);
    const double u2 = u * u;
    const double p5 = u * (15.0 + u2 * (-70.0 + 63.0 * u2)) / 8.0;
    return std::sqrt(11.0) * p5;
}

double mean_function(Dgp dgp, double x1, double x2, const RegressorLaw& law) {
    switch (dgp) {
        case Dgp::SpNull: return 2.0 * x1 + g_function(x2);
        case Dgp::NpAlt: return 2.0 * x1 + g_function(x2) + h_function(x1, x2);
        case Dgp::LinearNull: return 2.0 * x1;
        case Dgp::LinearSmoothAlt: return 2.0 * x1 + std::cos(x1 - 2.0);
        case Dgp::LinearOrthogonalAlt: return 2.0 * x1 + orthogonal_alternative(x1, law);
    }
    return 0.0;
}

double error_variance(ErrorLaw law, double x1, double x2, double error_sd) {
    if (law == ErrorLaw::Homoskedastic) return error_sd * error_sd;
    return 1.0 + 1.75 * std::exp(0.75 * (x1 + x2));
}

PanelDataset generate_panel(const DgpConfig& cfg, std::uint64_t rep_index) {
    cfg.validate();
    const bool linear = is_linear_design(cfg.dgp);
    const auto N = static_cast<Eigen::Index>(cfg.n * cfg.T);
    const Eigen::Index dx = linear ? 1 : 2;
    const double width = cfg.regressors.high - cfg.regressors.low;

    CounterStream reg_rng(cfg.seed, {rep_index, stream::kRegressors});
    CounterStream nu_rng(cfg.seed, {rep_index, stream::kIndividualEffects});
    CounterStream eps_rng(cfg.seed, {rep_index, stream::kErrors});

    Eigen::MatrixXd X(N, dx);
    for (Eigen::Index r = 0; r < N; ++r) {
        for (Eigen::Index k = 0; k < dx; ++k) X(r, k) = cfg.regressors.low + width * reg_rng.uniform();
    }
    Eigen::VectorXd y(N);
    const auto T = static_cast<Eigen::Index>(cfg.T);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(cfg.n); ++i) {
        // Fixed effect correlated with the regressors: nu_i + sum_t (0.6 x1 + 0.4 x2).
        double mu = cfg.effect_sd * nu_rng.normal();
        for (Eigen::Index t = 0; t < T; ++t) {
            const Eigen::Index r = i * T + t;
            mu += 0.6 * X(r, 0) + (linear ? 0.0 : 0.4 * X(r, 1));
        }
        for (Eigen::Index t = 0; t < T; ++t) {
            const Eigen::Index r = i * T + t;
            const double x1 = X(r, 0);
            const double x2 = linear ? 0.0 : X(r, 1);
            const double sd = std::sqrt(error_variance(cfg.errors, x1, x2, cfg.error_sd));
            y(r) = mu + mean_function(cfg.dgp, x1, x2, cfg.regressors) + sd * eps_rng.normal();
        }
    }
    std::vector<std::string> names = linear ? std::vector<std::string>{"x1"}
                                            : std::vector<std::string>{"x1", "x2"};
    return make_panel(cfg.n, cfg.T, std::move(y), std::move(X), std::move(names));
}

std::pair<BasisSpec, BasisSpec> study_specs(Dgp dgp, BasisFamily family, int a_n) {
    BasisSpec null_spec;
    null_spec.family = family;
    null_spec.a_n = a_n;
    null_spec.interaction_order = 1;
    BasisSpec alt_spec = null_spec;
    if (is_linear_design(dgp)) {
        null_spec.variables = {{"x1", VariableRole::Parametric, {}, {}}};
        alt_spec.variables = {{"x1", VariableRole::Nonparametric, {}, {}}};
    } else {
        null_spec.variables = {{"x1", VariableRole::Parametric, {}, {}},
                               {"x2", VariableRole::Nonparametric, {}, {}}};
        alt_spec.variables = {{"x1", VariableRole::Nonparametric, {}, {}},
                              {"x2", VariableRole::Nonparametric, {}, {}}};
        alt_spec.interaction_order = 2;
    }
    return {null_spec, alt_spec};
}

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::XiRn: return "xi_rn";
        case Variant::TRn: return "t_rn";
        case Variant::XiKn: return "xi_kn";
        case Variant::TKn: return "t_kn";
        case Variant::BootRademacher: return "boot_rademacher";
        case Variant::BootMammen: return "boot_mammen";
        case Variant::DataDriven: return "data_driven";
    }
    return "xi_rn";
}

Variant parse_variant(std::string_view s) {
    for (Variant v : {Variant::XiRn, Variant::TRn, Variant::XiKn, Variant::TKn,
                      Variant::BootRademacher, Variant::BootMammen, Variant::DataDriven}) {
        if (s == to_string(v)) return v;
    }
    throw Error(ErrorKind::InvalidConfig, "unknown test variant: " + std::string(s));
}

const McCell& McResult::cell(Variant v, int a_n) const {
    for (const auto& c : cells) {
        if (c.variant == v && (v == Variant::DataDriven || c.a_n == a_n)) return c;
    }
    throw Error(ErrorKind::InvalidConfig, "no Monte Carlo cell for variant " +
                                              std::string(to_string(v)) + " at a_n=" +
                                              std::to_string(a_n));
}

namespace {

struct CellOutcome {
    bool reject = false;
    double m_n = 0.0;
    double r_n = 0.0;
    double k_n = 0.0;
};

struct ReplicateOutcome {
    bool ok = false;
    std::string error;
    std::vector<CellOutcome> cells;
};

std::vector<McCell> cell_layout(const McTestSpec& spec) {
    std::vector<McCell> cells;
    for (int a : spec.a_values) {
        for (Variant v : spec.variants) {
            if (v == Variant::DataDriven) continue;
            McCell c;
            c.variant = v;
            c.a_n = a;
            cells.push_back(c);
        }
    }
    if (std::find(spec.variants.begin(), spec.variants.end(), Variant::DataDriven) !=
        spec.variants.end()) {
        McCell c;
        c.variant = Variant::DataDriven;
        cells.push_back(c);
    }
    return cells;
}

bool needs_fixed_designs(const McTestSpec& spec) {
    return std::any_of(spec.variants.begin(), spec.variants.end(),
                       [](Variant v) { return v != Variant::DataDriven; });
}

ReplicateOutcome run_replicate(const DgpConfig& cfg, const McTestSpec& spec,
                               const std::vector<McCell>& layout, std::uint64_t rep) {
    ReplicateOutcome out;
    out.cells.resize(layout.size());
    try {
        const PanelDataset panel = generate_panel(cfg, rep);
        const TransformedPanel tp = transform_panel(panel, spec.transform);
        std::size_t slot = 0;
        if (needs_fixed_designs(spec)) {
            for (int a : spec.a_values) {
                const auto [null_spec, alt_spec] = study_specs(cfg.dgp, spec.family, a);
                const DesignSplit ds =
                    orthonormalize(build_null_and_test_designs(tp, null_spec, alt_spec));
                const RestrictedFit fit = fit_restricted(tp, ds);
                const TestResult res = run_lm_test(fit, spec.kind);
                for (Variant v : spec.variants) {
                    if (v == Variant::DataDriven) continue;
                    CellOutcome& c = out.cells[slot++];
                    c.m_n = static_cast<double>(res.m_n);
                    c.r_n = static_cast<double>(res.r_n);
                    c.k_n = static_cast<double>(res.k_n);
                    switch (v) {
                        case Variant::XiRn: c.reject = res.p_chi2 <= spec.level; break;
                        case Variant::TRn: c.reject = res.p_normal <= spec.level; break;
                        case Variant::XiKn: c.reject = res.p_chi2_kn <= spec.level; break;
                        case Variant::TKn: c.reject = res.p_normal_kn <= spec.level; break;
                        case Variant::BootRademacher:
                        case Variant::BootMammen: {
                            const auto law = MultiplierLaw::of(v == Variant::BootMammen
                                                                   ? MultiplierKind::Mammen
                                                                   : MultiplierKind::Rademacher);
                            const std::uint64_t boot_seed =
                                mix64(cfg.seed ^ mix64(rep * 1000003ULL + static_cast<std::uint64_t>(a)));
                            const auto dist = run_bootstrap(fit, law, spec.kind, spec.B, boot_seed, 1);
                            c.reject = bootstrap_pvalue(res.t_rn, dist) <= spec.level;
                            break;
                        }
                        case Variant::DataDriven: break;
                    }
                }
            }
        }
        if (slot < layout.size()) {
            const auto [null_spec, alt_spec] = study_specs(cfg.dgp, spec.family, spec.grid_min);
            const SelectionGrid grid = build_selection_grid(tp, null_spec, alt_spec, spec.grid_min,
                                                            spec.grid_max, spec.c);
            const RestrictedFit fit = fit_restricted(tp, grid.candidates.front().design);
            const SelectionResult sel = select_rn(fit, grid, spec.kind);
            CellOutcome& c = out.cells[slot];
            c.reject = sel.test.p_chi2 <= spec.level;
            c.m_n = static_cast<double>(sel.test.m_n);
            c.r_n = static_cast<double>(sel.test.r_n);
            c.k_n = static_cast<double>(sel.test.k_n);
        }
        out.ok = true;
    } catch (const Error& e) {
        out.ok = false;
        out.error = "replication " + std::to_string(rep) + ": " + e.what();
    }
    return out;
}

}  // namespace

McResult run_mc(const DgpConfig& cfg, const McTestSpec& spec, std::size_t M) {
    cfg.validate();
    if (M < 1) throw Error(ErrorKind::InvalidConfig, "Monte Carlo needs M >= 1");
    if (spec.variants.empty()) throw Error(ErrorKind::InvalidConfig, "no test variants requested");
    if (needs_fixed_designs(spec) && spec.a_values.empty()) {
        throw Error(ErrorKind::InvalidConfig, "no a_n values requested");
    }

    McResult result;
    result.M = M;
    result.cells = cell_layout(spec);
    std::vector<ReplicateOutcome> outcomes(M);
    parallel_for(M, spec.threads, [&](std::size_t rep) {
        outcomes[rep] = run_replicate(cfg, spec, result.cells, rep);
    });

    for (auto& cell : result.cells) cell.decisions.assign(M, -1);
    for (std::size_t rep = 0; rep < M; ++rep) {
        const auto& o = outcomes[rep];
        if (!o.ok) {
            ++result.failures;
            if (result.failure_messages.size() < 10) result.failure_messages.push_back(o.error);
            continue;
        }
        for (std::size_t k = 0; k < result.cells.size(); ++k) {
            auto& cell = result.cells[k];
            const auto& c = o.cells[k];
            ++cell.trials;
            cell.rejections += c.reject ? 1 : 0;
            cell.decisions[rep] = c.reject ? 1 : 0;
            cell.m_n += c.m_n;
            cell.r_n += c.r_n;
            cell.k_n += c.k_n;
        }
    }
    if (static_cast<double>(result.failures) > kMaxReplicationFailureShare * static_cast<double>(M)) {
        std::string msg = std::to_string(result.failures) + " of " + std::to_string(M) +
                          " replications failed";
        if (!result.failure_messages.empty()) msg += "; first: " + result.failure_messages.front();
        throw Error(ErrorKind::ReplicationFailure, msg);
    }
    for (auto& cell : result.cells) {
        if (cell.trials == 0) continue;
        const auto trials = static_cast<double>(cell.trials);
        cell.m_n /= trials;
        cell.r_n /= trials;
        cell.k_n /= trials;
        cell.rate = static_cast<double>(cell.rejections) / trials;
        cell.mc_se = std::sqrt(cell.rate * (1.0 - cell.rate) / trials);
    }
    return result;
}

void write_mc_csv(std::ostream& out, const McResult& result) {
    out << "variant,a_n,m_n,r_n,k_n,rejection_rate,mc_se\n";
    char buf[256];
    for (const auto& c : result.cells) {
        const std::string a = c.variant == Variant::DataDriven ? "dd" : std::to_string(c.a_n);
        std::snprintf(buf, sizeof buf, "%s,%s,%.3f,%.3f,%.3f,%.6f,%.6f\n",
                      std::string(to_string(c.variant)).c_str(), a.c_str(), c.m_n, c.r_n, c.k_n,
                      c.rate, c.mc_se);
        out << buf;
    }
}

}  // namespace sptest
