#include "sptest/adaptive_selection.hpp"

#include "sptest/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sptest {

std::size_t SelectionGrid::r_min() const {
    if (candidates.empty()) throw Error(ErrorKind::InvalidConfig, "empty selection grid");
    std::size_t lo = candidates.front().r_n;
    for (const auto& c : candidates) lo = std::min(lo, c.r_n);
    return lo;
}

double SelectionGrid::gamma_n() const { return penalty_gamma(candidates.size(), c); }

double penalty_gamma(std::size_t cardinality, double c) {
    if (cardinality < 1) throw Error(ErrorKind::InvalidConfig, "grid cardinality must be >= 1");
    return c * std::sqrt(2.0 * std::log(static_cast<double>(cardinality)));
}

double selection_criterion(double xi, std::size_t r, std::size_t r_min, double gamma) {
    const double rd = static_cast<double>(r);
    const double extra = rd - static_cast<double>(r_min);
    return xi - rd - gamma * std::sqrt(2.0 * extra);
}

SelectionGrid build_selection_grid(const TransformedPanel& tp, const BasisSpec& spec_null,
                                   const BasisSpec& alt_template, int a_min, int a_max, double c) {
    if (a_min > a_max) throw Error(ErrorKind::InvalidConfig, "grid minimum exceeds grid maximum");
    SelectionGrid grid;
    grid.c = c;
    Eigen::MatrixXd previous_z;
    for (int a = a_min; a <= a_max; ++a) {
        BasisSpec alt = alt_template;
        alt.a_n = a;
        for (auto& v : alt.variables) {
            if (v.role == VariableRole::Nonparametric) {
                v.a_n.reset();
                v.knots.clear();
            }
        }
        DesignSplit ds = orthonormalize(build_null_and_test_designs(tp, spec_null, alt));
        const std::size_t r = ds.r_n();
        if (!grid.candidates.empty() && r <= grid.candidates.back().r_n) continue;
        if (previous_z.cols() > 0) {
            // Orthonormal columns: residual of the previous span after projecting on the new one.
            const double rows = static_cast<double>(ds.Z.rows());
            const Eigen::MatrixXd proj = ds.Z * (ds.Z.transpose() * previous_z) / rows;
            if ((previous_z - proj).norm() > 1e-6 * previous_z.norm()) grid.nested = false;
        }
        previous_z = ds.Z;
        grid.candidates.push_back({a, std::move(ds), r});
    }
    if (grid.candidates.size() < 2) {
        throw Error(ErrorKind::InvalidConfig,
                    "data-driven selection needs at least two distinct candidates");
    }
    return grid;
}

std::size_t argmax_criterion(std::span<const double> xi, std::span<const std::size_t> r,
                             double gamma) {
    if (xi.empty() || xi.size() != r.size()) {
        throw Error(ErrorKind::InvalidConfig, "criterion inputs are empty or mismatched");
    }
    const std::size_t r_min = *std::min_element(r.begin(), r.end());
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < xi.size(); ++k) {
        const double value = selection_criterion(xi[k], r[k], r_min, gamma);
        if (value > best_value || (value == best_value && r[k] < r[best])) {
            best = k;
            best_value = value;
        }
    }
    return best;
}

SelectionResult select_rn(const RestrictedFit& fit, const SelectionGrid& grid, StatKind kind) {
    SelectionResult out;
    out.gamma_n = grid.gamma_n();
    out.r_min = grid.r_min();
    std::vector<double> xis;
    std::vector<std::size_t> rs;
    std::vector<double> conditions;
    for (const auto& cand : grid.candidates) {
        const Eigen::MatrixXd Zt = fit.residualize(cand.design.Z);
        double xi = 0.0;
        double condition = 0.0;
        if (!fit.perfect_fit()) {
            try {
                const OmegaEstimate om = omega(Zt, fit.residuals, fit.n, fit.T_prime, kind);
                xi = quadratic_form(Zt.transpose() * fit.residuals, om);
                condition = om.condition_number;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::SingularOmega) throw;
                throw Error(ErrorKind::SingularOmega,
                            "candidate a_n=" + std::to_string(cand.a_n) + " (r_n=" +
                                std::to_string(cand.r_n) + "): " + e.what());
            }
        }
        xis.push_back(xi);
        rs.push_back(cand.r_n);
        conditions.push_back(condition);
        out.table.push_back(
            {cand.a_n, cand.r_n, xi, selection_criterion(xi, cand.r_n, out.r_min, out.gamma_n)});
    }
    out.chosen = argmax_criterion(xis, rs, out.gamma_n);
    out.a_n = grid.candidates[out.chosen].a_n;
    out.test = make_result(xis[out.chosen], kind, static_cast<std::size_t>(fit.Q.cols()),
                           rs[out.chosen]);
    out.test.omega_condition = conditions[out.chosen];
    out.test.perfect_fit = fit.perfect_fit();
    return out;
}

}  // namespace sptest
