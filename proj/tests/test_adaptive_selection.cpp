#include "sptest/adaptive_selection.hpp"
#include "sptest/error.hpp"

#include "support.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace sptest;

namespace {

BasisSpec single(VariableRole role) {
    BasisSpec s;
    s.variables.push_back({"x1", role, {}, {}});
    return s;
}

TransformedPanel planted_panel(double strength) {
    const std::size_t n = 400, T = 2;
    CounterStream s(2024, {1});
    Eigen::MatrixXd X(n * T, 1);
    Eigen::VectorXd y(n * T);
    for (std::size_t i = 0; i < n; ++i) {
        const double fe = s.normal();
        for (std::size_t t = 0; t < T; ++t) {
            const auto r = static_cast<Eigen::Index>(i * T + t);
            X(r, 0) = s.uniform();
            y(r) = fe + X(r, 0) + strength * boost::math::legendre_p(8, 2.0 * X(r, 0) - 1.0) + 0.5 * s.normal();
        }
    }
    return within_transform(make_panel(n, T, y, X, {"x1"}));
}

}  // namespace

TEST(Penalty, GammaForSixCandidates) {
    EXPECT_NEAR(penalty_gamma(6, 5.0), 9.4650, 1e-4);
    EXPECT_DOUBLE_EQ(selection_criterion(12.0, 4, 4, 9.0), 8.0);
}

TEST(Argmax, TiesAndConstantXiFavorSmallest) {
    const std::vector<double> xi{7.0, 7.0, 7.0};
    const std::vector<std::size_t> r{2, 3, 4};
    EXPECT_EQ(argmax_criterion(xi, r, 9.0), 0u);
    EXPECT_EQ(argmax_criterion(xi, r, 0.0), 0u);
    // Exact tie between two candidates under a zero penalty.
    const std::vector<double> tied{5.0, 6.0};
    const std::vector<std::size_t> rt{2, 3};
    EXPECT_EQ(argmax_criterion(tied, rt, 0.0), 0u);
    const std::vector<double> jump{2.0, 3.0, 200.0};
    EXPECT_EQ(argmax_criterion(jump, r, 9.0), 2u);
}

TEST(Selection, PlantedHighDegreeAlternativePicksLargest) {
    const auto tp = planted_panel(2.0);
    const auto grid = build_selection_grid(tp, single(VariableRole::Parametric),
                                           single(VariableRole::Nonparametric), 4, 9, 5.0);
    ASSERT_EQ(grid.candidates.size(), 6u);
    EXPECT_TRUE(grid.nested);
    EXPECT_EQ(grid.r_min(), 2u);
    EXPECT_NEAR(grid.gamma_n(), 9.4650, 1e-4);
    const auto fit = fit_restricted(tp, grid.candidates.front().design);
    const auto sel = select_rn(fit, grid, StatKind::Heteroskedastic);
    EXPECT_EQ(sel.a_n, 9);
    EXPECT_EQ(sel.test.r_n, 7u);
    ASSERT_EQ(sel.table.size(), 6u);
    EXPECT_DOUBLE_EQ(sel.table[0].criterion, sel.table[0].xi - 2.0);
    EXPECT_GT(sel.table[5].xi, 100.0);
}

TEST(Selection, NullDataStaysSmall) {
    const auto tp = planted_panel(0.0);
    const auto grid = build_selection_grid(tp, single(VariableRole::Parametric),
                                           single(VariableRole::Nonparametric), 4, 9, 5.0);
    const auto fit = fit_restricted(tp, grid.candidates.front().design);
    const auto sel = select_rn(fit, grid, StatKind::Homoskedastic);
    EXPECT_EQ(sel.a_n, 4);
}

TEST(Selection, GridNeedsTwoCandidates) {
    const auto tp = planted_panel(0.0);
    try {
        (void)build_selection_grid(tp, single(VariableRole::Parametric), single(VariableRole::Nonparametric), 4, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
    }
}

TEST(Selection, RecombinationInvariant) {
    const auto tp = planted_panel(0.3);
    auto grid = build_selection_grid(tp, single(VariableRole::Parametric),
                                     single(VariableRole::Nonparametric), 4, 7, 5.0);
    const auto fit = fit_restricted(tp, grid.candidates.front().design);
    const auto base = select_rn(fit, grid, StatKind::Heteroskedastic);
    for (auto& c : grid.candidates) {
        const auto r = c.design.Z.cols();
        const Eigen::MatrixXd R = testkit::random_matrix(r, r, 77) + 4.0 * Eigen::MatrixXd::Identity(r, r);
        c.design.Z = c.design.Z * R;
    }
    const auto mixed = select_rn(fit, grid, StatKind::Heteroskedastic);
    EXPECT_EQ(mixed.chosen, base.chosen);
    for (std::size_t k = 0; k < base.table.size(); ++k) {
        EXPECT_NEAR(mixed.table[k].xi, base.table[k].xi, 1e-6 * base.table[k].xi);
    }
}
