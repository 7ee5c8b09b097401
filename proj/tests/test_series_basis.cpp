#include "sptest/csv.hpp"
#include "sptest/error.hpp"
#include "sptest/series_basis.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

using namespace sptest;

namespace {

BasisSpec two_variable_spec(int a1, int a2, int interaction) {
    BasisSpec s;
    s.interaction_order = interaction;
    auto role = [](int a) { return a == 2 ? VariableRole::Parametric : VariableRole::Nonparametric; };
    s.variables.push_back({"x1", role(a1), a1 > 2 ? std::optional<int>(a1) : std::nullopt, {}});
    s.variables.push_back({"x2", role(a2), a2 > 2 ? std::optional<int>(a2) : std::nullopt, {}});
    return s;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

BasisSpec wage_spec(int a_wks, int a_exp, int interaction) {
    BasisSpec s;
    s.interaction_order = interaction;
    for (auto [name, a] : {std::pair{"wks", a_wks}, std::pair{"exp", a_exp}}) {
        VariableSpec v{name, a == 2 ? VariableRole::Parametric : VariableRole::Nonparametric, {}, {}};
        if (a > 2) v.a_n = a;
        s.variables.push_back(v);
    }
    for (const char* d : {"bluecol", "ind", "south", "smsa", "married", "union"}) {
        s.variables.push_back({d, VariableRole::Dummy, {}, {}});
    }
    return s;
}

}  // namespace

TEST(Univariate, PowerRow) {
    const std::vector<double> z{2.0};
    const auto m = build_univariate(z, {BasisFamily::Power, 3, 3, {}});
    ASSERT_EQ(m.cols(), 3);
    EXPECT_DOUBLE_EQ(m(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(m(0, 1), 2.0);
    EXPECT_DOUBLE_EQ(m(0, 2), 4.0);
}

TEST(Univariate, SplineRowAboveAndBelowKnot) {
    const std::vector<double> z{0.0, 2.0, 0.5, 3.0};
    const auto m = build_univariate(z, {BasisFamily::Spline, 5, 3, {1.0}});
    ASSERT_EQ(m.cols(), 5);
    const double expected[] = {1, 2, 4, 8, 1};
    for (int c = 0; c < 5; ++c) EXPECT_DOUBLE_EQ(m(1, c), expected[c]);
    EXPECT_DOUBLE_EQ(m(2, 4), 0.0);
}

TEST(Univariate, ColumnCounts) {
    const Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(50, 0.0, 1.0);
    const std::span<const double> sz(z.data(), z.size());
    for (int a = 2; a <= 9; ++a) {
        EXPECT_EQ(build_univariate(sz, {BasisFamily::Power, a, 3, {}}).cols(), a);
    }
    for (int k = 1; k <= 4; ++k) {
        const auto knots = quantile_knots(sz, k);
        EXPECT_EQ(build_univariate(sz, {BasisFamily::Spline, 4 + k, 3, knots}).cols(), 4 + k);
    }
    // No knots: the spline reduces to the power expansion.
    EXPECT_EQ(implied_knot_count(4, 3), 0);
    EXPECT_TRUE(build_univariate(sz, {BasisFamily::Spline, 3, 3, {}})
                    .isApprox(build_univariate(sz, {BasisFamily::Power, 3, 3, {}})));
}

TEST(Univariate, Errors) {
    const std::vector<double> z{0.0, 1.0, 2.0};
    try {
        (void)build_univariate(z, {BasisFamily::Power, 1, 3, {}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegreeTooSmall);
    }
    for (const std::vector<double> bad : {std::vector<double>{2.0}, std::vector<double>{-1.0},
                                          std::vector<double>{1.5, 0.5}}) {
        try {
            (void)build_univariate(z, {BasisFamily::Spline, 3 + 1 + static_cast<int>(bad.size()), 3, bad});
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::KnotOutOfRange);
        }
    }
}

TEST(QuantileKnots, EvenlySpacedQuantiles) {
    std::vector<double> z(101);
    for (int i = 0; i <= 100; ++i) z[static_cast<std::size_t>(i)] = i;
    const auto k = quantile_knots(z, 3);
    ASSERT_EQ(k.size(), 3u);
    EXPECT_DOUBLE_EQ(k[0], 25.0);
    EXPECT_DOUBLE_EQ(k[1], 50.0);
    EXPECT_DOUBLE_EQ(k[2], 75.0);
}

TEST(Designs, PartiallyLinearNullSplit) {
    const auto tp = within_transform(testkit::random_panel(40, 3, 9));
    const auto ds = build_null_and_test_designs(tp, two_variable_spec(2, 4, 1), two_variable_spec(4, 4, 2));
    EXPECT_EQ(ds.m_n(), 4u);  // x1, x2, x2^2, x2^3
    EXPECT_EQ(ds.r_n(), 11u);
    EXPECT_EQ(ds.k_n(), 15u);
    EXPECT_TRUE(contains(ds.z_labels, "x1^2"));
    EXPECT_TRUE(contains(ds.z_labels, "x1^3"));
    EXPECT_TRUE(contains(ds.z_labels, "x1^1*x2^1"));
    EXPECT_FALSE(contains(ds.w_labels, "1"));
    ASSERT_FALSE(ds.dropped.empty());
    EXPECT_EQ(ds.dropped.front().label, "1");
}

TEST(Designs, NestednessViolation) {
    const auto tp = within_transform(testkit::random_panel(30, 3, 2));
    try {
        (void)build_null_and_test_designs(tp, two_variable_spec(5, 2, 1), two_variable_spec(4, 4, 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NestednessViolation);
    }
    try {
        (void)build_null_and_test_designs(tp, two_variable_spec(4, 4, 1), two_variable_spec(4, 4, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyTestSet);
    }
}

TEST(Designs, WageRestrictionCounts) {
    if (!std::filesystem::exists(testkit::psid_path())) GTEST_SKIP() << "fixture not fetched";
    const auto panel = load_panel(read_csv(testkit::psid_path().string()), "id", "year", "lwage",
                                  {"wks", "exp", "bluecol", "ind", "south", "smsa", "married", "union"});
    const auto tp = within_transform(panel);
    const auto alt = wage_spec(4, 4, 2);
    EXPECT_EQ(orthonormalize(build_null_and_test_designs(tp, wage_spec(2, 3, 1), alt)).r_n(), 12u);
    EXPECT_EQ(orthonormalize(build_null_and_test_designs(tp, wage_spec(2, 2, 1), alt)).r_n(), 13u);
    EXPECT_EQ(orthonormalize(build_null_and_test_designs(tp, wage_spec(2, 4, 1), alt)).r_n(), 11u);
}

TEST(Orthonormalize, GramIsIdentity) {
    DesignSplit ds;
    ds.W = testkit::random_matrix(50, 2, 1);
    ds.Z = testkit::random_matrix(50, 4, 2);
    ds.Z.col(3) += 1e3 * ds.Z.col(0);  // ill-conditioned but full rank
    ds.w_labels = {"a", "b"};
    ds.z_labels = {"c", "d", "e", "f"};
    const auto out = orthonormalize(ds);
    Eigen::MatrixXd P(50, 6);
    P << out.W, out.Z;
    const Eigen::MatrixXd gram = P.transpose() * P / 50.0;
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    EXPECT_NEAR(eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff(), 1.0, 1e-6);
    EXPECT_TRUE(out.orthonormal);
}

TEST(Orthonormalize, DuplicateOfWColumnDropped) {
    DesignSplit ds;
    ds.W = testkit::random_matrix(30, 2, 3);
    ds.Z = testkit::random_matrix(30, 3, 4);
    ds.Z.col(1) = ds.W.col(0);
    ds.w_labels = {"a", "b"};
    ds.z_labels = {"c", "copy", "e"};
    const auto out = orthonormalize(ds);
    EXPECT_EQ(out.m_n(), 2u);
    EXPECT_EQ(out.r_n(), 2u);
    ASSERT_EQ(out.dropped.size(), 1u);
    EXPECT_EQ(out.dropped[0].label, "copy");
}

TEST(Orthonormalize, FixedPointUpToSign) {
    DesignSplit ds;
    ds.W = testkit::random_matrix(40, 2, 5);
    ds.Z = testkit::random_matrix(40, 2, 6);
    ds.w_labels = {"a", "b"};
    ds.z_labels = {"c", "d"};
    const auto once = orthonormalize(ds);
    const auto twice = orthonormalize(once);
    for (Eigen::Index c = 0; c < 2; ++c) {
        EXPECT_LT(std::min((once.W.col(c) - twice.W.col(c)).norm(), (once.W.col(c) + twice.W.col(c)).norm()), 1e-10);
        EXPECT_LT(std::min((once.Z.col(c) - twice.Z.col(c)).norm(), (once.Z.col(c) + twice.Z.col(c)).norm()), 1e-10);
    }
}

TEST(Orthonormalize, SpanOfWPreserved) {
    DesignSplit ds;
    ds.W = testkit::random_matrix(60, 3, 7);
    ds.Z = testkit::random_matrix(60, 2, 8);
    ds.w_labels = {"a", "b", "c"};
    ds.z_labels = {"d", "e"};
    const Eigen::VectorXd y = testkit::random_vector(60, 9);
    const auto out = orthonormalize(ds);
    const Eigen::VectorXd r_raw = y - ds.W * ds.W.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd r_orth = y - out.W * out.W.colPivHouseholderQr().solve(y);
    EXPECT_LT((r_raw - r_orth).norm(), 1e-8 * r_raw.norm());
}

TEST(BasisColumns, SplineLabelsAndScaling) {
    const auto tp = within_transform(testkit::random_panel(30, 2, 11));
    BasisSpec s;
    s.family = BasisFamily::Spline;
    s.a_n = 6;
    s.variables.push_back({"x1", VariableRole::Nonparametric, {}, {}});
    const auto cols = build_basis_columns(tp, s);
    EXPECT_EQ(cols.level.cols(), 6);
    EXPECT_EQ(cols.labels[1], "x1^1");
    EXPECT_EQ(cols.labels[4].substr(0, 4), "(x1-");
    EXPECT_NEAR(cols.level.col(1).minCoeff(), 0.0, 1e-15);
    EXPECT_NEAR(cols.level.col(1).maxCoeff(), 1.0, 1e-15);
}
