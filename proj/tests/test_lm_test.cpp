#include "sptest/distributions.hpp"
#include "sptest/error.hpp"
#include "sptest/lm_test.hpp"

#include "support.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace sptest;
using testkit::random_matrix;
using testkit::random_vector;

namespace {

// Independent chi-square inverse: density integrated by Gauss-Kronrod
// quadrature (after t = u^2, which removes the singularity at 0 for df = 1),
// inverted by bisection.
double chi2_cdf_oracle(double df, double x) {
    const double k = df / 2.0;
    auto integrand = [k](double u) {
        if (u <= 0.0) return k == 0.5 ? 2.0 / (std::sqrt(2.0) * std::tgamma(0.5)) : 0.0;
        const double t = u * u;
        return 2.0 * u * std::exp((k - 1.0) * std::log(t) - t / 2.0 - k * std::log(2.0) - std::lgamma(k));
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, std::sqrt(x), 8, 1e-13);
}

double chi2_quantile_oracle(double df, double p) {
    double lo = 0.0;
    double hi = df + 20.0 * std::sqrt(2.0 * df) + 50.0;
    for (int it = 0; it < 64; ++it) {
        const double mid = 0.5 * (lo + hi);
        (chi2_cdf_oracle(df, mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

RestrictedFit random_fit(std::size_t n, std::size_t Tp, Eigen::Index m, Eigen::Index r, std::uint64_t seed) {
    const auto rows = static_cast<Eigen::Index>(n * Tp);
    return fit_restricted(random_vector(rows, seed), random_matrix(rows, m, seed + 1),
                          random_matrix(rows, r, seed + 2), n, Tp);
}

}  // namespace

TEST(Distributions, TableCriticalValues) {
    EXPECT_NEAR(chi2_quantile(12, 0.95), 21.026, 1e-3);
    EXPECT_NEAR(chi2_quantile(13, 0.95), 22.362, 1e-3);
    EXPECT_NEAR(chi2_quantile(11, 0.90), 17.275, 1e-3);
    EXPECT_NEAR(normal_quantile(0.95), 1.645, 1e-3);
    EXPECT_NEAR(normal_quantile(0.90), 1.282, 1e-3);
    EXPECT_EQ(normal_quantile(0.5), 0.0);
}

TEST(Distributions, ChiSquareMatchesQuadratureOracle) {
    for (double df : {1.0, 2.0, 5.0, 11.0, 30.0}) {
        for (double p : {0.05, 0.5, 0.9, 0.99}) {
            const double q = chi2_quantile(df, p);
            EXPECT_NEAR(q, chi2_quantile_oracle(df, p), 1e-8 * q) << df << " " << p;
            EXPECT_NEAR(chi2_upper_tail(df, q), 1.0 - p, 1e-10);
        }
    }
    EXPECT_EQ(chi2_upper_tail(3, -1.0), 1.0);
}

TEST(Distributions, DomainErrors) {
    for (auto fn : {+[] { (void)chi2_quantile(0.5, 0.5); }, +[] { (void)chi2_quantile(3, 1.0); },
                    +[] { (void)normal_quantile(0.0); }}) {
        try {
            fn();
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::DomainError);
        }
    }
}

TEST(Omega, ScalarHomoskedasticCase) {
    const auto fit = fit_restricted(random_vector(20, 1), random_matrix(20, 1, 2), random_matrix(20, 1, 3), 20, 1);
    const double sigma2 = fit.residuals.squaredNorm() / 20.0;
    const auto om = omega(fit, StatKind::Homoskedastic);
    EXPECT_NEAR(om.matrix(0, 0), sigma2 * fit.Ztilde.squaredNorm(), 1e-12);
}

TEST(Omega, HeteroskedasticConstantResidualBlocks) {
    const std::size_t n = 10, Tp = 3;
    const Eigen::MatrixXd Zt = random_matrix(30, 2, 4);
    const Eigen::Vector3d c(0.5, -1.0, 2.0);
    Eigen::VectorXd e(30);
    for (std::size_t i = 0; i < n; ++i) e.segment(static_cast<Eigen::Index>(3 * i), 3) = c;
    Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(2, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d g = Zt.middleRows(static_cast<Eigen::Index>(3 * i), 3).transpose() * c;
        oracle += g * g.transpose();
    }
    const auto om = omega(Zt, e, n, Tp, StatKind::Heteroskedastic);
    EXPECT_LT((om.matrix - oracle).norm(), 1e-12 * oracle.norm());
}

TEST(Omega, PositiveDefiniteAndSingular) {
    const auto fit = random_fit(30, 3, 2, 4, 5);
    for (auto kind : {StatKind::Homoskedastic, StatKind::Heteroskedastic}) {
        const auto om = omega(fit, kind);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(om.matrix);
        EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
        EXPECT_TRUE(om.matrix.isApprox(om.matrix.transpose()));
        EXPECT_GE(om.condition_number, 1.0);
    }
    Eigen::MatrixXd Zt = random_matrix(30, 2, 6);
    Zt.col(1) = Zt.col(0);
    try {
        (void)omega(Zt, random_vector(30, 7), 10, 3, StatKind::Heteroskedastic);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularOmega);
        EXPECT_NE(std::string(e.what()).find("a_n"), std::string::npos);
    }
}

TEST(QuadraticForm, DenseInverseOracle) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Eigen::Index r = 1 + static_cast<Eigen::Index>(seed % 4);
        const Eigen::MatrixXd A = random_matrix(r + 3, r, seed);
        const auto om = make_omega(A.transpose() * A, StatKind::Heteroskedastic);
        const Eigen::VectorXd v = random_vector(r, seed + 100);
        const double oracle = v.dot(om.matrix.inverse() * v);
        EXPECT_NEAR(quadratic_form(v, om), oracle, 1e-8 * oracle);
    }
    const auto om = make_omega(Eigen::MatrixXd::Identity(3, 3), StatKind::Homoskedastic);
    EXPECT_EQ(quadratic_form(Eigen::VectorXd::Zero(3), om), 0.0);
}

TEST(TestResult, TableNormalizations) {
    EXPECT_NEAR(make_result(19.835, StatKind::Heteroskedastic, 9, 12).t_rn, 1.599, 5e-4);
    EXPECT_NEAR(make_result(42.318, StatKind::Heteroskedastic, 8, 13).t_rn, 5.750, 5e-4);
    EXPECT_NEAR(make_result(15.957, StatKind::Heteroskedastic, 10, 11).t_rn, 1.057, 5e-4);
    const auto r = make_result(19.835, StatKind::Heteroskedastic, 9, 12);
    EXPECT_EQ(r.k_n, 21u);
    EXPECT_EQ(r.t_rn, (r.xi - 12.0) / std::sqrt(24.0));
    EXPECT_LT(r.t_kn, r.t_rn);
    EXPECT_GT(r.p_normal, 0.05);
    EXPECT_LT(r.p_normal, 0.10);
    EXPECT_NEAR(r.crit_chi2_05, 21.026, 1e-3);
    EXPECT_NEAR(r.crit_normal_10, 1.282, 1e-3);
    const auto zero = make_result(0.0, StatKind::Homoskedastic, 1, 3);
    EXPECT_EQ(zero.p_chi2, 1.0);
}

TEST(LmTest, NonnegativeScaleAndRecombinationInvariant) {
    const std::size_t n = 40, Tp = 3;
    const Eigen::MatrixXd W = random_matrix(120, 3, 21);
    const Eigen::MatrixXd Z = random_matrix(120, 4, 22);
    const Eigen::VectorXd y = random_vector(120, 23);
    const Eigen::MatrixXd R = random_matrix(4, 4, 24) + 3.0 * Eigen::MatrixXd::Identity(4, 4);
    for (auto kind : {StatKind::Homoskedastic, StatKind::Heteroskedastic}) {
        const double base = run_lm_test(fit_restricted(y, W, Z, n, Tp), kind).xi;
        EXPECT_GE(base, 0.0);
        const double scaled = run_lm_test(fit_restricted(-7.5 * y, W, Z, n, Tp), kind).xi;
        const double mixed = run_lm_test(fit_restricted(y, W, Z * R, n, Tp), kind).xi;
        EXPECT_NEAR(scaled, base, 1e-6 * base);
        EXPECT_NEAR(mixed, base, 1e-6 * base);
    }
}

TEST(LmTest, PerfectFitGivesZero) {
    const Eigen::MatrixXd W = random_matrix(60, 2, 31);
    const Eigen::VectorXd y = W * Eigen::Vector2d(2.0, -1.0);
    const auto r = run_lm_test(fit_restricted(y, W, random_matrix(60, 3, 32), 20, 3), StatKind::Heteroskedastic);
    EXPECT_EQ(r.xi, 0.0);
    EXPECT_EQ(r.p_chi2, 1.0);
    EXPECT_TRUE(r.perfect_fit);
}

TEST(LmTest, SummaryMentionsCounts) {
    const auto s = summary_line(make_result(19.835, StatKind::Heteroskedastic, 9, 12));
    EXPECT_NE(s.find("r_n = 12"), std::string::npos);
    EXPECT_EQ(parse_stat_kind("hc"), StatKind::Heteroskedastic);
    EXPECT_EQ(to_string(StatKind::Homoskedastic), "hom");
}
