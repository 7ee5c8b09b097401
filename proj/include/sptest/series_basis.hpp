#pragma once

#include "sptest/panel.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sptest {

enum class BasisFamily { Power, Spline };

/// How a raw regressor enters a model: linearly, through a full univariate
/// expansion, or as a dummy (linear, never interacted).
enum class VariableRole { Parametric, Nonparametric, Dummy };

[[nodiscard]] std::string_view to_string(BasisFamily f) noexcept;
[[nodiscard]] std::string_view to_string(VariableRole r) noexcept;
[[nodiscard]] BasisFamily parse_family(std::string_view s);
[[nodiscard]] VariableRole parse_role(std::string_view s);

struct VariableSpec {
    std::string name;
    VariableRole role = VariableRole::Nonparametric;
    std::optional<int> a_n;     ///< per-variable override of BasisSpec::a_n
    std::vector<double> knots;  ///< explicit knots in level units; empty = quantile placement
};

/**
 * @brief Series expansion used for one side (null or alternative) of the test.
 *
 * a_n counts the terms of each univariate expansion including the constant.
 * Power: (1, x, ..., x^{a_n-1}). Spline of order s: (1, x, ..., x^s,
 * (x-t_1)_+^s, ...) with a_n - s - 1 knots; when a_n <= s + 1 the spline has
 * no knots and reduces to the power expansion.
 */
struct BasisSpec {
    BasisFamily family = BasisFamily::Power;
    int a_n = 4;
    int spline_order = 3;
    int interaction_order = 1;
    std::vector<VariableSpec> variables;

    [[nodiscard]] int terms_for(const VariableSpec& v) const noexcept {
        return v.a_n.value_or(a_n);
    }
};

struct UnivariateBasis {
    BasisFamily family = BasisFamily::Power;
    int a_n = 4;
    int spline_order = 3;
    std::vector<double> knots;
};

/// Number of knots implied by a_n for a spline of the given order.
[[nodiscard]] int implied_knot_count(int a_n, int spline_order) noexcept;

/// Equally spaced empirical quantiles j/(K+1), j = 1..K, of z.
[[nodiscard]] std::vector<double> quantile_knots(std::span<const double> z, int count);

/**
 * @brief Evaluates a univariate expansion at every point of z.
 *
 * Returns a (|z| x a_n) matrix; column 0 is the constant. Powers are formed by
 * iterated multiplication.
 *
 * @throws Error DegreeTooSmall if a_n < 2; KnotOutOfRange if knots are not
 *         strictly increasing and strictly inside (min z, max z), or their
 *         count disagrees with a_n.
 */
[[nodiscard]] Eigen::MatrixXd build_univariate(std::span<const double> z,
                                               const UnivariateBasis& basis);

/// Level-unit basis columns with a provenance label per column.
struct BasisColumns {
    Eigen::MatrixXd level;
    std::vector<std::string> labels;
};

/// Evaluates every column of spec on the panel's level regressors (after the
/// affine [0, 1] rescaling of continuous variables), including the constant.
[[nodiscard]] BasisColumns build_basis_columns(const TransformedPanel& tp, const BasisSpec& spec);

struct DroppedColumn {
    std::string label;
    std::string reason;
};

/// Transformed restricted design W (m_n columns) and test directions Z (r_n columns).
struct DesignSplit {
    Eigen::MatrixXd W;
    Eigen::MatrixXd Z;
    std::vector<std::string> w_labels;
    std::vector<std::string> z_labels;
    std::vector<DroppedColumn> dropped;
    bool orthonormal = false;

    [[nodiscard]] std::size_t m_n() const noexcept { return static_cast<std::size_t>(W.cols()); }
    [[nodiscard]] std::size_t r_n() const noexcept { return static_cast<std::size_t>(Z.cols()); }
    [[nodiscard]] std::size_t k_n() const noexcept { return m_n() + r_n(); }
};

/**
 * @brief Splits the alternative expansion into null columns W and the extra
 * test directions Z, both transformed.
 *
 * Columns the transform annihilates (the constant, time-invariant terms) are
 * dropped and recorded.
 *
 * @throws Error NestednessViolation if a null column is outside the span of the
 *         alternative columns; EmptyTestSet if no test direction survives.
 */
[[nodiscard]] DesignSplit build_null_and_test_designs(const TransformedPanel& tp,
                                                      const BasisSpec& spec_null,
                                                      const BasisSpec& spec_alt);

/// Relative residual norm below which a column counts as linearly dependent.
inline constexpr double kRankTolerance = 1e-8;

/**
 * @brief Sequential Gram-Schmidt over the columns of W, then Z.
 *
 * Output columns satisfy a'b / N = delta_ab with N the row count. span(W) and
 * span(Z | W) are preserved; columns whose residual falls below
 * kRankTolerance times their original norm are dropped and recorded.
 */
[[nodiscard]] DesignSplit orthonormalize(const DesignSplit& ds);

}  // namespace sptest
