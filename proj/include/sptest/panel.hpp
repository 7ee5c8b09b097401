#pragma once

#include "sptest/csv.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sptest {

/**
 * @brief Balanced long-format panel in individual-major order.
 *
 * Row i*T + t holds period t of individual i; periods are sorted within each
 * individual. Every individual has exactly T periods and there are no missing
 * values.
 */
struct PanelDataset {
    std::size_t n = 0;  ///< individuals
    std::size_t T = 0;  ///< periods per individual
    std::vector<std::string> ids;    ///< n labels
    std::vector<std::string> times;  ///< T labels, sorted
    std::string y_name;
    std::vector<std::string> x_names;
    Eigen::VectorXd y;  ///< n*T outcome, level units
    Eigen::MatrixXd X;  ///< n*T x d_x regressors, level units
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t rows() const noexcept { return n * T; }
    [[nodiscard]] std::size_t dx() const noexcept { return static_cast<std::size_t>(X.cols()); }
    [[nodiscard]] std::size_t column(std::string_view name) const;

    /// Throws InvalidPanel if shapes disagree or n < 2, T < 2, d_x < 1.
    void validate() const;
};

/// Builds a dataset from individual-major arrays with generated labels 1..n / 1..T.
[[nodiscard]] PanelDataset make_panel(std::size_t n, std::size_t T, Eigen::VectorXd y,
                                      Eigen::MatrixXd X, std::vector<std::string> x_names,
                                      std::string y_name = "y");

/**
 * @brief Loads a balanced panel from long-format records.
 *
 * Rows may arrive in any order. Time labels are ordered numerically when every
 * label parses as a number, otherwise lexicographically (with a warning).
 *
 * @throws Error MissingColumn, UnbalancedPanel, DuplicateCell, MissingValue, ParseError
 */
[[nodiscard]] PanelDataset load_panel(const CsvTable& table, std::string_view id_col,
                                      std::string_view time_col, std::string_view y_col,
                                      const std::vector<std::string>& x_cols);

enum class Transform { Within, FirstDifference };

[[nodiscard]] std::string_view to_string(Transform t) noexcept;
[[nodiscard]] Transform parse_transform(std::string_view s);

/// Number of transformed periods: T for within, T-1 for first differences.
[[nodiscard]] std::size_t transformed_periods(Transform t, std::size_t T) noexcept;

/// Applies the fixed-effect-eliminating transform column by column to an
/// individual-major (n*T x k) matrix, returning (n*T' x k).
[[nodiscard]] Eigen::MatrixXd apply_transform(Transform t, std::size_t n, std::size_t T,
                                              const Eigen::MatrixXd& level);

struct TransformedPanel {
    Transform tag = Transform::Within;
    std::size_t n = 0;
    std::size_t T = 0;        ///< source periods
    std::size_t T_prime = 0;  ///< transformed periods
    Eigen::VectorXd y;        ///< n*T' transformed outcome
    Eigen::MatrixXd X;        ///< n*T' x d_x transformed regressors
    Eigen::MatrixXd X_level;  ///< n*T x d_x source regressors for basis evaluation
    Eigen::VectorXd y_level;
    std::vector<std::string> x_names;

    [[nodiscard]] std::size_t rows() const noexcept { return n * T_prime; }

    /// Transforms basis columns evaluated on X_level with the same rule.
    [[nodiscard]] Eigen::MatrixXd transform(const Eigen::MatrixXd& level) const {
        return apply_transform(tag, n, T, level);
    }
};

[[nodiscard]] TransformedPanel within_transform(const PanelDataset& p);
[[nodiscard]] TransformedPanel first_difference(const PanelDataset& p);
[[nodiscard]] TransformedPanel transform_panel(const PanelDataset& p, Transform t);

}  // namespace sptest
