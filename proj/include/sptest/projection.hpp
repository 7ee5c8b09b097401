#pragma once

#include "sptest/panel.hpp"
#include "sptest/series_basis.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace sptest {

/**
 * @brief Restricted least-squares fit on transformed data.
 *
 * Residuals are stored individual-major, so residual_block(i) is the T'-vector
 * of individual i. Q spans the columns of W with Q'Q = I and is reused to
 * residualize further test directions and bootstrap outcomes.
 */
struct RestrictedFit {
    std::size_t n = 0;
    std::size_t T_prime = 0;
    Eigen::VectorXd beta1;      ///< m_n coefficients
    Eigen::VectorXd fitted;     ///< W * beta1
    Eigen::VectorXd residuals;  ///< M_W y
    Eigen::MatrixXd Ztilde;     ///< M_W Z
    Eigen::MatrixXd SigmaT;     ///< (1/n) sum_i e_i e_i'
    Eigen::MatrixXd Q;          ///< orthonormal basis of span(W)
    double y_norm = 0.0;
    Eigen::Index sigma_rank = 0;  ///< numerical rank of SigmaT

    [[nodiscard]] std::size_t rows() const noexcept { return n * T_prime; }
    [[nodiscard]] Eigen::Index r_n() const noexcept { return Ztilde.cols(); }

    [[nodiscard]] auto residual_block(std::size_t i) const {
        return residuals.segment(static_cast<Eigen::Index>(i * T_prime),
                                 static_cast<Eigen::Index>(T_prime));
    }

    /// Applies the residual maker M_W.
    [[nodiscard]] Eigen::MatrixXd residualize(const Eigen::MatrixXd& A) const;

    /// True when the outcome lies in span(W) up to round-off, so every
    /// statistic built from the residuals is zero.
    [[nodiscard]] bool perfect_fit() const noexcept;
};

/// (1/n) sum_i e_i e_i' for an individual-major residual vector.
[[nodiscard]] Eigen::MatrixXd residual_covariance(const Eigen::VectorXd& residuals, std::size_t n,
                                                  std::size_t T_prime);

/**
 * @brief Regresses the transformed outcome on W by column-pivoted Householder QR.
 *
 * @throws Error InsufficientRows when n*T' <= m_n; RankDeficientW when W has
 *         numerical rank below its column count.
 */
[[nodiscard]] RestrictedFit fit_restricted(const TransformedPanel& tp, const DesignSplit& ds);

/// Same as above with explicit arrays (outcome individual-major, n*T' rows).
[[nodiscard]] RestrictedFit fit_restricted(const Eigen::VectorXd& y, const Eigen::MatrixXd& W,
                                           const Eigen::MatrixXd& Z, std::size_t n,
                                           std::size_t T_prime);

/// sum_i Ztilde_i' e_i (un-normalized).
[[nodiscard]] Eigen::VectorXd cross_moment(const RestrictedFit& fit);

}  // namespace sptest
