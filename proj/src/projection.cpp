#include "sptest/projection.hpp"

#include "sptest/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace sptest {

Eigen::MatrixXd RestrictedFit::residualize(const Eigen::MatrixXd& A) const {
    if (Q.cols() == 0) return A;
    // Projecting twice removes the round-off left by a single pass.
    Eigen::MatrixXd out = A - Q * (Q.transpose() * A);
    out -= Q * (Q.transpose() * out);
    return out;
}

bool RestrictedFit::perfect_fit() const noexcept {
    const double r = residuals.norm();
    return r == 0.0 || r <= 1e-10 * y_norm;
}

Eigen::MatrixXd residual_covariance(const Eigen::VectorXd& residuals, std::size_t n,
                                    std::size_t T_prime) {
    const Eigen::Map<const Eigen::MatrixXd> E(residuals.data(), static_cast<Eigen::Index>(T_prime),
                                              static_cast<Eigen::Index>(n));
    return (E * E.transpose()) / static_cast<double>(n);
}

RestrictedFit fit_restricted(const Eigen::VectorXd& y, const Eigen::MatrixXd& W,
                             const Eigen::MatrixXd& Z, std::size_t n, std::size_t T_prime) {
    const auto rows = static_cast<Eigen::Index>(n * T_prime);
    if (y.size() != rows || W.rows() != rows || Z.rows() != rows) {
        throw Error(ErrorKind::InvalidPanel, "design rows do not match n*T'");
    }
    if (rows <= W.cols()) {
        throw Error(ErrorKind::InsufficientRows,
                    "n*T' = " + std::to_string(rows) + " rows cannot identify " +
                        std::to_string(W.cols()) + " null coefficients");
    }

    RestrictedFit fit;
    fit.n = n;
    fit.T_prime = T_prime;
    fit.y_norm = y.norm();
    const Eigen::Index m = W.cols();
    if (m == 0) {
        fit.beta1 = Eigen::VectorXd(0);
        fit.fitted = Eigen::VectorXd::Zero(rows);
        fit.residuals = y;
        fit.Q = Eigen::MatrixXd(rows, 0);
    } else {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(W);
        qr.setThreshold(kRankTolerance);
        if (qr.rank() < m) {
            throw Error(ErrorKind::RankDeficientW,
                        "null design has numerical rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(m) + " columns");
        }
        fit.beta1 = qr.solve(y);
        fit.Q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, m);
        fit.fitted = W * fit.beta1;
        fit.residuals = fit.residualize(y);
    }
    fit.Ztilde = fit.residualize(Z);
    fit.SigmaT = residual_covariance(fit.residuals, n, T_prime);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.SigmaT, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    fit.sigma_rank = top > 0.0 ? (eig.eigenvalues().array() > kRankTolerance * top).count() : 0;
    return fit;
}

RestrictedFit fit_restricted(const TransformedPanel& tp, const DesignSplit& ds) {
    return fit_restricted(tp.y, ds.W, ds.Z, tp.n, tp.T_prime);
}

Eigen::VectorXd cross_moment(const RestrictedFit& fit) {
    return fit.Ztilde.transpose() * fit.residuals;
}

}  // namespace sptest
