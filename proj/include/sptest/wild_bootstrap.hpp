#pragma once

#include "sptest/lm_test.hpp"
#include "sptest/projection.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace sptest {

enum class MultiplierKind { Mammen, Rademacher };

[[nodiscard]] std::string_view to_string(MultiplierKind k) noexcept;
[[nodiscard]] MultiplierKind parse_multiplier_kind(std::string_view s);

/// Two-point multiplier law with mean 0 and variance 1.
struct MultiplierLaw {
    MultiplierKind kind = MultiplierKind::Rademacher;
    std::array<double, 2> support{};
    std::array<double, 2> probabilities{};

    [[nodiscard]] static MultiplierLaw mammen();
    [[nodiscard]] static MultiplierLaw rademacher();
    [[nodiscard]] static MultiplierLaw of(MultiplierKind kind);

    /// E[V^k] computed from the two support points.
    [[nodiscard]] double moment(int k) const noexcept;
};

/// One multiplier per individual, a pure function of (seed, rep_index).
[[nodiscard]] Eigen::VectorXd draw_multipliers(const MultiplierLaw& law, std::size_t n,
                                               std::uint64_t seed, std::uint64_t rep_index);

/**
 * @brief Precomputed pieces of a restricted fit reused by every replicate.
 *
 * The design is fixed across replicates, so the restricted refit reduces to
 * e* = M_W (V_i e_i) with the stored orthonormal basis of W, and the
 * homoskedastic inner matrix is sum_{s,t} Sigma*_{st} C_{st} with
 * C_{st} = sum_i z_is z_it'.
 */
class BootstrapContext {
public:
    explicit BootstrapContext(const RestrictedFit& fit);

    /// Normalized statistic (xi* - r_n) / sqrt(2 r_n) for the given multipliers.
    /// Throws SingularOmega for a degenerate replicate.
    [[nodiscard]] double statistic(const Eigen::VectorXd& multipliers, StatKind kind) const;

    /// Restricted residuals of the bootstrap sample.
    [[nodiscard]] Eigen::VectorXd bootstrap_residuals(const Eigen::VectorXd& multipliers) const;

    [[nodiscard]] const RestrictedFit& fit() const noexcept { return *fit_; }

private:
    const RestrictedFit* fit_;
    std::vector<Eigen::MatrixXd> cross_blocks_;  // C_{st}, index s*T' + t
};

/// Single replicate: statistic of the requested kind at rep_index.
[[nodiscard]] double bootstrap_statistic(const RestrictedFit& fit, const MultiplierLaw& law,
                                         StatKind kind, std::uint64_t seed,
                                         std::uint64_t rep_index);

struct BootstrapDistribution {
    std::vector<double> stats;  ///< successful replicate statistics in index order
    std::size_t B = 0;          ///< requested replicates
    std::size_t failed = 0;     ///< replicates with a singular inner matrix
    std::uint64_t seed = 0;
    MultiplierLaw law;
    StatKind kind = StatKind::Homoskedastic;
};

/// Maximum share of failed replicates before the run aborts.
inline constexpr double kMaxFailureShare = 0.01;

/**
 * @brief Runs B wild-bootstrap replicates, optionally on several threads.
 *
 * Results are written into a fixed-index array, so the output is bitwise
 * identical for any thread count.
 *
 * @throws Error BootstrapFailure when more than 1% of replicates fail.
 */
[[nodiscard]] BootstrapDistribution run_bootstrap(const RestrictedFit& fit,
                                                  const MultiplierLaw& law, StatKind kind,
                                                  std::size_t B, std::uint64_t seed,
                                                  unsigned threads = 1);

/// (1 + #{b : stats_b >= observed}) / (B + 1).
[[nodiscard]] double bootstrap_pvalue(double observed, const BootstrapDistribution& dist);

/// Upper (1 - level) empirical quantile of the replicate statistics.
[[nodiscard]] double bootstrap_critical_value(const BootstrapDistribution& dist, double level);

/// One value per line under the header "t_star".
void write_bootstrap_csv(std::ostream& out, const BootstrapDistribution& dist);

}  // namespace sptest
