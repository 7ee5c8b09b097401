#pragma once

#include "sptest/lm_test.hpp"
#include "sptest/projection.hpp"
#include "sptest/series_basis.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sptest {

struct SelectionCandidate {
    int a_n = 0;
    DesignSplit design;  ///< orthonormalized; W identical across candidates
    std::size_t r_n = 0;
};

struct SelectionGrid {
    std::vector<SelectionCandidate> candidates;
    double c = 5.0;
    bool nested = true;  ///< every candidate's test span contains the previous one

    [[nodiscard]] std::size_t r_min() const;
    [[nodiscard]] double gamma_n() const;
};

/// c * sqrt(2 ln(cardinality)).
[[nodiscard]] double penalty_gamma(std::size_t cardinality, double c);

/// xi - r - gamma * sqrt(2 (r - r_min)).
[[nodiscard]] double selection_criterion(double xi, std::size_t r, std::size_t r_min, double gamma);

/**
 * @brief Builds one candidate per a_n in [a_min, a_max], raising the
 * univariate expansion of every nonparametric variable of alt_template.
 *
 * Candidates whose r_n repeats an earlier candidate's are skipped. Throws
 * InvalidConfig if fewer than two distinct candidates remain.
 */
[[nodiscard]] SelectionGrid build_selection_grid(const TransformedPanel& tp,
                                                 const BasisSpec& spec_null,
                                                 const BasisSpec& alt_template, int a_min,
                                                 int a_max, double c = 5.0);

struct CriterionRow {
    int a_n = 0;
    std::size_t r_n = 0;
    double xi = 0.0;
    double criterion = 0.0;
};

struct SelectionResult {
    std::size_t chosen = 0;  ///< index into the grid
    int a_n = 0;
    TestResult test;         ///< un-penalized test at the chosen r_n (post-selection: nominal)
    std::vector<CriterionRow> table;
    double gamma_n = 0.0;
    std::size_t r_min = 0;
};

/// Index maximizing the criterion; ties go to the smallest r_n.
[[nodiscard]] std::size_t argmax_criterion(std::span<const double> xi,
                                           std::span<const std::size_t> r, double gamma);

/**
 * @brief Penalized-maximum choice of the number of test directions.
 *
 * `fit` is the restricted fit on the shared W; each candidate's directions are
 * residualized against it. Throws SingularOmega naming the candidate whose
 * inner matrix is singular.
 */
[[nodiscard]] SelectionResult select_rn(const RestrictedFit& fit, const SelectionGrid& grid,
                                        StatKind kind);

}  // namespace sptest
