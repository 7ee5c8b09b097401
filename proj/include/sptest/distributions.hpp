#pragma once

namespace sptest {

/// Inverse CDF of chi-square(df); df >= 1, prob in (0, 1). Throws DomainError.
[[nodiscard]] double chi2_quantile(double df, double prob);

/// Upper tail 1 - F(x) of chi-square(df); 1 for x <= 0.
[[nodiscard]] double chi2_upper_tail(double df, double x);

/// Standard normal inverse CDF; prob in (0, 1). Throws DomainError.
[[nodiscard]] double normal_quantile(double prob);

/// 1 - Phi(x).
[[nodiscard]] double normal_upper_tail(double x);

}  // namespace sptest
