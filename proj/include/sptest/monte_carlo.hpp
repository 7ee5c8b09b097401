#pragma once

#include "sptest/lm_test.hpp"
#include "sptest/panel.hpp"
#include "sptest/series_basis.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sptest {

/// sp_null / np_alt use (x1, x2); the linear designs use x1 only.
enum class Dgp { SpNull, NpAlt, LinearNull, LinearSmoothAlt, LinearOrthogonalAlt };
enum class ErrorLaw { Homoskedastic, Heteroskedastic };

[[nodiscard]] std::string_view to_string(Dgp d) noexcept;
[[nodiscard]] std::string_view to_string(ErrorLaw e) noexcept;
[[nodiscard]] Dgp parse_dgp(std::string_view s);
[[nodiscard]] ErrorLaw parse_error_law(std::string_view s);
[[nodiscard]] bool is_linear_design(Dgp d) noexcept;

/// Regressors are i.i.d. Uniform(low, high) across variables, individuals and periods.
struct RegressorLaw {
    double low = 0.65;
    double high = 3.35;
};

struct DgpConfig {
    std::size_t n = 250;
    std::size_t T = 2;
    Dgp dgp = Dgp::SpNull;
    ErrorLaw errors = ErrorLaw::Homoskedastic;
    std::uint64_t seed = 20190912;
    RegressorLaw regressors;
    double effect_sd = 1.5;  ///< sd of nu_i
    double error_sd = 2.0;   ///< homoskedastic error sd

    void validate() const;
};

/// g(x2) = 3 + 2 (exp(x2) - 2 ln(x2 + 3)).
[[nodiscard]] double g_function(double x2);
/// h(x1, x2) = 1.25 cos(x1 - 2) sin(0.75 x2).
[[nodiscard]] double h_function(double x1, double x2);
/// Degree-5 Legendre polynomial of x1 rescaled to the regressor law, unit
/// variance; orthogonal to 1, x1, ..., x1^4 under that law.
[[nodiscard]] double orthogonal_alternative(double x1, const RegressorLaw& law);
/// Conditional mean without the fixed effect.
[[nodiscard]] double mean_function(Dgp dgp, double x1, double x2, const RegressorLaw& law);
/// Conditional error variance; x2 is ignored by the linear designs' callers (pass 0).
[[nodiscard]] double error_variance(ErrorLaw law, double x1, double x2, double error_sd);

/// Deterministic panel for (cfg.seed, rep_index). Regressors, nu_i and errors
/// come from separate substreams.
[[nodiscard]] PanelDataset generate_panel(const DgpConfig& cfg, std::uint64_t rep_index);

/// Null and alternative expansions the study uses for a design at a_n.
[[nodiscard]] std::pair<BasisSpec, BasisSpec> study_specs(Dgp dgp, BasisFamily family, int a_n);

enum class Variant { XiRn, TRn, XiKn, TKn, BootRademacher, BootMammen, DataDriven };

[[nodiscard]] std::string_view to_string(Variant v) noexcept;
[[nodiscard]] Variant parse_variant(std::string_view s);

struct McTestSpec {
    BasisFamily family = BasisFamily::Power;
    std::vector<int> a_values{4};
    std::vector<Variant> variants{Variant::XiRn, Variant::TRn, Variant::XiKn, Variant::TKn};
    StatKind kind = StatKind::Homoskedastic;
    Transform transform = Transform::Within;
    int grid_min = 4;
    int grid_max = 9;
    double c = 5.0;
    std::size_t B = 399;
    double level = 0.05;
    unsigned threads = 0;  ///< 0 = hardware concurrency
};

struct McCell {
    Variant variant = Variant::XiRn;
    int a_n = 0;  ///< 0 for the data-driven row
    double m_n = 0.0;  ///< averages over successful replications
    double r_n = 0.0;
    double k_n = 0.0;
    std::size_t rejections = 0;
    std::size_t trials = 0;
    double rate = 0.0;
    double mc_se = 0.0;
    std::vector<std::int8_t> decisions;  ///< per replication: 1 reject, 0 accept, -1 failed
};

struct McResult {
    std::vector<McCell> cells;
    std::size_t M = 0;
    std::size_t failures = 0;
    std::vector<std::string> failure_messages;  ///< first few, for diagnostics

    [[nodiscard]] const McCell& cell(Variant v, int a_n = 0) const;
};

/// Maximum share of failed replications before run_mc aborts.
inline constexpr double kMaxReplicationFailureShare = 0.01;

/**
 * @brief Size/power study: M replications of generate, transform, build
 * designs and test with every requested variant at the nominal level.
 *
 * Each replication is a pure function of (cfg, index); results are aggregated
 * by index so the output does not depend on the thread count.
 *
 * @throws Error ReplicationFailure when more than 1% of replications fail.
 */
[[nodiscard]] McResult run_mc(const DgpConfig& cfg, const McTestSpec& spec, std::size_t M);

/// Columns: variant,a_n,m_n,r_n,k_n,rejection_rate,mc_se.
void write_mc_csv(std::ostream& out, const McResult& result);

}  // namespace sptest
