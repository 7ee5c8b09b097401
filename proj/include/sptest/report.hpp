#pragma once

#include "sptest/adaptive_selection.hpp"
#include "sptest/lm_test.hpp"
#include "sptest/monte_carlo.hpp"
#include "sptest/series_basis.hpp"
#include "sptest/wild_bootstrap.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sptest {

using json = nlohmann::json;

enum class Subcommand { Test, Mc, Select };
enum class Inference { Asymptotic, Bootstrap, Both };

[[nodiscard]] std::string_view to_string(Subcommand s) noexcept;
[[nodiscard]] std::string_view to_string(Inference i) noexcept;
[[nodiscard]] Inference parse_inference(std::string_view s);

/// Fully resolved configuration of one CLI run; embedded in every report.
struct RunConfig {
    Subcommand subcommand = Subcommand::Test;

    // data
    std::string data;
    std::string id_col = "id";
    std::string time_col = "time";
    std::string y_col = "y";
    std::vector<std::string> x_cols;
    std::vector<std::string> dummies;
    Transform transform = Transform::Within;

    // model
    BasisSpec null_spec;
    BasisSpec alt_spec;
    StatKind kind = StatKind::Heteroskedastic;

    // inference
    Inference inference = Inference::Asymptotic;
    MultiplierKind boot_law = MultiplierKind::Rademacher;
    std::size_t boot_reps = 399;
    int grid_min = 4;
    int grid_max = 9;
    double penalty_c = 5.0;
    std::uint64_t seed = 20190912;
    unsigned threads = 0;

    // simulation
    DgpConfig dgp;
    McTestSpec mc;
    std::size_t M = 1000;

    // outputs
    std::string out = "report.json";
    std::string csv_out = "mc_results.csv";
    std::string boot_out;

    /// Throws InvalidConfig on inconsistent settings.
    void validate() const;
};

[[nodiscard]] json basis_spec_to_json(const BasisSpec& spec);
[[nodiscard]] BasisSpec basis_spec_from_json(const json& j);

[[nodiscard]] json run_config_to_json(const RunConfig& cfg);
/// Overlays the keys present in j onto cfg.
void apply_run_config_json(const json& j, RunConfig& cfg);

[[nodiscard]] json test_result_to_json(const TestResult& r);
[[nodiscard]] TestResult test_result_from_json(const json& j);

[[nodiscard]] json design_to_json(const DesignSplit& ds);
[[nodiscard]] json selection_to_json(const SelectionResult& sel);
[[nodiscard]] json mc_result_to_json(const McResult& r);

}  // namespace sptest
