#pragma once

#include "sptest/lm_test.hpp"
#include "sptest/panel.hpp"
#include "sptest/projection.hpp"
#include "sptest/series_basis.hpp"
#include "sptest/wild_bootstrap.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>

namespace sptest {

struct TestOptions {
    StatKind kind = StatKind::Heteroskedastic;
    bool bootstrap = false;
    MultiplierKind law = MultiplierKind::Rademacher;
    std::size_t B = 399;
    std::uint64_t seed = 20190912;
    unsigned threads = 0;
};

struct TestRun {
    DesignSplit design;
    RestrictedFit fit;
    TestResult result;
    std::optional<BootstrapDistribution> bootstrap;
};

/// designs -> orthonormalize -> restricted fit -> inner matrix -> statistic
/// (-> wild bootstrap p-value when requested).
[[nodiscard]] TestRun run_specification_test(const TransformedPanel& tp, const BasisSpec& spec_null,
                                             const BasisSpec& spec_alt, const TestOptions& opts);

}  // namespace sptest
