#include "sptest/pipeline.hpp"

namespace sptest {

TestRun run_specification_test(const TransformedPanel& tp, const BasisSpec& spec_null,
                               const BasisSpec& spec_alt, const TestOptions& opts) {
    TestRun run;
    run.design = orthonormalize(build_null_and_test_designs(tp, spec_null, spec_alt));
    run.fit = fit_restricted(tp, run.design);
    run.result = run_lm_test(run.fit, opts.kind);
    if (opts.bootstrap) {
        run.bootstrap = run_bootstrap(run.fit, MultiplierLaw::of(opts.law), opts.kind, opts.B,
                                      opts.seed, opts.threads);
        run.result.bootstrap_p = bootstrap_pvalue(run.result.t_rn, *run.bootstrap);
    }
    return run;
}

}  // namespace sptest
