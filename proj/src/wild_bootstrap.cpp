#include "sptest/wild_bootstrap.hpp"

#include "sptest/error.hpp"
#include "sptest/parallel.hpp"
#include "sptest/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace sptest {

std::string_view to_string(MultiplierKind k) noexcept {
    return k == MultiplierKind::Mammen ? "mammen" : "rademacher";
}

MultiplierKind parse_multiplier_kind(std::string_view s) {
    if (s == "mammen") return MultiplierKind::Mammen;
    if (s == "rademacher") return MultiplierKind::Rademacher;
    throw Error(ErrorKind::InvalidConfig, "unknown bootstrap law: " + std::string(s));
}

MultiplierLaw MultiplierLaw::mammen() {
    const double s5 = std::sqrt(5.0);
    MultiplierLaw law;
    law.kind = MultiplierKind::Mammen;
    law.support = {(1.0 - s5) / 2.0, (1.0 + s5) / 2.0};
    law.probabilities = {(s5 + 1.0) / (2.0 * s5), (s5 - 1.0) / (2.0 * s5)};
    return law;
}

MultiplierLaw MultiplierLaw::rademacher() {
    MultiplierLaw law;
    law.kind = MultiplierKind::Rademacher;
    law.support = {-1.0, 1.0};
    law.probabilities = {0.5, 0.5};
    return law;
}

MultiplierLaw MultiplierLaw::of(MultiplierKind kind) {
    return kind == MultiplierKind::Mammen ? mammen() : rademacher();
}

double MultiplierLaw::moment(int k) const noexcept {
    return probabilities[0] * std::pow(support[0], k) + probabilities[1] * std::pow(support[1], k);
}

Eigen::VectorXd draw_multipliers(const MultiplierLaw& law, std::size_t n, std::uint64_t seed,
                                 std::uint64_t rep_index) {
    CounterStream rng(seed, {stream::kBootstrap, rep_index});
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = rng.uniform() < law.probabilities[0] ? law.support[0] : law.support[1];
    return v;
}

BootstrapContext::BootstrapContext(const RestrictedFit& fit) : fit_(&fit) {
    const auto Tp = static_cast<Eigen::Index>(fit.T_prime);
    const auto r = fit.Ztilde.cols();
    cross_blocks_.assign(static_cast<std::size_t>(Tp * Tp), Eigen::MatrixXd::Zero(r, r));
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(fit.n); ++i) {
        const auto block = fit.Ztilde.middleRows(i * Tp, Tp);
        for (Eigen::Index s = 0; s < Tp; ++s) {
            for (Eigen::Index t = 0; t < Tp; ++t) {
                cross_blocks_[static_cast<std::size_t>(s * Tp + t)].noalias() +=
                    block.row(s).transpose() * block.row(t);
            }
        }
    }
}

Eigen::VectorXd BootstrapContext::bootstrap_residuals(const Eigen::VectorXd& multipliers) const {
    const auto& fit = *fit_;
    const auto Tp = static_cast<Eigen::Index>(fit.T_prime);
    Eigen::VectorXd eps(fit.residuals.size());
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(fit.n); ++i) {
        eps.segment(i * Tp, Tp) = multipliers(i) * fit.residuals.segment(i * Tp, Tp);
    }
    // Y* = W beta + eps*, and M_W annihilates W beta.
    return fit.residualize(eps);
}

double BootstrapContext::statistic(const Eigen::VectorXd& multipliers, StatKind kind) const {
    const auto& fit = *fit_;
    const auto r = static_cast<double>(fit.Ztilde.cols());
    const Eigen::VectorXd e = bootstrap_residuals(multipliers);
    const double norm = e.norm();
    if (norm == 0.0 || norm <= 1e-10 * fit.y_norm) return normalize_statistic(0.0, r);

    const Eigen::VectorXd v = fit.Ztilde.transpose() * e;
    double xi = 0.0;
    if (kind == StatKind::Homoskedastic) {
        const auto Tp = static_cast<Eigen::Index>(fit.T_prime);
        const Eigen::MatrixXd sigma = residual_covariance(e, fit.n, fit.T_prime);
        Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(fit.Ztilde.cols(), fit.Ztilde.cols());
        for (Eigen::Index s = 0; s < Tp; ++s) {
            for (Eigen::Index t = 0; t < Tp; ++t) {
                raw += sigma(s, t) * cross_blocks_[static_cast<std::size_t>(s * Tp + t)];
            }
        }
        xi = quadratic_form(v, make_omega(std::move(raw), kind));
    } else {
        xi = quadratic_form(v, omega(fit.Ztilde, e, fit.n, fit.T_prime, kind));
    }
    return normalize_statistic(xi, r);
}

double bootstrap_statistic(const RestrictedFit& fit, const MultiplierLaw& law, StatKind kind,
                           std::uint64_t seed, std::uint64_t rep_index) {
    const BootstrapContext ctx(fit);
    return ctx.statistic(draw_multipliers(law, fit.n, seed, rep_index), kind);
}

BootstrapDistribution run_bootstrap(const RestrictedFit& fit, const MultiplierLaw& law,
                                    StatKind kind, std::size_t B, std::uint64_t seed,
                                    unsigned threads) {
    if (B < 1) throw Error(ErrorKind::InvalidConfig, "bootstrap needs B >= 1");
    const BootstrapContext ctx(fit);
    std::vector<double> slots(B, std::numeric_limits<double>::quiet_NaN());
    parallel_for(B, threads, [&](std::size_t b) {
        try {
            slots[b] = ctx.statistic(draw_multipliers(law, fit.n, seed, b), kind);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularOmega) throw;
        }
    });

    BootstrapDistribution dist;
    dist.B = B;
    dist.seed = seed;
    dist.law = law;
    dist.kind = kind;
    for (double s : slots) {
        if (std::isfinite(s)) {
            dist.stats.push_back(s);
        } else {
            ++dist.failed;
        }
    }
    if (static_cast<double>(dist.failed) > kMaxFailureShare * static_cast<double>(B)) {
        throw Error(ErrorKind::BootstrapFailure,
                    std::to_string(dist.failed) + " of " + std::to_string(B) +
                        " bootstrap replicates had a singular inner matrix");
    }
    return dist;
}

double bootstrap_pvalue(double observed, const BootstrapDistribution& dist) {
    const auto exceed = std::count_if(dist.stats.begin(), dist.stats.end(),
                                      [observed](double s) { return s >= observed; });
    return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(dist.stats.size()) + 1.0);
}

double bootstrap_critical_value(const BootstrapDistribution& dist, double level) {
    if (dist.stats.empty()) throw Error(ErrorKind::BootstrapFailure, "empty bootstrap distribution");
    std::vector<double> sorted = dist.stats;
    std::sort(sorted.begin(), sorted.end());
    const double pos = std::ceil((static_cast<double>(sorted.size()) + 1.0) * (1.0 - level));
    const auto idx = std::clamp<std::size_t>(static_cast<std::size_t>(pos), 1, sorted.size()) - 1;
    return sorted[idx];
}

void write_bootstrap_csv(std::ostream& out, const BootstrapDistribution& dist) {
    const auto precision = out.precision(17);
    out << "t_star\n";
    for (double s : dist.stats) out << s << '\n';
    out.precision(precision);
}

}  // namespace sptest
