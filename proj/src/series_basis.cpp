#include "sptest/series_basis.hpp"

#include "sptest/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <utility>

namespace sptest {

std::string_view to_string(BasisFamily f) noexcept {
    return f == BasisFamily::Power ? "power" : "spline";
}

std::string_view to_string(VariableRole r) noexcept {
    switch (r) {
        case VariableRole::Parametric: return "parametric";
        case VariableRole::Nonparametric: return "nonparametric";
        case VariableRole::Dummy: return "dummy";
    }
    return "nonparametric";
}

BasisFamily parse_family(std::string_view s) {
    if (s == "power") return BasisFamily::Power;
    if (s == "spline") return BasisFamily::Spline;
    throw Error(ErrorKind::InvalidConfig, "unknown basis family: " + std::string(s));
}

VariableRole parse_role(std::string_view s) {
    if (s == "parametric" || s == "linear") return VariableRole::Parametric;
    if (s == "nonparametric") return VariableRole::Nonparametric;
    if (s == "dummy") return VariableRole::Dummy;
    throw Error(ErrorKind::InvalidConfig, "unknown variable role: " + std::string(s));
}

int implied_knot_count(int a_n, int spline_order) noexcept {
    return std::max(0, a_n - spline_order - 1);
}

std::vector<double> quantile_knots(std::span<const double> z, int count) {
    std::vector<double> sorted(z.begin(), z.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> knots;
    if (sorted.empty() || count <= 0) return knots;
    const double last = static_cast<double>(sorted.size() - 1);
    for (int j = 1; j <= count; ++j) {
        // Linear interpolation between order statistics (R type 7).
        const double h = last * static_cast<double>(j) / static_cast<double>(count + 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        knots.push_back(sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]));
    }
    return knots;
}

Eigen::MatrixXd build_univariate(std::span<const double> z, const UnivariateBasis& basis) {
    if (basis.a_n < 2) {
        throw Error(ErrorKind::DegreeTooSmall,
                    "a univariate expansion needs a_n >= 2 terms, got " + std::to_string(basis.a_n));
    }
    const auto rows = static_cast<Eigen::Index>(z.size());
    const int degree = basis.family == BasisFamily::Spline
                           ? std::min(basis.spline_order, basis.a_n - 1)
                           : basis.a_n - 1;
    const int knot_count =
        basis.family == BasisFamily::Spline ? implied_knot_count(basis.a_n, basis.spline_order) : 0;
    if (static_cast<int>(basis.knots.size()) != knot_count) {
        throw Error(ErrorKind::KnotOutOfRange,
                    "spline with a_n=" + std::to_string(basis.a_n) + " and order " +
                        std::to_string(basis.spline_order) + " needs " +
                        std::to_string(knot_count) + " knots, got " +
                        std::to_string(basis.knots.size()));
    }
    if (knot_count > 0) {
        const auto [zmin, zmax] = std::minmax_element(z.begin(), z.end());
        for (std::size_t j = 0; j < basis.knots.size(); ++j) {
            const double t = basis.knots[j];
            if (!(t > *zmin && t < *zmax)) {
                throw Error(ErrorKind::KnotOutOfRange,
                            "knot " + std::to_string(t) + " is not inside the data range");
            }
            if (j > 0 && !(t > basis.knots[j - 1])) {
                throw Error(ErrorKind::KnotOutOfRange, "knots must be strictly increasing");
            }
        }
    }

    Eigen::MatrixXd out(rows, degree + 1 + knot_count);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double x = z[static_cast<std::size_t>(r)];
        double power = 1.0;
        out(r, 0) = 1.0;
        for (int d = 1; d <= degree; ++d) {
            power *= x;
            out(r, d) = power;
        }
        for (int j = 0; j < knot_count; ++j) {
            const double excess = x - basis.knots[static_cast<std::size_t>(j)];
            double value = 0.0;
            if (excess > 0.0) {
                value = 1.0;
                for (int d = 0; d < basis.spline_order; ++d) value *= excess;
            }
            out(r, degree + 1 + j) = value;
        }
    }
    return out;
}

namespace {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct UnivariateBlock {
    Eigen::MatrixXd columns;  // non-constant terms only
    std::vector<std::string> labels;
};

UnivariateBlock expand_variable(const Eigen::VectorXd& level, const std::string& name,
                                const BasisSpec& spec, const VariableSpec& var) {
    const double lo = level.minCoeff();
    const double hi = level.maxCoeff();
    const double width = hi - lo;
    const Eigen::VectorXd scaled =
        width > 0.0 ? Eigen::VectorXd((level.array() - lo) / width) : Eigen::VectorXd::Zero(level.size());

    UnivariateBlock block;
    if (var.role != VariableRole::Nonparametric) {
        block.columns = var.role == VariableRole::Dummy ? level : scaled;
        block.labels.push_back(var.role == VariableRole::Dummy ? name : name + "^1");
        return block;
    }

    UnivariateBasis basis;
    basis.family = spec.family;
    basis.a_n = spec.terms_for(var);
    basis.spline_order = spec.spline_order;
    const int knot_count = spec.family == BasisFamily::Spline
                               ? implied_knot_count(basis.a_n, basis.spline_order)
                               : 0;
    std::vector<double> level_knots = var.knots;
    if (knot_count > 0) {
        if (level_knots.empty()) {
            level_knots = quantile_knots(std::span<const double>(level.data(), level.size()),
                                         knot_count);
        }
        for (double t : level_knots) basis.knots.push_back(width > 0.0 ? (t - lo) / width : 0.0);
    }
    const Eigen::MatrixXd full =
        build_univariate(std::span<const double>(scaled.data(), scaled.size()), basis);
    block.columns = full.rightCols(full.cols() - 1);
    const int degree = static_cast<int>(full.cols()) - 1 - knot_count;
    for (int d = 1; d <= degree; ++d) block.labels.push_back(name + "^" + std::to_string(d));
    for (int j = 0; j < knot_count; ++j) {
        block.labels.push_back("(" + name + "-" + format_number(level_knots[static_cast<std::size_t>(j)]) +
                               ")+^" + std::to_string(spec.spline_order));
    }
    return block;
}

void append_column(BasisColumns& out, const Eigen::VectorXd& col, std::string label) {
    const Eigen::Index c = out.level.cols();
    out.level.conservativeResize(col.size(), c + 1);
    out.level.col(c) = col;
    out.labels.push_back(std::move(label));
}

// Tensor products of the non-constant terms of `order` distinct variables.
void append_interactions(BasisColumns& out, const std::vector<UnivariateBlock>& blocks,
                         std::size_t order, std::size_t start, const Eigen::VectorXd& partial,
                         const std::string& label, std::size_t depth) {
    if (depth == order) {
        append_column(out, partial, label);
        return;
    }
    for (std::size_t v = start; v < blocks.size(); ++v) {
        const auto& b = blocks[v];
        for (Eigen::Index c = 0; c < b.columns.cols(); ++c) {
            const Eigen::VectorXd next =
                depth == 0 ? Eigen::VectorXd(b.columns.col(c))
                           : Eigen::VectorXd(partial.array() * b.columns.col(c).array());
            const std::string next_label =
                depth == 0 ? b.labels[static_cast<std::size_t>(c)]
                           : label + "*" + b.labels[static_cast<std::size_t>(c)];
            append_interactions(out, blocks, order, v + 1, next, next_label, depth + 1);
        }
    }
}

}  // namespace

BasisColumns build_basis_columns(const TransformedPanel& tp, const BasisSpec& spec) {
    if (spec.interaction_order < 1) {
        throw Error(ErrorKind::InvalidConfig, "interaction_order must be >= 1");
    }
    const auto rows = tp.X_level.rows();
    BasisColumns out;
    out.level.resize(rows, 0);
    append_column(out, Eigen::VectorXd::Ones(rows), "1");

    std::vector<UnivariateBlock> nonparametric;
    std::set<std::string> seen;
    for (const auto& var : spec.variables) {
        if (!seen.insert(var.name).second) {
            throw Error(ErrorKind::InvalidConfig, "variable listed twice: " + var.name);
        }
        const auto it = std::find(tp.x_names.begin(), tp.x_names.end(), var.name);
        if (it == tp.x_names.end()) {
            throw Error(ErrorKind::MissingColumn, "basis refers to unknown regressor: " + var.name);
        }
        const Eigen::VectorXd level = tp.X_level.col(it - tp.x_names.begin());
        auto block = expand_variable(level, var.name, spec, var);
        for (Eigen::Index c = 0; c < block.columns.cols(); ++c) {
            append_column(out, block.columns.col(c), block.labels[static_cast<std::size_t>(c)]);
        }
        if (var.role == VariableRole::Nonparametric) nonparametric.push_back(std::move(block));
    }
    for (int order = 2; order <= spec.interaction_order; ++order) {
        append_interactions(out, nonparametric, static_cast<std::size_t>(order), 0,
                            Eigen::VectorXd(), "", 0);
    }
    return out;
}

namespace {

bool annihilated(const Eigen::VectorXd& transformed, const Eigen::VectorXd& level) {
    const double level_norm = level.norm();
    return level_norm == 0.0 || transformed.norm() <= 1e-10 * level_norm;
}

}  // namespace

DesignSplit build_null_and_test_designs(const TransformedPanel& tp, const BasisSpec& spec_null,
                                        const BasisSpec& spec_alt) {
    const BasisColumns null_cols = build_basis_columns(tp, spec_null);
    const BasisColumns alt_cols = build_basis_columns(tp, spec_alt);
    const Eigen::MatrixXd null_t = tp.transform(null_cols.level);
    const Eigen::MatrixXd alt_t = tp.transform(alt_cols.level);

    const std::set<std::string> alt_labels(alt_cols.labels.begin(), alt_cols.labels.end());
    const std::set<std::string> null_labels(null_cols.labels.begin(), null_cols.labels.end());

    // Null columns without a label match must lie in the alternative span.
    std::vector<Eigen::Index> unmatched;
    for (std::size_t c = 0; c < null_cols.labels.size(); ++c) {
        if (!alt_labels.count(null_cols.labels[c])) unmatched.push_back(static_cast<Eigen::Index>(c));
    }
    if (!unmatched.empty()) {
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(alt_t);
        for (Eigen::Index c : unmatched) {
            const Eigen::VectorXd col = null_t.col(c);
            const double norm = col.norm();
            if (norm == 0.0) continue;
            const Eigen::VectorXd resid = col - alt_t * qr.solve(col);
            if (resid.norm() > 1e-7 * norm) {
                throw Error(ErrorKind::NestednessViolation,
                            "null column '" + null_cols.labels[static_cast<std::size_t>(c)] +
                                "' is not in the span of the alternative expansion");
            }
        }
    }

    DesignSplit ds;
    std::vector<Eigen::Index> keep_w;
    std::vector<Eigen::Index> keep_z;
    for (std::size_t c = 0; c < null_cols.labels.size(); ++c) {
        const auto idx = static_cast<Eigen::Index>(c);
        if (annihilated(null_t.col(idx), null_cols.level.col(idx))) {
            ds.dropped.push_back({null_cols.labels[c], "null column annihilated by the transform"});
        } else {
            keep_w.push_back(idx);
            ds.w_labels.push_back(null_cols.labels[c]);
        }
    }
    for (std::size_t c = 0; c < alt_cols.labels.size(); ++c) {
        if (null_labels.count(alt_cols.labels[c])) continue;
        const auto idx = static_cast<Eigen::Index>(c);
        if (annihilated(alt_t.col(idx), alt_cols.level.col(idx))) {
            ds.dropped.push_back({alt_cols.labels[c], "test column annihilated by the transform"});
        } else {
            keep_z.push_back(idx);
            ds.z_labels.push_back(alt_cols.labels[c]);
        }
    }
    ds.W = null_t(Eigen::all, keep_w);
    ds.Z = alt_t(Eigen::all, keep_z);
    if (ds.Z.cols() == 0) {
        throw Error(ErrorKind::EmptyTestSet,
                    "the alternative adds no test direction beyond the null model");
    }
    return ds;
}

DesignSplit orthonormalize(const DesignSplit& ds) {
    const Eigen::Index rows = ds.W.rows();
    const double scale = std::sqrt(static_cast<double>(rows));
    Eigen::MatrixXd basis(rows, ds.W.cols() + ds.Z.cols());
    Eigen::Index accepted = 0;

    DesignSplit out;
    out.dropped = ds.dropped;

    auto process = [&](const Eigen::MatrixXd& cols, const std::vector<std::string>& labels,
                       std::vector<std::string>& kept_labels, const char* side) {
        Eigen::Index first = accepted;
        for (Eigen::Index c = 0; c < cols.cols(); ++c) {
            Eigen::VectorXd v = cols.col(c);
            const double original = v.norm();
            // Two passes of modified Gram-Schmidt.
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index j = 0; j < accepted; ++j) {
                    v -= (basis.col(j).dot(v) / (scale * scale)) * basis.col(j);
                }
            }
            const double remaining = v.norm();
            if (original == 0.0 || remaining <= kRankTolerance * original) {
                out.dropped.push_back({labels[static_cast<std::size_t>(c)],
                                       std::string(side) + " column linearly dependent"});
                continue;
            }
            basis.col(accepted++) = v * (scale / remaining);
            kept_labels.push_back(labels[static_cast<std::size_t>(c)]);
        }
        return std::pair{first, accepted - first};
    };

    const auto [w_start, w_count] = process(ds.W, ds.w_labels, out.w_labels, "null");
    const auto [z_start, z_count] = process(ds.Z, ds.z_labels, out.z_labels, "test");
    out.W = basis.middleCols(w_start, w_count);
    out.Z = basis.middleCols(z_start, z_count);
    out.orthonormal = true;
    if (out.Z.cols() == 0) {
        throw Error(ErrorKind::EmptyTestSet, "every test direction is collinear with the null design");
    }
    return out;
}

}  // namespace sptest
