#include "sptest/panel.hpp"

#include "sptest/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

namespace sptest {

std::size_t PanelDataset::column(std::string_view name) const {
    const auto it = std::find(x_names.begin(), x_names.end(), name);
    if (it == x_names.end()) {
        throw Error(ErrorKind::MissingColumn, "unknown regressor: " + std::string(name));
    }
    return static_cast<std::size_t>(it - x_names.begin());
}

void PanelDataset::validate() const {
    if (n < 2) throw Error(ErrorKind::InvalidPanel, "panel needs at least 2 individuals");
    if (T < 2) throw Error(ErrorKind::InvalidPanel, "panel needs at least 2 periods");
    if (X.cols() < 1) throw Error(ErrorKind::InvalidPanel, "panel needs at least one regressor");
    const auto N = static_cast<Eigen::Index>(n * T);
    if (y.size() != N || X.rows() != N) {
        throw Error(ErrorKind::InvalidPanel, "outcome/regressor rows do not equal n*T");
    }
    if (x_names.size() != static_cast<std::size_t>(X.cols())) {
        throw Error(ErrorKind::InvalidPanel, "regressor names do not match columns");
    }
    if (!y.allFinite() || !X.allFinite()) {
        throw Error(ErrorKind::MissingValue, "panel contains non-finite values");
    }
}

PanelDataset make_panel(std::size_t n, std::size_t T, Eigen::VectorXd y, Eigen::MatrixXd X,
                        std::vector<std::string> x_names, std::string y_name) {
    PanelDataset p;
    p.n = n;
    p.T = T;
    p.ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) p.ids.push_back(std::to_string(i + 1));
    for (std::size_t t = 0; t < T; ++t) p.times.push_back(std::to_string(t + 1));
    p.y = std::move(y);
    p.X = std::move(X);
    p.x_names = std::move(x_names);
    p.y_name = std::move(y_name);
    p.validate();
    return p;
}

namespace {

std::size_t require_column(const CsvTable& table, std::string_view name) {
    const auto idx = table.column_index(name);
    if (!idx) {
        throw Error(ErrorKind::MissingColumn, "column not found: " + std::string(name));
    }
    return *idx;
}

double numeric_cell(const std::string& cell, std::string_view column, std::size_t row) {
    const std::string where =
        " in column '" + std::string(column) + "' at data row " + std::to_string(row + 1);
    const auto v = parse_number(cell);
    if (!v) {
        static const std::vector<std::string> missing_tokens = {"", "NA", "na", "NaN", "nan",
                                                                ".", "null", "NULL"};
        if (std::find(missing_tokens.begin(), missing_tokens.end(), cell) !=
            missing_tokens.end()) {
            throw Error(ErrorKind::MissingValue, "missing value" + where);
        }
        throw Error(ErrorKind::ParseError, "non-numeric value '" + cell + "'" + where);
    }
    if (!std::isfinite(*v)) throw Error(ErrorKind::MissingValue, "missing value" + where);
    return *v;
}

}  // namespace

PanelDataset load_panel(const CsvTable& table, std::string_view id_col, std::string_view time_col,
                        std::string_view y_col, const std::vector<std::string>& x_cols) {
    const std::size_t id_idx = require_column(table, id_col);
    const std::size_t time_idx = require_column(table, time_col);
    const std::size_t y_idx = require_column(table, y_col);
    std::vector<std::size_t> x_idx;
    for (const auto& c : x_cols) x_idx.push_back(require_column(table, c));
    if (x_idx.empty()) throw Error(ErrorKind::InvalidPanel, "no regressor columns selected");

    PanelDataset p;
    p.y_name = std::string(y_col);
    p.x_names = x_cols;

    // Individuals keep first-appearance order; periods are sorted below.
    std::map<std::string, std::size_t> id_pos;
    std::map<std::string, bool> time_seen;
    for (const auto& row : table.rows) {
        if (row[id_idx].empty()) throw Error(ErrorKind::MissingValue, "empty id cell");
        if (row[time_idx].empty()) throw Error(ErrorKind::MissingValue, "empty time cell");
        if (id_pos.emplace(row[id_idx], p.ids.size()).second) p.ids.push_back(row[id_idx]);
        time_seen[row[time_idx]] = true;
    }
    for (const auto& [label, _] : time_seen) p.times.push_back(label);

    const bool numeric_time = std::all_of(p.times.begin(), p.times.end(), [](const auto& s) {
        return parse_number(s).has_value();
    });
    if (numeric_time) {
        std::stable_sort(p.times.begin(), p.times.end(), [](const auto& a, const auto& b) {
            return *parse_number(a) < *parse_number(b);
        });
    } else {
        p.warnings.push_back("time labels are not numeric; ordering them lexicographically");
    }
    std::map<std::string, std::size_t> time_pos;
    for (std::size_t t = 0; t < p.times.size(); ++t) time_pos[p.times[t]] = t;

    p.n = p.ids.size();
    p.T = p.times.size();

    std::vector<std::size_t> counts(p.n, 0);
    for (const auto& row : table.rows) ++counts[id_pos.at(row[id_idx])];
    for (std::size_t i = 0; i < p.n; ++i) {
        if (counts[i] != p.T) {
            throw Error(ErrorKind::UnbalancedPanel,
                        "individual '" + p.ids[i] + "' has " + std::to_string(counts[i]) +
                            " observations, expected " + std::to_string(p.T));
        }
    }

    const auto N = static_cast<Eigen::Index>(p.n * p.T);
    p.y.resize(N);
    p.X.resize(N, static_cast<Eigen::Index>(x_idx.size()));
    std::vector<bool> filled(static_cast<std::size_t>(N), false);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t i = id_pos.at(row[id_idx]);
        const std::size_t t = time_pos.at(row[time_idx]);
        const std::size_t dest = i * p.T + t;
        if (filled[dest]) {
            throw Error(ErrorKind::DuplicateCell, "duplicate observation for id '" + row[id_idx] +
                                                      "' at time '" + row[time_idx] + "'");
        }
        filled[dest] = true;
        const auto d = static_cast<Eigen::Index>(dest);
        p.y(d) = numeric_cell(row[y_idx], y_col, r);
        for (std::size_t k = 0; k < x_idx.size(); ++k) {
            p.X(d, static_cast<Eigen::Index>(k)) = numeric_cell(row[x_idx[k]], x_cols[k], r);
        }
    }
    p.validate();
    return p;
}

std::string_view to_string(Transform t) noexcept {
    return t == Transform::Within ? "within" : "fd";
}

Transform parse_transform(std::string_view s) {
    if (s == "within") return Transform::Within;
    if (s == "fd" || s == "first_difference") return Transform::FirstDifference;
    throw Error(ErrorKind::InvalidConfig, "unknown transform: " + std::string(s));
}

std::size_t transformed_periods(Transform t, std::size_t T) noexcept {
    return t == Transform::Within ? T : T - 1;
}

Eigen::MatrixXd apply_transform(Transform t, std::size_t n, std::size_t T,
                                const Eigen::MatrixXd& level) {
    const auto Ti = static_cast<Eigen::Index>(T);
    const auto Tp = static_cast<Eigen::Index>(transformed_periods(t, T));
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n) * Tp, level.cols());
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
        const auto block = level.middleRows(i * Ti, Ti);
        if (t == Transform::Within) {
            const Eigen::RowVectorXd mean = block.colwise().mean();
            out.middleRows(i * Tp, Tp) = block.rowwise() - mean;
        } else {
            out.middleRows(i * Tp, Tp) = block.bottomRows(Tp) - block.topRows(Tp);
        }
    }
    return out;
}

TransformedPanel transform_panel(const PanelDataset& p, Transform t) {
    p.validate();
    TransformedPanel tp;
    tp.tag = t;
    tp.n = p.n;
    tp.T = p.T;
    tp.T_prime = transformed_periods(t, p.T);
    tp.y = apply_transform(t, p.n, p.T, p.y);
    tp.X = apply_transform(t, p.n, p.T, p.X);
    tp.X_level = p.X;
    tp.y_level = p.y;
    tp.x_names = p.x_names;
    return tp;
}

TransformedPanel within_transform(const PanelDataset& p) {
    return transform_panel(p, Transform::Within);
}

TransformedPanel first_difference(const PanelDataset& p) {
    return transform_panel(p, Transform::FirstDifference);
}

}  // namespace sptest
