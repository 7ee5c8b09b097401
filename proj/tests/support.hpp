#pragma once

#include "sptest/panel.hpp"
#include "sptest/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

namespace sptest::testkit {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    CounterStream s(seed, {17});
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = s.normal();
    }
    return m;
}

inline Eigen::VectorXd random_vector(Eigen::Index rows, std::uint64_t seed) {
    return random_matrix(rows, 1, seed).col(0);
}

/// y = 1.5 x1 + sin(3 x2) + fixed effect + noise, x uniform on [0, 2].
inline PanelDataset random_panel(std::size_t n, std::size_t T, std::uint64_t seed) {
    CounterStream s(seed, {3});
    Eigen::MatrixXd X(n * T, 2);
    Eigen::VectorXd y(n * T);
    for (std::size_t i = 0; i < n; ++i) {
        const double fe = s.normal();
        for (std::size_t t = 0; t < T; ++t) {
            const auto r = static_cast<Eigen::Index>(i * T + t);
            X(r, 0) = 2.0 * s.uniform();
            X(r, 1) = 2.0 * s.uniform() + 0.3 * fe;
            y(r) = 1.5 * X(r, 0) + std::sin(3.0 * X(r, 1)) + fe + 0.5 * s.normal();
        }
    }
    return make_panel(n, T, y, X, {"x1", "x2"});
}

inline std::filesystem::path psid_path() { return std::filesystem::path(SPTEST_DATA_DIR) / "psid_wages.csv"; }

}  // namespace sptest::testkit
