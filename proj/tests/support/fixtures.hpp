#pragma once

#include "jdpp/kernels.hpp"
#include "jdpp/opalg.hpp"

#include <algorithm>
#include <memory>
#include <random>

namespace jdpp::testing {

inline std::shared_ptr<const Grid> two_point_grid() {
    return std::make_shared<const Grid>(Grid::from_nodes({1.0, -1.0}, {1.0, 1.0}));
}

// L = [[0, v], [-v, 0]] on {+1, -1}
inline OperatorMatrix two_point_l(double v = 1.0) {
    Eigen::MatrixXd l(2, 2);
    l << 0.0, v, -v, 0.0;
    return OperatorMatrix(two_point_grid(), l);
}

inline std::shared_ptr<const Grid> panel_grid(int nodes_per_side, double delta = 0.05, double outer = 30.0) {
    GridSpec s;
    s.nodes_per_side = nodes_per_side;
    s.delta = delta;
    s.outer = outer;
    s.panels = std::max(1, nodes_per_side / 10);
    return std::make_shared<const Grid>(build_grid(s));
}

inline KernelParams real_params() { return KernelParams::make({0.2, 0.0}, {0.1, 0.0}); }
inline KernelParams conjugate_params() { return KernelParams::make({0.3, 0.4}, {0.3, -0.4}); }
// Conjugate pair with a dense L-process.
inline KernelParams dense_params() { return KernelParams::make({0.3, 1.0}, {0.3, -1.0}); }

inline OperatorMatrix whittaker_l(const KernelParams& p, int nodes_per_side, double delta = 0.05,
                                  double outer = 30.0) {
    return discretize(l_kernel(whittaker_a(p)), panel_grid(nodes_per_side, delta, outer));
}

// Random block matrix on a synthetic grid.
inline OperatorMatrix random_block(std::mt19937_64& rng, int n_plus, int n_minus, double scale = 1.0) {
    auto grid = std::make_shared<const Grid>(Grid::synthetic(n_plus, n_minus));
    std::normal_distribution<double> nd(0.0, scale);
    const Index n = n_plus + n_minus;
    Eigen::MatrixXd m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = nd(rng);
    return OperatorMatrix(grid, m);
}

}  // namespace jdpp::testing
