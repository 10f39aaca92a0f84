#pragma once

#include "jdpp/grid.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>

namespace jdpp {

enum class Block { pp, pm, mp, mm };

// Weighted Nystrom matrix M_ij = sqrt(w_i w_j) K(x_i, x_j) on a shared grid.
class OperatorMatrix {
public:
    OperatorMatrix() = default;
    OperatorMatrix(std::shared_ptr<const Grid> grid, Eigen::MatrixXd entries);

    const Eigen::MatrixXd& entries() const { return m_; }
    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
    Index size() const { return m_.rows(); }

    Eigen::MatrixXd block(Block b) const;
    // Unweighted kernel value K(x_i, x_j).
    double kernel_value(Index i, Index j) const;
    OperatorMatrix with_entries(Eigen::MatrixXd entries) const;

    // max(|M++ - M++^T|, |M-- - M--^T|, |M+- + M-+^T|).
    double symmetry_residual() const;
    std::uint64_t fingerprint() const;

private:
    std::shared_ptr<const Grid> grid_;
    Eigen::MatrixXd m_;
};

// sqrt(w_i) on the nodes.
Eigen::VectorXd sqrt_weights(const Grid& grid);

}  // namespace jdpp
