#pragma once

#include "jdpp/kernels.hpp"
#include "jdpp/operator_matrix.hpp"

#include <array>
#include <functional>
#include <vector>

namespace jdpp {

struct SolveInfo {
    double condition = 0.0;  // estimate of cond_1(1 + L)
};

constexpr double kSingularCondition = 1e12;
constexpr double kDegenerateDiagonal = 1e-12;

OperatorMatrix discretize(const KernelFn& k, std::shared_ptr<const Grid> grid);
// Reference implementation without OpenMP, kept for equivalence tests and benchmarks.
OperatorMatrix discretize_serial(const KernelFn& k, std::shared_ptr<const Grid> grid);

// Discretized inversion x -> 1/x. Entries are unchanged up to reordering.
OperatorMatrix invert_operator(const OperatorMatrix& M);

OperatorMatrix k_from_l(const OperatorMatrix& L, SolveInfo* info = nullptr);
OperatorMatrix hat_k(const OperatorMatrix& K);
// ||Khat^2 - Khat||_F
double projection_defect(const OperatorMatrix& khat);

OperatorMatrix compress(const OperatorMatrix& M, const std::vector<Index>& subset);
std::vector<Index> nodes_with_abs_at_least(const Grid& grid, double delta);

double l12_norm(const OperatorMatrix& M);

double fredholm_det(const OperatorMatrix& M);
struct LogDet {
    double sign = 0.0;
    double log_abs = 0.0;
};
LogDet log_fredholm_det(const OperatorMatrix& M);

Eigen::VectorXd node_values(const Grid& grid, const std::function<double(double)>& f);
// diag(f) M diag(g) on the weighted matrix.
OperatorMatrix scale(const Eigen::VectorXd& f, const OperatorMatrix& M, const Eigen::VectorXd& g);

OperatorMatrix k_conjugated(const OperatorMatrix& K, const Eigen::VectorXd& g, SolveInfo* info = nullptr);

struct PalmResult {
    OperatorMatrix kernel;
    std::vector<Index> skipped;  // conditioning nodes with K(q,q) < 1e-12
};

PalmResult palm_update(const OperatorMatrix& K, Index q);
PalmResult palm_iterate(const OperatorMatrix& K, const std::vector<Index>& nodes);
// Anchor points are snapped to the nearest node on their half-line.
std::vector<Index> snap_anchor(const Grid& grid, const PalmAnchor& anchor);
PalmAnchor snapped_anchor(const Grid& grid, const PalmAnchor& anchor);
PalmResult palm_iterate(const OperatorMatrix& K, const PalmAnchor& anchor);

struct PalmIdentityReport {
    std::vector<Index> anchor_nodes;
    double snap_distance = 0.0;
    double residual = 0.0;              // vs k_from_l(g L g)
    double residual_conjugated = 0.0;   // vs k_conjugated(K_L, g)
    std::vector<Index> skipped;
};

PalmIdentityReport verify_palm_identity(const OperatorMatrix& L, const PalmAnchor& anchor);

struct IiksSolution {
    // Unweighted node values.
    Eigen::VectorXd F1, F2, G1, G2;
    double eq0_residual = 0.0;
    std::array<double, 8> sep_rel{};
    double offdiag_residual = 0.0;
    double diag_residual = 0.0;
};

IiksSolution iiks_solve(const OperatorMatrix& L, const AFunction& a);

}  // namespace jdpp
