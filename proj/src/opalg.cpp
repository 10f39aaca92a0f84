#include "jdpp/opalg.hpp"

#include "jdpp/errors.hpp"
#include "jdpp/parallel.hpp"

#include <Eigen/SVD>

#include <omp.h>

#include <cmath>
#include <set>
#include <sstream>

namespace jdpp {

namespace {

int g_threads = 0;

Eigen::MatrixXd fill(const KernelFn& k, const Grid& grid, bool parallel) {
    const Index n = Index(grid.size());
    std::vector<Features> f(static_cast<std::size_t>(n));
    Eigen::MatrixXd m(n, n);
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (Index i = 0; i < n; ++i) slot.run([&] { f[std::size_t(i)] = k.features(grid.node(i)); });
    slot.rethrow();
#pragma omp parallel for schedule(static) if (parallel)
    for (Index j = 0; j < n; ++j) {
        slot.run([&] {
            const double xj = grid.node(j), wj = grid.weight(j);
            const Features& fj = f[std::size_t(j)];
            for (Index i = 0; i < n; ++i) {
                const double xi = grid.node(i);
                const double v = i == j ? k.diag(xi, fj) : k.pair(xi, f[std::size_t(i)], xj, fj);
                m(i, j) = std::sqrt(grid.weight(i) * wj) * v;
            }
        });
    }
    slot.rethrow();
    return m;
}

Eigen::PartialPivLU<Eigen::MatrixXd> checked_lu(const Eigen::MatrixXd& a, const char* what, SolveInfo* info) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rc = lu.rcond();
    const double cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (info) info->condition = cond;
    if (!(cond <= kSingularCondition)) {
        std::ostringstream os;
        os << what << ": matrix is numerically singular (condition " << cond << ")";
        throw SingularError(os.str());
    }
    return lu;
}

}  // namespace

void set_thread_count(int n) {
    g_threads = n;
    if (n > 0) omp_set_num_threads(n);
}

int thread_count() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

OperatorMatrix discretize(const KernelFn& k, std::shared_ptr<const Grid> grid) {
    Eigen::MatrixXd m = fill(k, *grid, true);
    return OperatorMatrix(std::move(grid), std::move(m));
}

OperatorMatrix discretize_serial(const KernelFn& k, std::shared_ptr<const Grid> grid) {
    Eigen::MatrixXd m = fill(k, *grid, false);
    return OperatorMatrix(std::move(grid), std::move(m));
}

OperatorMatrix invert_operator(const OperatorMatrix& M) {
    std::vector<Index> perm;
    auto grid = std::make_shared<const Grid>(M.grid().inverted(&perm));
    const Index n = M.size();
    Eigen::MatrixXd m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = M.entries()(perm[std::size_t(i)], perm[std::size_t(j)]);
    return OperatorMatrix(std::move(grid), std::move(m));
}

OperatorMatrix k_from_l(const OperatorMatrix& L, SolveInfo* info) {
    const Index n = L.size();
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) + L.entries();
    auto lu = checked_lu(a, "k_from_l", info);
    // (1 + L)^{-1} L = L (1 + L)^{-1}
    return L.with_entries(lu.solve(L.entries()));
}

OperatorMatrix hat_k(const OperatorMatrix& K) {
    Eigen::MatrixXd m = K.entries();
    const Index p = K.grid().n_plus();
    m.bottomRows(m.rows() - p) *= -1.0;
    for (Index i = p; i < m.rows(); ++i) m(i, i) += 1.0;
    return K.with_entries(std::move(m));
}

double projection_defect(const OperatorMatrix& khat) {
    const Eigen::MatrixXd& m = khat.entries();
    return (m * m - m).norm();
}

OperatorMatrix compress(const OperatorMatrix& M, const std::vector<Index>& subset) {
    Eigen::VectorXd mask = Eigen::VectorXd::Zero(M.size());
    for (Index i : subset) {
        if (i < 0 || i >= M.size()) throw SizeError("compress: subset index out of range");
        mask(i) = 1.0;
    }
    return M.with_entries(mask.asDiagonal() * M.entries() * mask.asDiagonal());
}

std::vector<Index> nodes_with_abs_at_least(const Grid& grid, double delta) {
    std::vector<Index> out;
    for (Index i = 0; i < Index(grid.size()); ++i)
        if (std::abs(grid.node(i)) >= delta) out.push_back(i);
    return out;
}

double l12_norm(const OperatorMatrix& M) {
    auto trace_norm = [](const Eigen::MatrixXd& b) {
        if (b.size() == 0) return 0.0;
        Eigen::BDCSVD<Eigen::MatrixXd> svd(b);
        return svd.singularValues().sum();
    };
    return trace_norm(M.block(Block::pp)) + trace_norm(M.block(Block::mm)) + M.block(Block::pm).norm() +
           M.block(Block::mp).norm();
}

LogDet log_fredholm_det(const OperatorMatrix& M) {
    const Index n = M.size();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(n, n) + M.entries());
    const Eigen::MatrixXd& u = lu.matrixLU();
    LogDet out;
    out.sign = lu.permutationP().determinant();
    for (Index i = 0; i < n; ++i) {
        const double d = u(i, i);
        if (d == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};
        if (d < 0.0) out.sign = -out.sign;
        out.log_abs += std::log(std::abs(d));
    }
    return out;
}

double fredholm_det(const OperatorMatrix& M) {
    const LogDet ld = log_fredholm_det(M);
    return ld.sign == 0.0 ? 0.0 : ld.sign * std::exp(ld.log_abs);
}

Eigen::VectorXd node_values(const Grid& grid, const std::function<double(double)>& f) {
    Eigen::VectorXd v(Index(grid.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = f(grid.node(i));
    return v;
}

OperatorMatrix scale(const Eigen::VectorXd& f, const OperatorMatrix& M, const Eigen::VectorXd& g) {
    return M.with_entries(f.asDiagonal() * M.entries() * g.asDiagonal());
}

OperatorMatrix k_conjugated(const OperatorMatrix& K, const Eigen::VectorXd& g, SolveInfo* info) {
    const Index n = K.size();
    const Eigen::VectorXd g2m1 = g.array().square() - 1.0;
    const Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n) + g2m1.asDiagonal() * K.entries();
    auto lu = checked_lu(x.transpose(), "k_conjugated", info);
    // K X^{-1} = (X^{-T} K^T)^T
    const Eigen::MatrixXd kx = lu.solve(K.entries().transpose()).transpose();
    return K.with_entries(g.asDiagonal() * kx * g.asDiagonal());
}

PalmResult palm_update(const OperatorMatrix& K, Index q) {
    if (q < 0 || q >= K.size()) throw SizeError("palm_update: node index out of range");
    PalmResult out{K, {}};
    const double mqq = K.entries()(q, q);
    if (mqq / K.grid().weight(q) < kDegenerateDiagonal) {
        out.skipped.push_back(q);
        return out;
    }
    const Eigen::VectorXd col = K.entries().col(q);
    const Eigen::RowVectorXd row = K.entries().row(q);
    Eigen::MatrixXd m = K.entries() - col * row / mqq;
    m.row(q).setZero();
    m.col(q).setZero();
    out.kernel = K.with_entries(std::move(m));
    return out;
}

PalmResult palm_iterate(const OperatorMatrix& K, const std::vector<Index>& nodes) {
    PalmResult out{K, {}};
    for (Index q : nodes) {
        PalmResult step = palm_update(out.kernel, q);
        out.kernel = std::move(step.kernel);
        out.skipped.insert(out.skipped.end(), step.skipped.begin(), step.skipped.end());
    }
    return out;
}

std::vector<Index> snap_anchor(const Grid& grid, const PalmAnchor& anchor) {
    std::vector<Index> idx;
    for (double p : anchor.p_plus) idx.push_back(grid.nearest(p));
    for (double p : anchor.p_minus) idx.push_back(grid.nearest(p));
    std::set<Index> uniq(idx.begin(), idx.end());
    if (uniq.size() != idx.size()) throw DomainError("snap_anchor: two anchor points snap to the same node");
    return idx;
}

PalmAnchor snapped_anchor(const Grid& grid, const PalmAnchor& anchor) {
    const std::vector<Index> idx = snap_anchor(grid, anchor);
    PalmAnchor out;
    for (std::size_t i = 0; i < anchor.n(); ++i) {
        out.p_plus.push_back(grid.node(idx[i]));
        out.p_minus.push_back(grid.node(idx[anchor.n() + i]));
    }
    return out;
}

PalmResult palm_iterate(const OperatorMatrix& K, const PalmAnchor& anchor) {
    return palm_iterate(K, snap_anchor(K.grid(), anchor));
}

PalmIdentityReport verify_palm_identity(const OperatorMatrix& L, const PalmAnchor& anchor) {
    PalmIdentityReport rep;
    const Grid& grid = L.grid();
    rep.anchor_nodes = snap_anchor(grid, anchor);
    const PalmAnchor snapped = snapped_anchor(grid, anchor);
    for (std::size_t i = 0; i < anchor.n(); ++i) {
        rep.snap_distance = std::max(rep.snap_distance, std::abs(snapped.p_plus[i] - anchor.p_plus[i]));
        rep.snap_distance = std::max(rep.snap_distance, std::abs(snapped.p_minus[i] - anchor.p_minus[i]));
    }
    const OperatorMatrix K = k_from_l(L);
    const PalmResult palm = palm_iterate(K, rep.anchor_nodes);
    rep.skipped = palm.skipped;
    const Eigen::VectorXd g = node_values(grid, conditioning_functions(snapped).g);
    const OperatorMatrix kg = k_from_l(scale(g, L, g));
    const OperatorMatrix kc = k_conjugated(K, g);
    std::vector<bool> anchored(grid.size(), false);
    for (Index q : rep.anchor_nodes) anchored[std::size_t(q)] = true;
    for (Index i = 0; i < K.size(); ++i) {
        if (anchored[std::size_t(i)]) continue;
        for (Index j = 0; j < K.size(); ++j) {
            if (anchored[std::size_t(j)]) continue;
            const double p = palm.kernel.entries()(i, j);
            rep.residual = std::max(rep.residual, std::abs(p - kg.entries()(i, j)));
            rep.residual_conjugated = std::max(rep.residual_conjugated, std::abs(p - kc.entries()(i, j)));
        }
    }
    return rep;
}

}  // namespace jdpp
