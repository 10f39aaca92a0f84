#include "jdpp/errors.hpp"
#include "jdpp/opalg.hpp"

#include <cmath>

namespace jdpp {

IiksSolution iiks_solve(const OperatorMatrix& L, const AFunction& a) {
    const Grid& grid = L.grid();
    const Index n = L.size(), np = grid.n_plus(), nm = grid.n_minus();
    const Eigen::VectorXd sw = sqrt_weights(grid);
    const Eigen::MatrixXd& m = L.entries();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

    Eigen::MatrixXd rhs(n, 2);
    for (Index i = 0; i < n; ++i) {
        const double x = grid.node(i);
        rhs(i, 0) = sw(i) * a.plus(x);
        rhs(i, 1) = sw(i) * a.minus(x);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(id + m);
    Eigen::PartialPivLU<Eigen::MatrixXd> lut(id + m.transpose());
    if (!(lu.rcond() * kSingularCondition >= 1.0) || !(lut.rcond() * kSingularCondition >= 1.0))
        throw SingularError("iiks_solve: 1 + L is numerically singular");
    const Eigen::MatrixXd f = lu.solve(rhs);     // F1, F2 (weighted)
    Eigen::MatrixXd rhs_g(n, 2);
    rhs_g.col(0) = rhs.col(1);
    rhs_g.col(1) = rhs.col(0);
    const Eigen::MatrixXd gsol = lut.solve(rhs_g);  // G1, G2 (weighted)

    IiksSolution s;
    s.F1 = f.col(0).cwiseQuotient(sw);
    s.F2 = f.col(1).cwiseQuotient(sw);
    s.G1 = gsol.col(0).cwiseQuotient(sw);
    s.G2 = gsol.col(1).cwiseQuotient(sw);

    // Half-line relations on the weighted vectors, V = M_{+-}.
    const Eigen::MatrixXd V = m.topRightCorner(np, nm);
    auto plus = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(v.head(np)); };
    auto minus = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(v.tail(nm)); };
    const Eigen::VectorXd f1 = f.col(0), f2 = f.col(1), g1 = gsol.col(0), g2 = gsol.col(1);
    const Eigen::VectorXd ap = plus(rhs.col(0)), am = minus(rhs.col(1));
    auto nrm = [](const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };
    s.sep_rel = {
        nrm(minus(f1) - V.transpose() * plus(f1)),
        nrm(plus(f1) + V * minus(f1) - ap),
        nrm(minus(f2) - V.transpose() * plus(f2) - am),
        nrm(plus(f2) + V * minus(f2)),
        nrm(minus(g1) + V.transpose() * plus(g1) - am),
        nrm(plus(g1) - V * minus(g1)),
        nrm(minus(g2) + V.transpose() * plus(g2)),
        nrm(plus(g2) - V * minus(g2) - ap),
    };

    const Eigen::MatrixXd K = lu.solve(m);
    for (Index i = 0; i < n; ++i) {
        const double w = grid.weight(i);
        s.eq0_residual = std::max(s.eq0_residual, std::abs(w * (s.F1(i) * s.G1(i) + s.F2(i) * s.G2(i))));
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double rec = (s.F1(i) * s.G1(j) + s.F2(i) * s.G2(j)) / (grid.node(i) - grid.node(j));
            s.offdiag_residual = std::max(s.offdiag_residual, std::abs(std::sqrt(w * grid.weight(j)) * rec - K(i, j)));
        }
    }

    // Diagonal by l'Hopital: F extended off the grid by F(x) = A(x) - sum_j L(x, x_j) w_j F_j.
    const KernelFn lk = l_kernel(a);
    std::vector<Features> fn(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) fn[std::size_t(j)] = lk.features(grid.node(j));
    auto extend = [&](double x, Index col) {
        const Features fx = lk.features(x);
        double v = col == 0 ? a.plus(x) : a.minus(x);
        const Eigen::VectorXd& F = col == 0 ? s.F1 : s.F2;
        for (Index j = 0; j < n; ++j) {
            const double xj = grid.node(j);
            if ((x > 0.0) == (xj > 0.0)) continue;
            v -= lk.pair(x, fx, xj, fn[std::size_t(j)]) * grid.weight(j) * F(j);
        }
        return v;
    };
    for (Index i = 0; i < n; ++i) {
        const double x = grid.node(i);
        const double h = std::min(diagonal_step(x), 0.25 * std::abs(x));
        const double d1 = (extend(x + h, 0) - extend(x - h, 0)) / (2 * h);
        const double d2 = (extend(x + h, 1) - extend(x - h, 1)) / (2 * h);
        const double kii = d1 * s.G1(i) + d2 * s.G2(i);
        s.diag_residual = std::max(s.diag_residual, std::abs(grid.weight(i) * kii - K(i, i)));
    }
    return s;
}

}  // namespace jdpp
