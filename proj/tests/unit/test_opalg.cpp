#include "jdpp/errors.hpp"
#include "jdpp/opalg.hpp"
#include "jdpp/parallel.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace jdpp;
using namespace jdpp::testing;

TEST_CASE("grid construction") {
    GridSpec s;
    s.scheme = GridScheme::uniform;
    s.nodes_per_side = 1;
    s.delta = 0.5;
    s.outer = 1.5;
    const Grid g = build_grid(s);
    REQUIRE(g.size() == 2u);
    CHECK(g.node(0) == 1.0);
    CHECK(g.node(1) == -1.0);
    CHECK(g.weight(0) == 1.0);

    GridSpec p;
    p.nodes_per_side = 16;
    p.panels = 1;
    p.delta = 0.1;
    p.outer = 5.0;
    const Grid q = build_grid(p);
    double plus = 0.0;
    for (Index i = 0; i < q.n_plus(); ++i) plus += q.weight(i);
    CHECK(std::abs(plus - 4.9) < 1e-12);
    CHECK(q.n_plus() == 16);
    CHECK(q.n_minus() == 16);
}

TEST_CASE("grid validation names the field") {
    GridSpec s;
    s.delta = 0.0;
    try {
        build_grid(s);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("grid.delta") != std::string::npos);
    }
    s = {};
    s.nodes_per_side = 0;
    CHECK_THROWS_AS(build_grid(s), ConfigError);
    CHECK_THROWS_AS(Grid::from_nodes({1.0, 2.0}, {1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(Grid::from_nodes({1.0, -1.0}, {1.0, 0.0}), ConfigError);
}

TEST_CASE("grid inversion and snapping") {
    const auto g = panel_grid(10);
    std::vector<Index> perm;
    const Grid inv = g->inverted(&perm);
    for (Index i = 0; i < Index(inv.size()); ++i) {
        const Index s = perm[std::size_t(i)];
        CHECK(inv.node(i) == doctest::Approx(1.0 / g->node(s)).epsilon(1e-15));
        CHECK(inv.weight(i) == doctest::Approx(g->weight(s) / (g->node(s) * g->node(s))).epsilon(1e-15));
    }
    const Index k = g->nearest(-1.0);
    CHECK_FALSE(g->positive(k));
    CHECK_THROWS_AS(g->nearest(0.0), DomainError);
}

TEST_CASE("discretize") {
    const auto g = two_point_grid();
    CHECK(discretize(zero_kernel(), g).entries().isZero());
    const AFunction a({[](double) { return 0.7; }}, "const");
    const OperatorMatrix m = discretize(l_kernel(a), g);
    CHECK(m.entries()(0, 1) == doctest::Approx(0.49 / 2.0));
    CHECK(m.entries()(1, 0) == doctest::Approx(-0.49 / 2.0));
    CHECK(m.entries()(0, 0) == 0.0);

    const KernelFn k = whittaker_kernel(real_params());
    const auto g40 = panel_grid(20);
    const OperatorMatrix par = discretize(k, g40);
    const OperatorMatrix ser = discretize_serial(k, g40);
    CHECK((par.entries() - ser.entries()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(par.symmetry_residual() < 1e-10);
    CHECK(par.fingerprint() == ser.fingerprint());
}

TEST_CASE("discretize is independent of the thread count") {
    const KernelFn k = whittaker_kernel(conjugate_params());
    const auto g = panel_grid(20);
    set_thread_count(1);
    const OperatorMatrix one = discretize(k, g);
    set_thread_count(4);
    const OperatorMatrix four = discretize(k, g);
    set_thread_count(0);
    CHECK(one.fingerprint() == four.fingerprint());
}

TEST_CASE("k from l") {
    const OperatorMatrix k = k_from_l(two_point_l(1.0));
    Eigen::Matrix2d want;
    want << 0.5, 0.5, -0.5, 0.5;
    CHECK((k.entries() - want).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(k_from_l(OperatorMatrix(two_point_grid(), Eigen::Matrix2d::Zero())).entries().isZero());

    SolveInfo info;
    const OperatorMatrix kw = k_from_l(whittaker_l(real_params(), 20), &info);
    CHECK(info.condition >= 1.0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(kw.entries());
    CHECK(svd.singularValues()(0) < 1.0);

    Eigen::Matrix2d sing;
    sing << -1.0, 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(k_from_l(OperatorMatrix(two_point_grid(), sing)), SingularError);
}

TEST_CASE("hat k is a projection for block L") {
    const OperatorMatrix h = hat_k(k_from_l(two_point_l(1.0)));
    CHECK((h.entries() - 0.5 * Eigen::Matrix2d::Ones()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(projection_defect(h) < 1e-15);

    const OperatorMatrix z = hat_k(OperatorMatrix(two_point_grid(), Eigen::Matrix2d::Zero()));
    CHECK(z.entries()(0, 0) == 0.0);
    CHECK(z.entries()(1, 1) == 1.0);

    const OperatorMatrix L = whittaker_l(conjugate_params(), 20);
    const OperatorMatrix hk = hat_k(k_from_l(L));
    CHECK(projection_defect(hk) < 1e-2);
    // range: Khat (V h, h) = (V h, h) for h on the negative side
    const Eigen::MatrixXd V = L.block(Block::pm);
    Eigen::VectorXd hneg = Eigen::VectorXd::LinSpaced(V.cols(), 0.3, -0.8);
    Eigen::VectorXd v(L.size());
    v << V * hneg, hneg;
    CHECK((hk.entries() * v - v).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("block form of K from L") {
    const OperatorMatrix L = whittaker_l(real_params(), 15);
    const OperatorMatrix K = k_from_l(L);
    const Eigen::MatrixXd V = L.block(Block::pm);
    const Index np = V.rows(), nm = V.cols();
    const Eigen::MatrixXd a = (Eigen::MatrixXd::Identity(np, np) + V * V.transpose()).inverse();
    const Eigen::MatrixXd d = (Eigen::MatrixXd::Identity(nm, nm) + V.transpose() * V).inverse();
    CHECK((K.block(Block::pp) - (Eigen::MatrixXd::Identity(np, np) - a)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((K.block(Block::mm) - (Eigen::MatrixXd::Identity(nm, nm) - d)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((K.block(Block::pm) - a * V).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((K.block(Block::mp) + d * V.transpose()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("compress and l12 norm") {
    std::mt19937_64 rng(1);
    const OperatorMatrix m = random_block(rng, 3, 4);
    std::vector<Index> all{0, 1, 2, 3, 4, 5, 6};
    CHECK(compress(m, all).entries() == m.entries());
    const OperatorMatrix one = compress(m, {2});
    CHECK(one.entries()(2, 2) == m.entries()(2, 2));
    CHECK(one.entries().cwiseAbs().sum() == std::abs(m.entries()(2, 2)));
    CHECK(l12_norm(m.with_entries(Eigen::MatrixXd::Zero(7, 7))) == 0.0);

    const OperatorMatrix K = k_from_l(whittaker_l(real_params(), 20));
    const double n = l12_norm(compress(K, nodes_with_abs_at_least(K.grid(), 0.5)));
    CHECK(std::isfinite(n));
    CHECK(n > 0.0);
}

TEST_CASE("fredholm determinant") {
    std::mt19937_64 rng(2);
    const OperatorMatrix z = random_block(rng, 2, 2).with_entries(Eigen::MatrixXd::Zero(4, 4));
    CHECK(fredholm_det(z) == 1.0);
    const OperatorMatrix a = random_block(rng, 4, 4, 0.3);
    const LogDet ld = log_fredholm_det(a);
    CHECK(ld.sign * std::exp(ld.log_abs) == doctest::Approx(fredholm_det(a)).epsilon(1e-12));
    const double direct = (Eigen::MatrixXd::Identity(8, 8) + a.entries()).determinant();
    CHECK(fredholm_det(a) == doctest::Approx(direct).epsilon(1e-12));
    Eigen::Matrix2d s;
    s << -1.0, 0.0, 0.0, 0.0;
    CHECK(fredholm_det(OperatorMatrix(two_point_grid(), s)) == 0.0);
}

TEST_CASE("conjugated kernel") {
    const OperatorMatrix L = two_point_l(1.0);
    const OperatorMatrix K = k_from_l(L);
    CHECK((k_conjugated(K, Eigen::Vector2d::Ones()).entries() - K.entries()).cwiseAbs().maxCoeff() < 1e-15);
    const Eigen::Vector2d g(2.0, 1.0);
    const OperatorMatrix want = k_from_l(scale(g, L, g));
    CHECK((k_conjugated(K, g).entries() - want.entries()).cwiseAbs().maxCoeff() < 1e-12);

    // c_lambda leaves block-form L unchanged
    const OperatorMatrix Lw = whittaker_l(real_params(), 10);
    const OperatorMatrix Kw = k_from_l(Lw);
    const PalmAnchor p = PalmAnchor::make({1.0}, {-2.0});
    const Eigen::VectorXd c = node_values(Lw.grid(), conditioning_functions(p).c);
    CHECK((k_conjugated(Kw, c).entries() - Kw.entries()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("palm updates") {
    const OperatorMatrix K = k_from_l(whittaker_l(conjugate_params(), 10));
    const PalmResult r = palm_update(K, 3);
    CHECK(r.skipped.empty());
    CHECK(r.kernel.entries().row(3).isZero());
    CHECK(r.kernel.entries().col(3).isZero());
    const PalmResult ab = palm_iterate(K, std::vector<Index>{2, 14});
    const PalmResult ba = palm_iterate(K, std::vector<Index>{14, 2});
    CHECK((ab.kernel.entries() - ba.kernel.entries()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(palm_iterate(K, std::vector<Index>{}).kernel.entries() == K.entries());
    CHECK_THROWS_AS(palm_update(K, 99), SizeError);

    const OperatorMatrix z(two_point_grid(), Eigen::Matrix2d::Zero());
    const PalmResult d = palm_update(z, 0);
    REQUIRE(d.skipped.size() == 1u);
    CHECK(d.kernel.entries().isZero());
}

TEST_CASE("palm update on the two-point case matches the conditioned ensemble") {
    // Given the positive node, the configuration is {+1, -1} with probability 1,
    // so the reduced Palm process puts one point at -1.
    const OperatorMatrix K = k_from_l(two_point_l(1.0));
    const PalmResult r = palm_update(K, 0);
    CHECK(r.kernel.entries()(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("palm identity") {
    const PalmIdentityReport empty = verify_palm_identity(whittaker_l(real_params(), 10), PalmAnchor{});
    CHECK(empty.residual == 0.0);
    const PalmIdentityReport two = verify_palm_identity(two_point_l(1.0), PalmAnchor::make({1.0}, {-1.0}));
    CHECK(two.residual <= 1e-10);
    const PalmIdentityReport w = verify_palm_identity(whittaker_l(real_params(), 20), PalmAnchor::make({1.0}, {-1.0}));
    CHECK(w.residual < 1e-12);
    CHECK(w.snap_distance < 0.1);
    CHECK_THROWS_AS(verify_palm_identity(two_point_l(1.0), PalmAnchor::make({1.0, 2.0}, {-1.0, -2.0})),
                    DomainError);
}

TEST_CASE("det ratio identity on random diagonals") {
    const OperatorMatrix L = whittaker_l(conjugate_params(), 15);
    const OperatorMatrix K = k_from_l(L);
    const Index n = K.size();
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.3, 1.7);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd h(n), g(n);
        for (Index i = 0; i < n; ++i) {
            h(i) = u(rng);
            g(i) = u(rng);
        }
        const Eigen::VectorXd g2 = g.cwiseProduct(g);
        const double lhs = fredholm_det(scale(h.cwiseProduct(g2) - one, K, one)) / fredholm_det(scale(g2 - one, K, one));
        const double rhs = fredholm_det(scale(h - one, k_from_l(scale(g, L, g)), one));
        CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));
    }
}

TEST_CASE("invert operator") {
    const OperatorMatrix L = whittaker_l(real_params(), 10);
    const OperatorMatrix inv = invert_operator(L);
    CHECK(inv.grid().n_plus() == L.grid().n_plus());
    const OperatorMatrix back = invert_operator(inv);
    CHECK((back.entries() - L.entries()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(fredholm_det(inv) == doctest::Approx(fredholm_det(L)).epsilon(1e-12));
}

TEST_CASE("iiks system") {
    const KernelParams p = real_params();
    const OperatorMatrix L = whittaker_l(p, 20);
    const IiksSolution s = iiks_solve(L, whittaker_a(p));
    CHECK(s.eq0_residual <= 1e-12);
    for (double r : s.sep_rel) CHECK(r <= 1e-8);
    CHECK(s.offdiag_residual <= 1e-8);
    CHECK(s.diag_residual <= 1e-6);

    const OperatorMatrix Z = L.with_entries(Eigen::MatrixXd::Zero(L.size(), L.size()));
    const AFunction a = whittaker_a(p);
    const IiksSolution z = iiks_solve(Z, a);
    for (Index i = 0; i < Z.size(); ++i) {
        const double x = Z.grid().node(i);
        CHECK(z.F1(i) == doctest::Approx(a.plus(x)));
        CHECK(z.F2(i) == doctest::Approx(a.minus(x)));
        CHECK(z.F1(i) * z.G1(i) + z.F2(i) * z.G2(i) == 0.0);
    }
}
