// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "jdpp/errors.hpp"
#include "jdpp/statistics.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/reproducing.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace jdpp;
using namespace jdpp::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit;  // seconds
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double rel(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

Outcome special_functions() {
    double worst_w = 0.0, worst_g = 0.0;
    std::size_t n = 0;
    for (const auto& r : oracle_rows("whittaker_w", "acceptance")) {
        worst_w = std::max(worst_w, rel_err(whittaker_w(r.p1, r.p2, r.x), r.value));
        ++n;
    }
    for (const auto& r : oracle_rows("gamma", "acceptance")) {
        worst_g = std::max(worst_g, rel_err(gamma_complex(r.p1), r.value));
        ++n;
    }
    std::ostringstream os;
    os << n << " tuples, max rel err W " << worst_w << ", Gamma " << worst_g;
    return {n == 200 && worst_w <= 1e-8 && worst_g <= 1e-8, os.str()};
}

Outcome symmetry_and_reproducing() {
    double worst_sym = 0.0, worst_rep = 0.0;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    for (const KernelParams& p : {real_params(), conjugate_params()}) {
        const KernelFn k = whittaker_kernel(p);
        for (int i = 0; i < 1000; ++i) {
            double x = u(rng), y = u(rng);
            if (std::abs(x - y) < 1e-3) y += 0.01;
            const double sg = (x > 0) == (y > 0) ? 1.0 : -1.0;
            const double a = k(x, y), b = sg * k(y, x);
            const double s = std::max({std::abs(a), std::abs(b), 1e-300});
            worst_sym = std::max(worst_sym, std::abs(a - b) / s);
        }
        for (double x : {0.15, 0.4, 0.9, 1.7, 3.5, -0.2, -0.6, -1.2, -2.5, -5.0}) {
            const double d = k.diag(x);
            worst_rep = std::max(worst_rep, std::abs(kernel_row_l2(k, x) - d) / d);
        }
    }
    std::ostringstream os;
    os << "2000 pairs sym residual " << worst_sym << ", 20 points reproducing rel err " << worst_rep;
    return {worst_sym <= 1e-8 && worst_rep <= 1e-3, os.str()};
}

Eigen::VectorXd random_diagonal(std::mt19937_64& rng, Index n, double amp) {
    std::uniform_real_distribution<double> u(-amp, amp);
    Eigen::VectorXd v(n);
    for (Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

Outcome determinant_suite() {
    std::mt19937_64 rng(3);
    int failures = 0;
    double worst_m = 0.0, worst_bdd = 0.0, worst_ideal = 0.0, worst_fm = 0.0, worst_fc = 0.0;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(8);
    for (int t = 0; t < 50; ++t) {
        const OperatorMatrix A = random_block(rng, 4, 4, 0.3);
        const OperatorMatrix B = random_block(rng, 4, 4, 0.3);
        const double na = l12_norm(A), nb = l12_norm(B);

        const double m = l12_norm(A.with_entries(A.entries() * B.entries())) / (2.0 * na * nb);
        worst_m = std::max(worst_m, m);
        failures += m > 1.0;

        const Eigen::VectorXd f = random_diagonal(rng, 8, 2.0);
        const double fsup = f.cwiseAbs().maxCoeff();
        const double bdd = std::max(l12_norm(scale(f, A, ones)), l12_norm(scale(ones, A, f))) / (fsup * na);
        worst_bdd = std::max(worst_bdd, bdd);
        failures += bdd > 1.0 + 1e-12;

        const Eigen::MatrixXd one_a = Eigen::MatrixXd::Identity(8, 8) + A.entries();
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(one_a);
        const double cond = svd.singularValues()(0) / svd.singularValues()(7);
        const Eigen::MatrixXd inv = one_a.inverse();
        const double ideal = std::max(l12_norm(A.with_entries(inv * B.entries())),
                                      l12_norm(A.with_entries(B.entries() * inv))) /
                             (2.0 * cond * nb);
        worst_ideal = std::max(worst_ideal, ideal);
        failures += !(ideal <= 1.0);

        const double lhs = fredholm_det(A.with_entries(A.entries() + B.entries() + A.entries() * B.entries()));
        const double fm = rel(lhs, fredholm_det(A) * fredholm_det(B));
        worst_fm = std::max(worst_fm, fm);
        failures += fm > 1e-10;

        const double fc = rel(fredholm_det(scale(f, A, ones)), fredholm_det(scale(ones, A, f)));
        worst_fc = std::max(worst_fc, fc);
        failures += fc > 1e-10;
    }
    std::ostringstream os;
    os << "250 checks, ratios: product " << worst_m << ", multiplier " << worst_bdd << ", inverse " << worst_ideal
       << "; rel err: multiplicativity " << worst_fm << ", commutation " << worst_fc;
    return {failures == 0, os.str()};
}

Outcome palm_kernel_identity() {
    const PalmAnchor two = PalmAnchor::make({1.0}, {-1.0});
    const double r2 = verify_palm_identity(two_point_l(1.0), two).residual;
    const double r40 = verify_palm_identity(whittaker_l(real_params(), 20), two).residual;
    const double r80 = verify_palm_identity(whittaker_l(real_params(), 40), two).residual;
    std::ostringstream os;
    os << "two-point " << r2 << ", (0.2,0.1) 40 nodes " << r40 << " -> 80 nodes " << r80;
    for (const auto& [name, p] : std::map<std::string, KernelParams>{{"0.3+-0.4i", conjugate_params()},
                                                                     {"0.3+-1.0i", dense_params()}}) {
        const double a = verify_palm_identity(whittaker_l(p, 20), two).residual;
        const double b = verify_palm_identity(whittaker_l(p, 40), two).residual;
        os << "; [info] (" << name << ") " << a << " -> " << b;
    }
    return {r2 <= 1e-10 && r80 <= 0.5 * r40, os.str()};
}

Outcome iiks_consistency() {
    double sep = 0.0, off = 0.0;
    for (const KernelParams& p : {real_params(), conjugate_params()}) {
        const OperatorMatrix L = whittaker_l(p, 20);
        const IiksSolution s = iiks_solve(L, whittaker_a(p));
        for (double r : s.sep_rel) sep = std::max(sep, r);
        off = std::max(off, s.offdiag_residual);
    }
    std::ostringstream os;
    os << "max sep-rel residual " << sep << ", off-diagonal reconstruction " << off;
    return {sep <= 1e-8 && off <= 1e-8, os.str()};
}

std::uint32_t mask_of(const Configuration& c) {
    std::uint32_t m = 0;
    for (Index i : c.points) m |= 1u << i;
    return m;
}

std::vector<OperatorMatrix> small_grids() {
    return {whittaker_l(real_params(), 5, 0.1, 6.0), whittaker_l(conjugate_params(), 4, 0.1, 6.0),
            whittaker_l(dense_params(), 5, 0.1, 6.0)};
}

Outcome sampler_exactness() {
    constexpr std::size_t n = 100000;
    double worst = 0.0;
    for (const OperatorMatrix& L : small_grids()) {
        const EnumerationTable table = enumerate_l_ensemble(L);
        const SampleBatch b = sample_dual(L, n, 6);
        std::vector<double> freq(table.probability.size(), 0.0);
        for (const auto& c : b.configurations) freq[mask_of(c)] += 1.0 / double(n);
        double tv = 0.0;
        for (std::size_t m = 0; m < freq.size(); ++m) tv += std::abs(freq[m] - table.probability[m]);
        worst = std::max(worst, 0.5 * tv);
    }
    return {worst <= 0.02, "max TV distance over 3 grids " + fmt("%.4g", worst)};
}

Outcome variance_formula() {
    double worst_enum = 0.0;
    for (const OperatorMatrix& L : small_grids()) {
        const OperatorMatrix K = k_from_l(L);
        const EnumerationTable table = enumerate_l_ensemble(L);
        const Grid& g = L.grid();
        Eigen::VectorXd f(L.size());
        for (Index i = 0; i < L.size(); ++i) f(i) = std::cos(g.node(i)) + 0.3 * g.node(i);
        double m1 = 0.0, m2 = 0.0;
        for (std::uint32_t m = 0; m < table.probability.size(); ++m) {
            double t = 0.0;
            for (Index i = 0; i < L.size(); ++i)
                if (m & (1u << i)) t += g.sign(i) * f(i);
            m1 += table.probability[m] * t;
            m2 += table.probability[m] * t * t;
        }
        worst_enum = std::max(worst_enum, std::abs(variance_analytic(K, f) - (m2 - m1 * m1)));
    }

    const OperatorMatrix L = whittaker_l(dense_params(), 100);
    const OperatorMatrix K = k_from_l(L);
    const Grid& g = L.grid();
    Eigen::VectorXd f(L.size());
    for (Index i = 0; i < L.size(); ++i) f(i) = std::exp(-std::abs(g.node(i) - 1.0));
    const double analytic = variance_analytic(K, f);
    const SampleBatch b = sample_dual(L, 10000, 7);
    std::vector<double> t;
    for (const auto& c : b.configurations) t.push_back(twisted_statistic(g, c, f));
    double mean = 0.0;
    for (double v : t) mean += v;
    mean /= double(t.size());
    double m2 = 0.0, m4 = 0.0;
    for (double v : t) {
        const double d = (v - mean) * (v - mean);
        m2 += d;
        m4 += d * d;
    }
    const double n = double(t.size());
    const double var = m2 / (n - 1.0);
    const double se = std::sqrt(std::max(0.0, m4 / n - (m2 / n) * (m2 / n)) / n);
    const double z = std::abs(var - analytic) / se;
    std::ostringstream os;
    os << "enumeration max abs err " << worst_enum << "; 200 nodes analytic " << analytic << " vs MC " << var
       << " (z " << z << ")";
    return {worst_enum <= 1e-10 && z <= 3.0, os.str()};
}

Outcome balanced_rigidity() {
    const KernelParams p = dense_params();
    const OperatorMatrix L = whittaker_l(p, 100, 0.02, 40.0);
    const OperatorMatrix Knew = invert_operator(k_from_l(L));
    RigidityConfig cfg;
    cfg.R = 1.0;
    cfg.samples = 1000;
    cfg.seed = 8;
    cfg.decay = verify_decay(transform_to_infinity(whittaker_kernel(p)), 1.0, 0.2, 40.0, 60);
    const RigidityReport r = rigidity_experiment(Knew, cfg);
    std::ostringstream os;
    os << "variance";
    for (const auto& lv : r.levels) os << ' ' << lv.variance_analytic;
    os << "; accuracy";
    for (const auto& lv : r.levels) os << ' ' << lv.accuracy;
    const RigidityLevel& top = r.levels.back();
    return {r.variance_monotone && top.variance_analytic <= 0.2 && top.accuracy >= 0.9, os.str()};
}

Outcome palm_equivalence() {
    const std::vector<TestFunction> tests{bump_test_function("inner", 0.2, 0.8, 0.5),
                                          bump_test_function("negative", -4.0, -2.5, 0.7),
                                          bump_test_function("paired", 1.2, 1.8, 0.4, true)};
    double worst_ab = 0.0, worst_z = 0.0, min_ess = std::numeric_limits<double>::infinity();
    for (const KernelParams& p : {real_params(), dense_params()}) {
        const OperatorMatrix L = whittaker_l(p, 40);
        for (const PalmAnchor& a : {PalmAnchor::make({1.0}, {-1.0}), PalmAnchor::make({1.0, 2.0}, {-1.0, -2.0})}) {
            const PalmEquivalenceReport r = palm_equivalence_experiment(L, a, tests, 10000, 11);
            min_ess = std::min(min_ess, r.weight_ess);
            for (const PalmRoutes& route : r.routes) {
                worst_ab = std::max(worst_ab, route.rel_ab);
                worst_z = std::max(worst_z, route.z_ac);
            }
        }
    }
    std::ostringstream os;
    os << "max rel (a,b) " << worst_ab << ", max |c - a|/se " << worst_z << ", min ESS " << min_ess;
    return {worst_ab <= 1e-8 && worst_z <= 3.0, os.str()};
}

Outcome jensen_bound() {
    const OperatorMatrix K = k_from_l(whittaker_l(conjugate_params(), 40));
    const Grid& g = K.grid();
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.1, 2.5);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd v = Eigen::VectorXd::Ones(K.size());
        for (Index i = 0; i < K.size(); ++i)
            if (std::abs(g.node(i)) >= 0.1) v(i) = u(rng);
        worst = std::min(worst, rn_normalizer(K, v, 0.01).value);
    }
    return {worst >= 1.0 - 1e-8, "min normalizer over 20 draws " + fmt("%.6g", worst)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "special-function oracle", 10.0, special_functions},
        {2, "J-symmetry and reproducing identity", 0.0, symmetry_and_reproducing},
        {3, "block norm and determinant identities", 5.0, determinant_suite},
        {4, "Palm kernel identity", 30.0, palm_kernel_identity},
        {5, "IIKS consistency", 0.0, iiks_consistency},
        {6, "sampler exactness", 60.0, sampler_exactness},
        {7, "variance formula", 0.0, variance_formula},
        {8, "balanced rigidity", 300.0, balanced_rigidity},
        {9, "balanced Palm equivalence", 600.0, palm_equivalence},
        {10, "Jensen bound", 0.0, jensen_bound},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.time_limit <= 0.0 || secs <= c.time_limit;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("%s [%d] %s (%.2fs%s) %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                    in_time ? "" : ", over time limit", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
