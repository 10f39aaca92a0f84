#pragma once

#include "jdpp/kernels.hpp"
#include "jdpp/opalg.hpp"
#include "jdpp/sampling.hpp"

#include <functional>
#include <string>
#include <vector>

namespace jdpp {

// sum over X of sgn(x) phi(x)
double twisted_statistic(const Grid& grid, const Configuration& X, const Eigen::VectorXd& phi);
// E T[phi] = sum sgn(x_i) phi_i M_ii
double twisted_mean(const OperatorMatrix& K, const Eigen::VectorXd& phi);

// 1/2 sum_ij (f_i - f_j)^2 M_ij^2
double variance_analytic(const OperatorMatrix& K, const Eigen::VectorXd& f);
// sum f_i^2 M_ii - sum f_i f_j M_ij M_ji, exact for any kernel
double variance_moment_form(const OperatorMatrix& K, const Eigen::VectorXd& f);

// ---------------------------------------------------------------- mollifier

struct MollifierDiagnostics {
    int n = 0;
    double N = 0.0;          // window multiplier, the inner region is |x| <= N M
    double delta_n = 0.0;
    double k = 0.0;          // psi is supported in [-1/k, 1/k]
    double C_fourier = 0.0;  // 2 Phi^(0) - 2 Re Phi^(xi) <= C_fourier |xi|
    double budget = 0.0;     // 1 / (10 C_fourier n)
    bool flat = false;       // psi = k/2 on its support
    double log_xi0 = 0.0;    // psi = B on |xi| <= xi0
    double mass = 0.0;       // int psi
    double energy = 0.0;     // int |xi| psi^2
    int retries = 0;
    double sup_window_error = 0.0;  // sup_{|x| <= R} |phi - 1|
    double I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0;
    double variance = 0.0;
};

// Inverse Fourier transform of psi_n, evaluated anywhere.
class MollifierProfile {
public:
    MollifierProfile() = default;
    MollifierProfile(double k, double a, double log_xi0, bool flat);
    double operator()(double x) const;

private:
    double k_ = 1.0;
    double a_ = 0.5;
    double log_xi0_ = 0.0;
    bool flat_ = true;
};

struct Mollifier {
    MollifierProfile profile;
    Eigen::VectorXd phi;  // profile on the grid nodes
    MollifierDiagnostics diagnostics;
};

// Cosine integral Ci(t) and Cin(t) = int_0^t (1 - cos u)/u du, t >= 0.
double cosine_integral(double t);
double cosine_integral_entire(double t);

constexpr int kMollifierRetries = 8;

Mollifier mollifier(int n, double R, const DecayReport& decay, const OperatorMatrix& K);

// ------------------------------------------------------ regularized functionals

enum class DivergencePolicy { Throw, Report };

struct RegularizedLevel {
    double delta = 0.0;
    double truncated_sum = 0.0;
    double expectation = 0.0;
    double value = 0.0;
    // sqrt(V(f chi_{delta <= |x| < previous delta})), zero at the first level
    double annulus_norm = 0.0;
};

struct RegularizedFunctional {
    std::vector<RegularizedLevel> levels;
    double value = 0.0;  // at the smallest delta
    bool cauchy_stable = true;
};

std::vector<double> default_delta_schedule();
constexpr double kCauchyShrink = 1.5;

RegularizedFunctional regularized_additive(const Configuration& X, const Eigen::VectorXd& f, const OperatorMatrix& K,
                                           const std::vector<double>& schedule = default_delta_schedule(),
                                           DivergencePolicy policy = DivergencePolicy::Throw);

// log h_p^2 with sgn folded in, zero where h_p vanishes; anchor nodes are
// returned in *zeros.
Eigen::VectorXd s_bar_integrand(const Grid& grid, const PalmAnchor& anchor, std::vector<Index>* zeros = nullptr);

double s_bar_p(const Configuration& X, const PalmAnchor& anchor, const OperatorMatrix& K,
               const std::vector<double>& schedule = default_delta_schedule(),
               DivergencePolicy policy = DivergencePolicy::Throw);

struct Normalizer {
    double value = 0.0;
    double value_coarse = 0.0;  // same quantity at 2 delta
    bool stable = true;
};

constexpr double kNormalizerStability = 1e-2;

// det(1 + (g - 1) K^Delta) exp(-sum_{|x_i| >= delta, g_i > 0} log g_i M_ii).
// Nodes where g vanishes enter the determinant and are left out of the centering.
Normalizer rn_normalizer(const OperatorMatrix& K, const Eigen::VectorXd& g, double delta);

struct MembershipLevel {
    double delta = 0.0;
    double summable = 0.0;  // sum_{|x_i| >= delta} f_i^2 M_ii
    double tail = 0.0;      // sum_{|x_i| < delta, |x_j| >= delta} f_i^2 M_ij^2
};

struct MembershipReport {
    double v_norm = 0.0;
    bool v_finite = true;
    std::vector<MembershipLevel> levels;
    bool summable_finite = true;
    bool tail_to_zero = true;
    // conditions on g = exp(f)
    double g_inf = 0.0;
    double g_sup = 0.0;
    double g_l2 = 0.0;  // sum (g_i - 1)^2 M_ii
    bool m2_bounds = true;
    bool m2_l2 = true;
    bool pass() const { return v_finite && summable_finite && tail_to_zero && m2_bounds && m2_l2; }
};

MembershipReport membership_diagnostics(const OperatorMatrix& K, const Eigen::VectorXd& f,
                                        const std::vector<double>& schedule = default_delta_schedule());

// ---------------------------------------------------------------- experiments

struct RigidityConfig {
    double R = 1.0;
    std::vector<int> levels{1, 2, 4, 8};
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    DecayReport decay;
};

struct RigidityLevel {
    int n = 0;
    double variance_analytic = 0.0;
    double variance_empirical = 0.0;
    double variance_stderr = 0.0;
    double expected = 0.0;
    double accuracy = 0.0;
    MollifierDiagnostics diagnostics;
};

struct RigidityReport {
    double R = 0.0;
    std::size_t samples = 0;
    std::vector<RigidityLevel> levels;
    bool variance_monotone = true;
    bool accuracy_monotone = true;
};

// Round to nearest, ties toward zero.
long round_ties_to_zero(double x);

RigidityReport rigidity_experiment(const OperatorMatrix& K, const RigidityConfig& config);

struct TestFunction {
    std::string name;
    std::function<double(double)> h;
};

struct PalmRoutes {
    std::string name;
    double palm_kernel = 0.0;      // (a)
    double ratio = 0.0;            // (b)
    double reweighted = 0.0;       // (c)
    double reweighted_stderr = 0.0;
    double self_normalized = 0.0;  // (c) with the empirical normalizer
    double rel_ab = 0.0;
    double rel_ac = 0.0;
    double rel_bc = 0.0;
    double z_ac = 0.0;  // |c - a| / stderr
};

struct PalmEquivalenceReport {
    PalmAnchor anchor;  // after snapping
    std::vector<Index> anchor_nodes;
    std::vector<Index> skipped;
    std::size_t samples = 0;
    double delta = 0.0;
    Normalizer normalizer;
    bool cauchy_stable = true;  // of the truncated log h_p^2 functional
    double normalizer_empirical = 0.0;
    double weight_ess = 0.0;  // (sum w)^2 / sum w^2
    std::vector<PalmRoutes> routes;
};

PalmEquivalenceReport palm_equivalence_experiment(const OperatorMatrix& L, const PalmAnchor& anchor,
                                                  const std::vector<TestFunction>& h_tests, std::size_t samples,
                                                  std::uint64_t seed,
                                                  const std::vector<double>& schedule = default_delta_schedule());

// 1 - depth * bump on [lo, hi], mirrored to [-hi, -lo] when both_sides.
TestFunction bump_test_function(std::string name, double lo, double hi, double depth, bool both_sides = false);

}  // namespace jdpp
