#pragma once

#include <complex>

namespace jdpp {

using cplx = std::complex<double>;

struct AccuracySpec {
    double rel_tol = 1e-10;
    int max_terms = 400;
    double switch_radius = 30.0;

    void validate() const;
};

// Principal-branch complex Gamma. Lanczos (g = 7) with reflection for Re w < 1/2.
cplx gamma_complex(cplx w, const AccuracySpec& acc = {});
// 1/Gamma, entire: returns exactly 0 at the poles instead of throwing.
cplx rgamma(cplx w);

// Tricomi confluent hypergeometric U(a, b, x) for real x > 0.
cplx kummer_u(cplx a, cplx b, double x, const AccuracySpec& acc = {});

// W_{kappa,mu}(x) = e^{-x/2} x^{mu+1/2} U(mu - kappa + 1/2, 1 + 2 mu, x).
cplx whittaker_w(cplx kappa, cplx mu, double x, const AccuracySpec& acc = {});

enum class Regime { conjugate, real_interval };

struct KernelParams {
    cplx z;
    cplx zp;
    Regime regime = Regime::real_interval;
    bool l_admissible = false;

    // Classifies and validates; throws DomainError for inadmissible pairs.
    static KernelParams make(cplx z, cplx zp);
    double s() const { return (z + zp).real(); }
    cplx mu() const { return 0.5 * (z - zp); }
};

enum class Side { plus = 1, minus = -1 };

struct PQ {
    double p = 0.0;
    double q = 0.0;
};

PQ pq_functions(const KernelParams& params, Side side, double x, const AccuracySpec& acc = {});

namespace detail {
// Individual evaluation routes, exposed for overlap testing.
cplx kummer_u_series(cplx a, cplx b, double x, const AccuracySpec& acc);
cplx kummer_u_integral(cplx a, cplx b, double x, const AccuracySpec& acc);
// Returns false when the divergent tail is reached before rel_tol.
bool kummer_u_asymptotic(cplx a, cplx b, double x, const AccuracySpec& acc, cplx& out);
cplx sin_pi(cplx w);
}  // namespace detail

}  // namespace jdpp
