#include "jdpp/statistics.hpp"

#include "jdpp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

namespace jdpp {

namespace {

constexpr double kCinSeriesLimit = 8.0;

double sinc(double t) { return std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t; }

// Ci(t) for t > 2 by the continued fraction of E1(it).
double ci_continued_fraction(double t) {
    using cplx = std::complex<double>;
    constexpr double tiny = 1e-300;
    cplx b(1.0, t);
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 2; i < 1000; ++i) {
        const double a = -double(i - 1) * double(i - 1);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const cplx del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return -(h * cplx(std::cos(t), -std::sin(t))).real();
    }
    throw ConvergenceError("cosine_integral: continued fraction did not converge");
}

}  // namespace

double cosine_integral_entire(double t) {
    if (t < 0.0) throw DomainError("cosine_integral: t must be non-negative");
    if (t > kCinSeriesLimit) return std::numbers::egamma + std::log(t) - ci_continued_fraction(t);
    const double t2 = t * t;
    double term = 1.0;  // t^{2k} / (2k)!
    double sum = 0.0;
    for (int k = 1; k < 60; ++k) {
        term *= t2 / double((2 * k - 1) * (2 * k));
        const double add = term / double(2 * k);
        sum += (k % 2 ? add : -add);
        if (add < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

double cosine_integral(double t) {
    if (!(t > 0.0)) throw DomainError("cosine_integral: t must be positive");
    if (t > kCinSeriesLimit) return ci_continued_fraction(t);
    return std::numbers::egamma + std::log(t) - cosine_integral_entire(t);
}

MollifierProfile::MollifierProfile(double k, double a, double log_xi0, bool flat)
    : k_(k), a_(a), log_xi0_(log_xi0), flat_(flat) {}

double MollifierProfile::operator()(double x) const {
    const double two_pi = 2.0 * std::numbers::pi;
    if (flat_) return sinc(two_pi * x / k_);
    // psi = B on |xi| <= xi0 and a/|xi| up to 1/k, with B xi0 = a and
    // log(1/(k xi0)) = 1/(2a) - 1.
    const double t1 = two_pi * std::abs(x) / k_;
    const double t0 = two_pi * std::abs(x) * std::exp(log_xi0_);
    return 1.0 - 2.0 * a_ + 2.0 * a_ * sinc(t0) - 2.0 * a_ * cosine_integral_entire(t1) +
           2.0 * a_ * cosine_integral_entire(t0);
}

Mollifier mollifier(int n, double R, const DecayReport& decay, const OperatorMatrix& K) {
    if (n < 1) throw ConfigError("mollifier: n must be at least 1");
    if (!(R > 0.0)) throw ConfigError("mollifier: R must be positive");
    if (!(decay.M > 0.0)) throw ConfigError("mollifier: decay.M must be positive");
    const Grid& grid = K.grid();
    const Eigen::MatrixXd& m = K.entries();
    const Index size = K.size();
    const double M = decay.M;
    double extent = 0.0;
    for (double x : grid.nodes()) extent = std::max(extent, std::abs(x));

    Mollifier out;
    MollifierDiagnostics& d = out.diagnostics;
    d.n = n;

    // Off-diagonal mass between |x| <= M and |y| >= N M.
    auto leak = [&](double N) {
        double s = 0.0;
        for (Index i = 0; i < size; ++i) {
            if (std::abs(grid.node(i)) > M) continue;
            for (Index j = 0; j < size; ++j)
                if (std::abs(grid.node(j)) >= N * M) s += m(i, j) * m(i, j);
        }
        return s;
    };
    double N = std::max(R + 1.0, R / M + 1.0);
    while (leak(N) > 1.0 / (40.0 * n) && N * M <= extent) N *= 2.0;
    d.N = N;

    double inner = 0.0;
    for (Index i = 0; i < size; ++i)
        if (std::abs(grid.node(i)) <= N * M) inner += m(i, i);
    d.delta_n = 1.0 / n;
    if (inner > 0.0) d.delta_n = std::min(d.delta_n, 1.0 / std::sqrt(20.0 * n * inner));
    // |exp(2 pi i t) - 1| = 2 |sin(pi t)| <= delta_n for |t| <= N M / k.
    double k = std::max(double(n), std::numbers::pi * N * M / std::asin(d.delta_n / 2.0));

    const double pi = std::numbers::pi;
    d.C_fourier = 4.0 * pi * pi * decay.C * decay.C + 4.0 * pi * decay.C_prime * decay.C_prime * decay.delta_prime *
                                                          decay.delta_prime;
    d.budget = d.C_fourier > 0.0 ? 1.0 / (10.0 * d.C_fourier * n) : std::numeric_limits<double>::infinity();
    const double a = d.budget;

    for (d.retries = 0;; ++d.retries) {
        if (d.retries > kMollifierRetries) {
            std::ostringstream os;
            os << "mollifier: energy budget " << d.budget << " not met after " << kMollifierRetries << " retries";
            throw ConstructionError(os.str());
        }
        d.k = k;
        d.flat = a >= 0.5;
        if (d.flat) {
            d.log_xi0 = -std::log(k);
            d.energy = 0.25;
            out.profile = MollifierProfile(k, 0.5, d.log_xi0, true);
        } else {
            d.log_xi0 = -std::log(k) - (0.5 / a - 1.0);
            d.energy = a * (1.0 - a);
            out.profile = MollifierProfile(k, a, d.log_xi0, false);
        }
        d.mass = out.profile(0.0);
        if (std::isfinite(d.log_xi0) && d.energy <= d.budget && std::abs(d.mass - 1.0) <= 1e-12) break;
        k *= 2.0;
    }

    out.phi.resize(size);
    for (Index i = 0; i < size; ++i) out.phi(i) = out.profile(grid.node(i));

    for (Index i = 0; i < size; ++i)
        if (std::abs(grid.node(i)) <= R) d.sup_window_error = std::max(d.sup_window_error, std::abs(out.phi(i) - 1.0));
    constexpr int probes = 2001;
    for (int p = 0; p < probes; ++p) {
        const double x = -R + 2.0 * R * p / (probes - 1);
        d.sup_window_error = std::max(d.sup_window_error, std::abs(out.profile(x) - 1.0));
    }

    const double NM = N * M;
    for (Index i = 0; i < size; ++i) {
        const double ax = std::abs(grid.node(i));
        for (Index j = 0; j < size; ++j) {
            const double ay = std::abs(grid.node(j));
            const double diff = out.phi(i) - out.phi(j);
            const double F = 0.5 * diff * diff * m(i, j) * m(i, j);
            if (ax <= NM && ay <= NM) d.I1 += F;
            if (ax <= M && ay >= NM) d.I2 += F;
            if (ax >= NM && ay <= M) d.I3 += F;
            if (ax >= M && ay >= M) d.I4 += F;
        }
    }
    d.variance = variance_analytic(K, out.phi);
    return out;
}

}  // namespace jdpp
