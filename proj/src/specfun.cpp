#include "jdpp/specfun.hpp"

#include "jdpp/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace jdpp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesRadius = 2.0;
constexpr double kIntegerBGap = 1e-6;

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(cplx w) {
    return w.imag() == 0.0 && w.real() <= 0.0 && w.real() == std::round(w.real());
}

// log Gamma for Re w >= 1/2.
cplx lgamma_lanczos(cplx w) {
    w -= 1.0;
    cplx sum = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (w + double(i));
    const cplx t = w + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (w + 0.5) * std::log(t) - t + std::log(sum);
}

double nearest_integer_distance(cplx b) {
    if (std::abs(b.imag()) >= kIntegerBGap) return 1.0;
    return std::hypot(b.real() - std::round(b.real()), b.imag());
}

// Olver-normalized series sum_n (a)_n x^n / (n! Gamma(b+n)).
cplx m_normalized(cplx a, cplx b, double x, const AccuracySpec& acc) {
    cplx rg = rgamma(b);
    cplx poch = 1.0;
    double xn = 1.0;
    cplx sum = rg;
    double max_term = std::abs(rg);
    for (int n = 1; n <= acc.max_terms; ++n) {
        poch *= (a + double(n - 1));
        xn *= x / n;
        const cplx bn = b + double(n - 1);
        if (std::abs(bn) < 0.5) {
            rg = rgamma(b + double(n));
        } else {
            rg /= bn;
        }
        const cplx term = poch * xn * rg;
        sum += term;
        max_term = std::max(max_term, std::abs(term));
        if (std::abs(term) <= 0.1 * acc.rel_tol * std::abs(sum) && n > 2) return sum;
        if (poch == 0.0) return sum;
    }
    throw ConvergenceError("kummer_u: M-series did not converge within max_terms");
}

cplx kummer_u_series_raw(cplx a, cplx b, double x, const AccuracySpec& acc) {
    const cplx first = m_normalized(a, b, x, acc) * rgamma(a - b + 1.0);
    const cplx second = std::exp((1.0 - b) * std::log(x)) * m_normalized(a - b + 1.0, 2.0 - b, x, acc) * rgamma(a);
    return kPi / detail::sin_pi(b) * (first - second);
}

}  // namespace

void AccuracySpec::validate() const {
    if (!(rel_tol > 0.0) || max_terms < 1 || !(switch_radius > 0.0))
        throw ConfigError("AccuracySpec requires rel_tol > 0, max_terms >= 1, switch_radius > 0");
}

cplx detail::sin_pi(cplx w) {
    const double r = w.real() - 2.0 * std::round(0.5 * w.real());
    const double b = kPi * w.imag();
    double s = 0.0, c = 0.0;
    if (r == 0.0 || r == 1.0 || r == -1.0) {
        s = 0.0;
        c = r == 0.0 ? 1.0 : -1.0;
    } else if (r == 0.5 || r == -1.5) {
        s = 1.0;
    } else if (r == -0.5 || r == 1.5) {
        s = -1.0;
    } else {
        s = std::sin(kPi * r);
        c = std::cos(kPi * r);
    }
    return {s * std::cosh(b), c * std::sinh(b)};
}

cplx gamma_complex(cplx w, const AccuracySpec& acc) {
    acc.validate();
    if (is_nonpositive_integer(w)) {
        std::ostringstream os;
        os << "gamma_complex: pole at w = " << w.real();
        throw PoleError(os.str());
    }
    // Exact factorials where they are representable.
    if (w.imag() == 0.0 && w.real() >= 1.0 && w.real() <= 23.0 && w.real() == std::floor(w.real())) {
        double f = 1.0;
        for (int k = 2; k < int(w.real()); ++k) f *= k;
        return f;
    }
    if (w.real() < 0.5) return kPi / (detail::sin_pi(w) * std::exp(lgamma_lanczos(1.0 - w)));
    return std::exp(lgamma_lanczos(w));
}

cplx rgamma(cplx w) {
    if (is_nonpositive_integer(w)) return 0.0;
    if (w.real() < 0.5) return detail::sin_pi(w) * std::exp(lgamma_lanczos(1.0 - w)) / kPi;
    return std::exp(-lgamma_lanczos(w));
}

cplx detail::kummer_u_series(cplx a, cplx b, double x, const AccuracySpec& acc) {
    if (nearest_integer_distance(b) < kIntegerBGap) {
        const cplx lo = kummer_u_series_raw(a, b - kIntegerBGap, x, acc);
        const cplx hi = kummer_u_series_raw(a, b + kIntegerBGap, x, acc);
        return 0.5 * (lo + hi);
    }
    return kummer_u_series_raw(a, b, x, acc);
}

cplx detail::kummer_u_integral(cplx a, cplx b, double x, const AccuracySpec& acc) {
    static boost::math::quadrature::exp_sinh<double> integrator(12);

    // U(a+N) and U(a+N+1) by quadrature with Re(a+N) >= 1, then the recurrence
    // U(a-1) = -(b - 2a - x) U(a) - a (a - b + 1) U(a+1) downwards.
    const int shift = a.real() < 1.0 ? int(std::ceil(1.0 - a.real())) : 0;
    const double logx = std::log(x);
    const double tol = std::max(1e-15, 0.01 * acc.rel_tol);
    auto by_quadrature = [&](cplx aa) {
        const cplx am1 = aa - 1.0;
        const cplx ex = b - aa - 1.0;
        auto f = [&](double s) -> cplx {
            if (s <= 0.0) return 0.0;
            return std::exp(-s + am1 * std::log(s) + ex * std::log1p(s / x));
        };
        const cplx integral = integrator.integrate(f, tol);
        return std::exp(-aa * logx) * integral * rgamma(aa);
    };
    cplx a_top = a + double(shift);
    cplx u_hi = by_quadrature(a_top + 1.0);
    cplx u = by_quadrature(a_top);
    for (int k = 0; k < shift; ++k) {
        const cplx u_lo = -(b - 2.0 * a_top - x) * u - a_top * (a_top - b + 1.0) * u_hi;
        u_hi = u;
        u = u_lo;
        a_top -= 1.0;
    }
    return u;
}

bool detail::kummer_u_asymptotic(cplx a, cplx b, double x, const AccuracySpec& acc, cplx& out) {
    const cplx c = a - b + 1.0;
    cplx term = 1.0;
    cplx sum = 1.0;
    double prev = 1.0;
    for (int n = 0; n < acc.max_terms; ++n) {
        term *= -(a + double(n)) * (c + double(n)) / (double(n + 1) * x);
        const double mag = std::abs(term);
        if (mag == 0.0) {
            out = std::exp(-a * std::log(x)) * sum;
            return true;
        }
        if (mag > prev && n > 1) return false;
        sum += term;
        if (mag <= 0.1 * acc.rel_tol * std::abs(sum)) {
            out = std::exp(-a * std::log(x)) * sum;
            return true;
        }
        prev = mag;
    }
    return false;
}

cplx kummer_u(cplx a, cplx b, double x, const AccuracySpec& acc) {
    acc.validate();
    if (!(x > 0.0)) {
        std::ostringstream os;
        os << "kummer_u: x = " << x << " is not positive";
        throw DomainError(os.str());
    }
    if (a == 0.0) return 1.0;
    if (x > acc.switch_radius) {
        cplx out;
        if (detail::kummer_u_asymptotic(a, b, x, acc, out)) return out;
    }
    if (x <= kSeriesRadius) return detail::kummer_u_series(a, b, x, acc);
    return detail::kummer_u_integral(a, b, x, acc);
}

cplx whittaker_w(cplx kappa, cplx mu, double x, const AccuracySpec& acc) {
    if (!(x > 0.0)) {
        std::ostringstream os;
        os << "whittaker_w: x = " << x << " is not positive";
        throw DomainError(os.str());
    }
    const cplx u = kummer_u(mu - kappa + 0.5, 1.0 + 2.0 * mu, x, acc);
    return std::exp(-0.5 * x + (mu + 0.5) * std::log(x)) * u;
}

KernelParams KernelParams::make(cplx z, cplx zp) {
    KernelParams kp;
    kp.z = z;
    kp.zp = zp;
    const double tiny = 1e-14;
    const bool real_pair = std::abs(z.imag()) <= tiny && std::abs(zp.imag()) <= tiny;
    if (real_pair) {
        const double m = std::floor(z.real());
        const bool inside = z.real() > m && z.real() < m + 1.0 && zp.real() > m && zp.real() < m + 1.0;
        if (!inside) {
            std::ostringstream os;
            os << "KernelParams: real pair (" << z.real() << ", " << zp.real()
               << ") does not lie in a common open unit interval (m, m+1)";
            throw DomainError(os.str());
        }
        kp.z = z.real();
        kp.zp = zp.real();
        kp.regime = Regime::real_interval;
    } else {
        if (std::abs(zp - std::conj(z)) > tiny * (1.0 + std::abs(z))) {
            throw DomainError("KernelParams: complex pair must satisfy z' = conj(z)");
        }
        kp.zp = std::conj(z);
        kp.regime = Regime::conjugate;
    }
    kp.l_admissible = std::abs(kp.s()) < 1.0;
    return kp;
}

PQ pq_functions(const KernelParams& params, Side side, double x, const AccuracySpec& acc) {
    if (!(x > 0.0)) {
        std::ostringstream os;
        os << "pq_functions: x = " << x << " is not positive";
        throw DomainError(os.str());
    }
    const double sg = side == Side::plus ? 1.0 : -1.0;
    const double zz = (params.z * params.zp).real();
    const double gg = (gamma_complex(1.0 + sg * params.z, acc) * gamma_complex(1.0 + sg * params.zp, acc)).real();
    if (!(zz > 0.0) || !(gg > 0.0))
        throw DomainError("pq_functions: prefactor product is not positive for these parameters");
    const double s = params.s();
    const cplx mu = params.mu();
    const cplx wp = whittaker_w(0.5 * (sg * s + 1.0), mu, x, acc);
    const cplx wq = whittaker_w(0.5 * (sg * s - 1.0), mu, x, acc);
    const double imag_tol = 1e-8;
    if (std::abs(wp.imag()) > imag_tol * std::abs(wp) || std::abs(wq.imag()) > imag_tol * std::abs(wq))
        throw ConvergenceError("pq_functions: Whittaker values are not real to tolerance");
    const double pref = 1.0 / std::sqrt(gg * x);
    return {std::pow(zz, 0.25) * pref * wp.real(), std::pow(zz, 0.75) * pref * wq.real()};
}

}  // namespace jdpp
