#include "jdpp/kernels.hpp"

#include "jdpp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace jdpp {

namespace {

void require_nonzero(double v, const char* what, const char* coord) {
    if (v == 0.0) {
        std::ostringstream os;
        os << what << ": " << coord << " = 0 is outside the punctured line";
        throw DomainError(os.str());
    }
}

double sgn(double x) { return x > 0.0 ? 1.0 : -1.0; }

}  // namespace

double diagonal_step(double x) { return std::max(1e-5, 1e-5 * std::abs(x)); }

KernelFn::KernelFn(FeatureFn features, PairFn pair, DiagFn diag, Singularity sing, std::string name)
    : features_(std::move(features)), pair_(std::move(pair)), diag_(std::move(diag)), sing_(sing), name_(std::move(name)) {}

Features KernelFn::features(double x) const {
    require_nonzero(x, "kernel", "x");
    return features_ ? features_(x) : Features{};
}

double KernelFn::pair(double x, const Features& fx, double y, const Features& fy) const { return pair_(x, fx, y, fy); }

double KernelFn::diag(double x, const Features& fx) const { return diag_(x, fx); }

double KernelFn::operator()(double x, double y) const {
    require_nonzero(x, "kernel", "x");
    require_nonzero(y, "kernel", "y");
    if (x == y) return diag(x);
    return pair_(x, features(x), y, features(y));
}

double KernelFn::diag(double x) const {
    require_nonzero(x, "kernel", "x");
    return diag_(x, features(x));
}

KernelFn zero_kernel(Singularity sing) {
    return KernelFn(
        nullptr, [](double, const Features&, double, const Features&) { return 0.0; },
        [](double, const Features&) { return 0.0; }, sing, "zero");
}

KernelFn whittaker_kernel(const KernelParams& params, const AccuracySpec& acc) {
    // Features at x: P, Q and their derivatives in |x|, on the side of sgn(x).
    auto features = [params, acc](double x) -> Features {
        const Side side = x > 0.0 ? Side::plus : Side::minus;
        const double u = std::abs(x);
        const PQ c = pq_functions(params, side, u, acc);
        if (u < 1e-6) return {c.p, c.q, std::nan(""), std::nan("")};
        const double h = std::min(diagonal_step(u), 0.5 * u);
        const PQ r = pq_functions(params, side, u + h, acc);
        const PQ l = pq_functions(params, side, u - h, acc);
        return {c.p, c.q, (r.p - l.p) / (2 * h), (r.q - l.q) / (2 * h)};
    };
    auto pair = [](double x, const Features& fx, double y, const Features& fy) {
        if (x > 0.0 && y > 0.0) return (fx[0] * fy[1] - fx[1] * fy[0]) / (x - y);
        if (x < 0.0 && y < 0.0) return (fx[0] * fy[1] - fx[1] * fy[0]) / (y - x);
        return (fx[0] * fy[0] + fx[1] * fy[1]) / (x - y);
    };
    auto diag = [](double x, const Features& fx) {
        if (std::abs(x) < 1e-6) {
            std::ostringstream os;
            os << "whittaker kernel diagonal refused at |x| = " << std::abs(x) << " < 1e-6";
            throw DomainError(os.str());
        }
        return fx[2] * fx[1] - fx[3] * fx[0];
    };
    return KernelFn(features, pair, diag, Singularity::origin, "whittaker");
}

namespace {

KernelFn invert(const KernelFn& k, Singularity target, const char* suffix) {
    auto features = [k](double x) { return k.features(1.0 / x); };
    auto pair = [k](double x, const Features& fx, double y, const Features& fy) {
        return k.pair(1.0 / x, fx, 1.0 / y, fy) / std::abs(x * y);
    };
    auto diag = [k](double x, const Features& fx) { return k.diag(1.0 / x, fx) / (x * x); };
    return KernelFn(features, pair, diag, target, k.name() + suffix);
}

}  // namespace

KernelFn transform_to_infinity(const KernelFn& k) {
    if (k.singularity() != Singularity::origin)
        throw DomainError("transform_to_infinity: kernel singularity is not at the origin");
    return invert(k, Singularity::infinity, "@inf");
}

KernelFn transform_to_origin(const KernelFn& k) {
    if (k.singularity() != Singularity::infinity)
        throw DomainError("transform_to_origin: kernel singularity is not at infinity");
    return invert(k, Singularity::origin, "@0");
}

DecayReport verify_decay(const KernelFn& k, double M, double delta_prime, double box, int samples_per_side) {
    if (k.singularity() != Singularity::infinity)
        throw DomainError("verify_decay: kernel singularity must be at infinity");
    if (!(M > 0.0) || !(delta_prime > 0.0) || !(delta_prime < M / 4.0) || !(box > M))
        throw DomainError("verify_decay: requires 0 < delta' < M/4 and box > M");

    auto sample = [&](double offset) {
        std::vector<double> pts;
        const int n = samples_per_side;
        for (int i = 0; i < n; ++i) {
            const double t = (i + offset) / n;
            const double r = M + (box - M) * t;
            pts.push_back(r);
            pts.push_back(-r);
        }
        std::sort(pts.begin(), pts.end());
        return pts;
    };
    auto squared_values = [&](const std::vector<double>& pts, auto&& visit) {
        std::vector<Features> f(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) f[i] = k.features(pts[i]);
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = 0; j < pts.size(); ++j) {
                const double v = i == j ? k.diag(pts[i], f[i]) : k.pair(pts[i], f[i], pts[j], f[j]);
                visit(pts[i] - pts[j], v * v);
            }
    };

    DecayReport rep;
    rep.M = M;
    rep.delta_prime = delta_prime;
    double c2 = 0.0, cp2 = 0.0;
    squared_values(sample(0.0), [&](double t, double v2) {
        if (std::abs(t) <= delta_prime) cp2 = std::max(cp2, v2);
        if (std::abs(t) >= delta_prime) c2 = std::max(c2, v2 * t * t);
    });
    // Small safety margin so the fitted envelope is an envelope off the fitting sample.
    rep.C = 1.1 * std::sqrt(c2);
    rep.C_prime = 1.1 * std::sqrt(std::max(cp2, c2 / (delta_prime * delta_prime)));
    squared_values(sample(0.5), [&](double t, double v2) {
        const double phi = std::abs(t) <= delta_prime ? rep.C_prime * rep.C_prime : rep.C * rep.C / (t * t);
        rep.max_violation = std::max(rep.max_violation, v2 - phi);
        ++rep.pairs_checked;
    });
    auto tail = [&](double R) { return R >= delta_prime ? 2.0 * rep.C * rep.C / R : 0.0; };
    const double t2 = tail(rep.tail_R2);
    rep.tail_ratio = t2 > 0.0 ? tail(rep.tail_R1) / t2 : 2.0;
    return rep;
}

AFunction::AFunction(std::function<double(double)> a, std::string name) : a_(std::move(a)), name_(std::move(name)) {}

double AFunction::operator()(double x) const {
    require_nonzero(x, "A-function", "x");
    return a_(x);
}

AFunction whittaker_a(const KernelParams& params) {
    if (!params.l_admissible) throw DomainError("whittaker_a: requires |z + z'| < 1");
    const double pi = std::numbers::pi;
    const double prod = (detail::sin_pi(params.z) * detail::sin_pi(params.zp)).real();
    if (prod < 0.0) throw DomainError("whittaker_a: sin(pi z) sin(pi z') < 0");
    const double amp = std::sqrt(prod) / pi;
    const double s = params.s();
    return AFunction([amp, s](double x) { return amp * std::pow(std::abs(x), sgn(x) * s / 2.0) * std::exp(-std::abs(x) / 2.0); },
                     "whittaker_a");
}

KernelFn l_kernel(const AFunction& a) {
    auto features = [a](double x) -> Features { return {a.plus(x), a.minus(x), 0.0, 0.0}; };
    auto pair = [](double x, const Features& fx, double y, const Features& fy) {
        return (fx[0] * fy[1] + fx[1] * fy[0]) / (x - y);
    };
    auto diag = [](double, const Features&) { return 0.0; };
    return KernelFn(features, pair, diag, Singularity::origin, "L[" + a.name() + "]");
}

PalmAnchor PalmAnchor::make(std::vector<double> p_plus, std::vector<double> p_minus) {
    if (p_plus.size() != p_minus.size()) throw DomainError("PalmAnchor: p_plus and p_minus must have equal size");
    for (double p : p_plus)
        if (!(p > 0.0)) throw DomainError("PalmAnchor: p_plus entries must be positive");
    for (double p : p_minus)
        if (!(p < 0.0)) throw DomainError("PalmAnchor: p_minus entries must be negative");
    auto distinct = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return std::adjacent_find(v.begin(), v.end()) == v.end();
    };
    if (!distinct(p_plus) || !distinct(p_minus)) throw DomainError("PalmAnchor: points must be distinct");
    return PalmAnchor{std::move(p_plus), std::move(p_minus)};
}

double PalmAnchor::lambda() const {
    double num = 1.0, den = 1.0;
    for (double p : p_minus) num *= std::abs(p);
    for (double p : p_plus) den *= p;
    return num / den;
}

ConditioningFunctions conditioning_functions(const PalmAnchor& p) {
    const double lam = p.lambda();
    ConditioningFunctions cf;
    cf.c = [lam](double x) {
        require_nonzero(x, "c_lambda", "x");
        return x > 0.0 ? lam : 1.0 / lam;
    };
    cf.g = [p](double x) {
        require_nonzero(x, "g_p", "x");
        double v = 1.0;
        for (std::size_t i = 0; i < p.n(); ++i)
            v *= x > 0.0 ? (x - p.p_plus[i]) / (x - p.p_minus[i]) : (x - p.p_minus[i]) / (x - p.p_plus[i]);
        return v;
    };
    cf.f = [p](double x) {
        require_nonzero(x, "f_p", "x");
        double v = 1.0;
        for (std::size_t i = 0; i < p.n(); ++i)
            v *= x > 0.0 ? (x / p.p_plus[i] - 1.0) / (x / p.p_minus[i] - 1.0)
                         : (x / p.p_minus[i] - 1.0) / (x / p.p_plus[i] - 1.0);
        return v;
    };
    cf.h = [g = cf.g, c = cf.c](double x) { return c(x) * std::abs(g(x)); };
    return cf;
}

}  // namespace jdpp
