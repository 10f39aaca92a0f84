#include "jdpp/statistics.hpp"

#include "jdpp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace jdpp {

double twisted_statistic(const Grid& grid, const Configuration& X, const Eigen::VectorXd& phi) {
    double s = 0.0;
    for (Index i : X.points) s += grid.sign(i) * phi(i);
    return s;
}

double twisted_mean(const OperatorMatrix& K, const Eigen::VectorXd& phi) {
    const Grid& grid = K.grid();
    double s = 0.0;
    for (Index i = 0; i < K.size(); ++i) s += grid.sign(i) * phi(i) * K.entries()(i, i);
    return s;
}

double variance_analytic(const OperatorMatrix& K, const Eigen::VectorXd& f) {
    const Eigen::MatrixXd& m = K.entries();
    const Index n = K.size();
    double s = 0.0;
    for (Index j = 0; j < n; ++j)
        for (Index i = j + 1; i < n; ++i) {
            const double d = f(i) - f(j);
            s += d * d * m(i, j) * m(i, j);
        }
    return s;  // the pairs i < j carry the factor 1/2
}

double variance_moment_form(const OperatorMatrix& K, const Eigen::VectorXd& f) {
    const Eigen::MatrixXd& m = K.entries();
    const Grid& grid = K.grid();
    const Index n = K.size();
    Eigen::VectorXd sf(n);
    for (Index i = 0; i < n; ++i) sf(i) = grid.sign(i) * f(i);
    double s = 0.0;
    for (Index i = 0; i < n; ++i) s += f(i) * f(i) * m(i, i);
    s -= sf.dot(m.cwiseProduct(m.transpose()) * sf);
    return s;
}

std::vector<double> default_delta_schedule() { return {0.1, 0.05, 0.02, 0.01}; }

namespace {

void check_schedule(const std::vector<double>& schedule) {
    if (schedule.empty()) throw ConfigError("schedule: must not be empty");
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        if (!(schedule[k] > 0.0)) throw ConfigError("schedule: radii must be positive");
        if (k && !(schedule[k] < schedule[k - 1])) throw ConfigError("schedule: radii must decrease");
    }
}

}  // namespace

RegularizedFunctional regularized_additive(const Configuration& X, const Eigen::VectorXd& f, const OperatorMatrix& K,
                                           const std::vector<double>& schedule, DivergencePolicy policy) {
    check_schedule(schedule);
    const Grid& grid = K.grid();
    const Index n = K.size();
    RegularizedFunctional out;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const double delta = schedule[k];
        RegularizedLevel lv;
        lv.delta = delta;
        for (Index i : X.points)
            if (std::abs(grid.node(i)) >= delta) lv.truncated_sum += grid.sign(i) * f(i);
        for (Index i = 0; i < n; ++i)
            if (std::abs(grid.node(i)) >= delta) lv.expectation += grid.sign(i) * f(i) * K.entries()(i, i);
        lv.value = lv.truncated_sum - lv.expectation;
        if (k) {
            const double outer = schedule[k - 1];
            Eigen::VectorXd ring = Eigen::VectorXd::Zero(n);
            for (Index i = 0; i < n; ++i) {
                const double a = std::abs(grid.node(i));
                if (a >= delta && a < outer) ring(i) = f(i);
            }
            lv.annulus_norm = std::sqrt(std::max(0.0, variance_analytic(K, ring)));
        }
        out.levels.push_back(lv);
    }
    // Successive corrections must shrink geometrically; vanishing ones are fine.
    for (std::size_t k = 2; k < out.levels.size(); ++k) {
        const double prev = out.levels[k - 1].annulus_norm;
        const double cur = out.levels[k].annulus_norm;
        if (cur > prev / kCauchyShrink && cur > 1e-14) out.cauchy_stable = false;
    }
    out.value = out.levels.back().value;
    if (!out.cauchy_stable && policy == DivergencePolicy::Throw) {
        std::ostringstream os;
        os << "regularized_additive: truncation corrections do not shrink by " << kCauchyShrink
           << "x across the schedule";
        throw DivergenceError(os.str());
    }
    return out;
}

Eigen::VectorXd s_bar_integrand(const Grid& grid, const PalmAnchor& anchor, std::vector<Index>* zeros) {
    const Index n = Index(grid.size());
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    if (anchor.empty()) return f;
    const auto h = conditioning_functions(anchor).h;
    for (Index i = 0; i < n; ++i) {
        const double v = h(grid.node(i));
        if (v == 0.0) {
            if (zeros) zeros->push_back(i);
            continue;
        }
        f(i) = grid.sign(i) * std::log(v * v);
    }
    return f;
}

double s_bar_p(const Configuration& X, const PalmAnchor& anchor, const OperatorMatrix& K,
               const std::vector<double>& schedule, DivergencePolicy policy) {
    check_schedule(schedule);
    if (anchor.empty()) return 0.0;
    const Grid& grid = K.grid();
    for (Index i : X.points) {
        const double x = grid.node(i);
        const bool hit = grid.positive(i)
                             ? std::find(anchor.p_plus.begin(), anchor.p_plus.end(), x) != anchor.p_plus.end()
                             : std::find(anchor.p_minus.begin(), anchor.p_minus.end(), x) != anchor.p_minus.end();
        if (hit) {
            std::ostringstream os;
            os << "s_bar_p: configuration contains the anchor point " << x;
            throw PoleError(os.str());
        }
    }
    const Eigen::VectorXd f = s_bar_integrand(grid, anchor);
    return regularized_additive(X, f, K, schedule, policy).value;
}

namespace {

double normalizer_at(const OperatorMatrix& K, const Eigen::VectorXd& g, double delta) {
    const Grid& grid = K.grid();
    const std::vector<Index> sub = nodes_with_abs_at_least(grid, delta);
    if (sub.empty()) return 1.0;
    const OperatorMatrix kd = compress(K, sub);
    Eigen::VectorXd gm1(Index(sub.size()));
    double centering = 0.0;
    for (std::size_t a = 0; a < sub.size(); ++a) {
        const Index i = sub[a];
        gm1(Index(a)) = g(i) - 1.0;
        if (g(i) > 0.0) centering += std::log(g(i)) * K.entries()(i, i);
    }
    const Eigen::MatrixXd t = gm1.asDiagonal() * kd.entries();
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(t.rows(), t.cols()) + t);
    const double rcond = lu.rcond();
    if (!(rcond > 1.0 / kSingularCondition)) {
        std::ostringstream os;
        os << "rn_normalizer: 1 + (g - 1) K is numerically singular (rcond " << rcond << ")";
        throw SingularError(os.str());
    }
    const LogDet ld = log_fredholm_det(kd.with_entries(t));
    return ld.sign * std::exp(ld.log_abs - centering);
}

}  // namespace

Normalizer rn_normalizer(const OperatorMatrix& K, const Eigen::VectorXd& g, double delta) {
    if (!(delta > 0.0)) throw ConfigError("rn_normalizer: delta must be positive");
    const Grid& grid = K.grid();
    for (Index i = 0; i < K.size(); ++i)
        if (std::abs(grid.node(i)) >= delta && !(g(i) >= 0.0))
            throw DomainError("rn_normalizer: g must be non-negative on the truncated grid");
    Normalizer out;
    out.value = normalizer_at(K, g, delta);
    out.value_coarse = normalizer_at(K, g, 2.0 * delta);
    out.stable = std::abs(out.value - out.value_coarse) <= kNormalizerStability * std::max(1.0, std::abs(out.value));
    return out;
}

MembershipReport membership_diagnostics(const OperatorMatrix& K, const Eigen::VectorXd& f,
                                        const std::vector<double>& schedule) {
    check_schedule(schedule);
    const Grid& grid = K.grid();
    const Eigen::MatrixXd& m = K.entries();
    const Index n = K.size();
    MembershipReport rep;
    rep.v_norm = variance_analytic(K, f);
    rep.v_finite = std::isfinite(rep.v_norm);
    for (double delta : schedule) {
        MembershipLevel lv;
        lv.delta = delta;
        for (Index i = 0; i < n; ++i) {
            if (std::abs(grid.node(i)) >= delta) {
                lv.summable += f(i) * f(i) * m(i, i);
                continue;
            }
            for (Index j = 0; j < n; ++j)
                if (std::abs(grid.node(j)) >= delta) lv.tail += f(i) * f(i) * m(i, j) * m(i, j);
        }
        rep.summable_finite = rep.summable_finite && std::isfinite(lv.summable);
        rep.levels.push_back(lv);
    }
    for (std::size_t k = 1; k < rep.levels.size(); ++k)
        if (rep.levels[k].tail > rep.levels[k - 1].tail * (1.0 + 1e-12) + 1e-300) rep.tail_to_zero = false;
    if (!std::isfinite(rep.levels.back().tail)) rep.tail_to_zero = false;

    rep.g_inf = std::numeric_limits<double>::infinity();
    rep.g_sup = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double g = std::exp(f(i));
        rep.g_inf = std::min(rep.g_inf, g);
        rep.g_sup = std::max(rep.g_sup, g);
        rep.g_l2 += (g - 1.0) * (g - 1.0) * m(i, i);
    }
    if (n == 0) rep.g_inf = rep.g_sup = 1.0;
    rep.m2_bounds = rep.g_inf > 0.0 && std::isfinite(rep.g_sup);
    rep.m2_l2 = std::isfinite(rep.g_l2);
    return rep;
}

}  // namespace jdpp
