#include "jdpp/statistics.hpp"

#include "jdpp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace jdpp {

long round_ties_to_zero(double x) {
    const double fl = std::floor(x);
    const double frac = x - fl;
    if (frac > 0.5) return long(fl) + 1;
    if (frac < 0.5) return long(fl);
    return x > 0.0 ? long(fl) : long(fl) + 1;
}

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
    double var_stderr = 0.0;
    double mean_stderr = 0.0;
};

// Values are reduced in index order so results do not depend on the thread count.
Moments moments(const std::vector<double>& v) {
    Moments m;
    const double n = double(v.size());
    if (v.empty()) return m;
    m.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : v) {
        const double d = (x - m.mean) * (x - m.mean);
        m2 += d;
        m4 += d * d;
    }
    if (v.size() > 1) {
        m.var = m2 / (n - 1.0);
        m.mean_stderr = std::sqrt(m.var / n);
        const double pop = m2 / n;
        m.var_stderr = std::sqrt(std::max(0.0, m4 / n - pop * pop) / n);
    }
    return m;
}

double rel(double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale > 0.0 ? std::abs(x - y) / scale : 0.0;
}

}  // namespace

RigidityReport rigidity_experiment(const OperatorMatrix& K, const RigidityConfig& config) {
    if (!(config.R > 0.0)) throw ConfigError("experiment.R: must be positive");
    if (config.levels.empty()) throw ConfigError("experiment.levels: must not be empty");
    const Grid& grid = K.grid();
    const SampleBatch batch = sample_dual_k(K, config.samples, config.seed);
    const Box window{-config.R, config.R};

    RigidityReport rep;
    rep.R = config.R;
    rep.samples = batch.configurations.size();
    for (int n : config.levels) {
        const Mollifier mol = mollifier(n, config.R, config.decay, K);
        RigidityLevel lv;
        lv.n = n;
        lv.diagnostics = mol.diagnostics;
        lv.variance_analytic = mol.diagnostics.variance;
        lv.expected = twisted_mean(K, mol.phi);

        const std::size_t ns = batch.configurations.size();
        std::vector<double> t(ns);
        std::vector<char> hit(ns);
#pragma omp parallel for schedule(static)
        for (std::size_t s = 0; s < ns; ++s) {
            const Configuration& X = batch.configurations[s];
            double exterior = 0.0;
            for (Index i : X.points)
                if (!window.contains(grid.node(i))) exterior += grid.sign(i) * mol.phi(i);
            t[s] = twisted_statistic(grid, X, mol.phi);
            hit[s] = round_ties_to_zero(lv.expected - exterior) == X.signed_count(grid, window);
        }
        const Moments mt = moments(t);
        lv.variance_empirical = mt.var;
        lv.variance_stderr = mt.var_stderr;
        const std::size_t correct = std::size_t(std::count(hit.begin(), hit.end(), char(1)));
        lv.accuracy = ns ? double(correct) / double(ns) : 1.0;
        rep.levels.push_back(lv);
    }
    for (std::size_t k = 1; k < rep.levels.size(); ++k) {
        const RigidityLevel& a = rep.levels[k - 1];
        const RigidityLevel& b = rep.levels[k];
        if (b.variance_analytic > a.variance_analytic * (1.0 + 1e-12) + 1e-300) rep.variance_monotone = false;
        if (b.accuracy < a.accuracy) rep.accuracy_monotone = false;
    }
    return rep;
}

TestFunction bump_test_function(std::string name, double lo, double hi, double depth, bool both_sides) {
    if (!(lo < hi)) throw ConfigError("bump: requires lo < hi");
    if (lo < 0.0 && hi > 0.0) throw ConfigError("bump: support must avoid the origin");
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    auto bump = [=](double x) {
        const double s = (x - mid) / half;
        return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
    };
    return {std::move(name), [=](double x) { return 1.0 - depth * (bump(x) + (both_sides ? bump(-x) : 0.0)); }};
}

PalmEquivalenceReport palm_equivalence_experiment(const OperatorMatrix& L, const PalmAnchor& anchor,
                                                  const std::vector<TestFunction>& h_tests, std::size_t samples,
                                                  std::uint64_t seed, const std::vector<double>& schedule) {
    if (schedule.empty()) throw ConfigError("schedule: must not be empty");
    const Grid& grid = L.grid();
    const Index size = L.size();
    const OperatorMatrix K = k_from_l(L);

    PalmEquivalenceReport rep;
    rep.samples = samples;
    rep.delta = schedule.back();
    Eigen::VectorXd hp = Eigen::VectorXd::Ones(size);
    if (!anchor.empty()) {
        rep.anchor_nodes = snap_anchor(grid, anchor);
        rep.anchor = snapped_anchor(grid, anchor);
        hp = node_values(grid, conditioning_functions(rep.anchor).h);
    }
    const PalmResult palm = palm_iterate(K, rep.anchor_nodes);
    rep.skipped = palm.skipped;
    const Eigen::VectorXd h2 = hp.cwiseProduct(hp);
    rep.normalizer = rn_normalizer(K, h2, rep.delta);

    // exp(S_p) / normalizer per sample; the centering is shared, so only the
    // truncated sum varies.
    const Eigen::VectorXd f = s_bar_integrand(grid, rep.anchor);
    const RegularizedFunctional centered = regularized_additive(Configuration{}, f, K, schedule, DivergencePolicy::Report);
    rep.cauchy_stable = centered.cauchy_stable;
    const double centering = -centered.value;

    const SampleBatch batch = sample_dual(L, samples, seed);
    const std::size_t ns = batch.configurations.size();
    std::vector<double> w(ns, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t s = 0; s < ns; ++s) {
        const Configuration& X = batch.configurations[s];
        bool on_anchor = false;
        double sum = 0.0;
        for (Index i : X.points) {
            if (h2(i) == 0.0) on_anchor = true;
            if (std::abs(grid.node(i)) >= rep.delta) sum += grid.sign(i) * f(i);
        }
        w[s] = on_anchor ? 0.0 : std::exp(sum - centering) / rep.normalizer.value;
    }
    const Moments mw = moments(w);
    rep.normalizer_empirical = mw.mean * rep.normalizer.value;
    double w2 = 0.0;
    for (double x : w) w2 += x * x;
    rep.weight_ess = w2 > 0.0 ? mw.mean * mw.mean * double(ns) * double(ns) / w2 : 0.0;

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(size);
    const double det_g = fredholm_det(scale(h2 - ones, K, ones));
    for (const TestFunction& test : h_tests) {
        PalmRoutes r;
        r.name = test.name;
        const Eigen::VectorXd hv = node_values(grid, test.h);
        r.palm_kernel = fredholm_det(scale(hv - ones, palm.kernel, ones));
        r.ratio = fredholm_det(scale(hv.cwiseProduct(h2) - ones, K, ones)) / det_g;

        std::vector<double> v(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            double psi = 1.0;
            for (Index i : batch.configurations[s].points) psi *= hv(i);
            v[s] = w[s] * psi;
        }
        const Moments mv = moments(v);
        r.reweighted = mv.mean;
        r.reweighted_stderr = mv.mean_stderr;
        r.self_normalized = mw.mean > 0.0 ? mv.mean / mw.mean : std::numeric_limits<double>::quiet_NaN();
        r.rel_ab = rel(r.palm_kernel, r.ratio);
        r.rel_ac = rel(r.palm_kernel, r.reweighted);
        r.rel_bc = rel(r.ratio, r.reweighted);
        const double gap = std::abs(r.reweighted - r.palm_kernel);
        r.z_ac = r.reweighted_stderr > 0.0 ? gap / r.reweighted_stderr
                                           : (gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        rep.routes.push_back(r);
    }
    return rep;
}

}  // namespace jdpp
