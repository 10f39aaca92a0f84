#include "jdpp/grid.hpp"

#include "jdpp/errors.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace jdpp {

namespace {

// Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.clear();
    w.clear();
    const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
    for (double z : zeros) {
        const double dp = boost::math::legendre_p_prime<double>(n, z);
        const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x.push_back(z);
        w.push_back(wt);
        if (z != 0.0) {
            x.push_back(-z);
            w.push_back(wt);
        }
    }
}

}  // namespace

Grid Grid::from_nodes(std::vector<double> nodes, std::vector<double> weights, double delta, GridScheme scheme) {
    if (nodes.size() != weights.size()) throw ConfigError("grid: nodes and weights differ in length");
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] == 0.0 || !std::isfinite(nodes[i])) throw ConfigError("grid: nodes must be finite and nonzero");
        if (!(weights[i] > 0.0)) throw ConfigError("grid: weights must be positive");
        if (std::abs(nodes[i]) < delta) throw ConfigError("grid: node inside the excluded zone");
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const bool pa = nodes[a] > 0.0, pb = nodes[b] > 0.0;
        if (pa != pb) return pa;
        return std::abs(nodes[a]) < std::abs(nodes[b]);
    });
    Grid g;
    g.delta_ = delta;
    g.scheme_ = scheme;
    for (std::size_t k : order) {
        g.nodes_.push_back(nodes[k]);
        g.weights_.push_back(weights[k]);
    }
    g.n_plus_ = std::count_if(g.nodes_.begin(), g.nodes_.end(), [](double v) { return v > 0.0; });
    if (g.n_plus_ == 0 || g.n_minus() == 0) throw ConfigError("grid: both sign classes must be nonempty");
    for (std::size_t i = 1; i < g.nodes_.size(); ++i) {
        if (Index(i) == g.n_plus_) continue;
        if (!(std::abs(g.nodes_[i]) > std::abs(g.nodes_[i - 1]))) throw ConfigError("grid: repeated node");
    }
    return g;
}

Grid Grid::synthetic(int n_plus, int n_minus) {
    std::vector<double> x, w;
    for (int i = 1; i <= n_plus; ++i) x.push_back(double(i));
    for (int i = 1; i <= n_minus; ++i) x.push_back(-double(i));
    w.assign(x.size(), 1.0);
    return from_nodes(x, w);
}

Grid Grid::inverted(std::vector<Index>* perm) const {
    Grid g;
    g.scheme_ = scheme_;
    g.delta_ = 0.0;
    std::vector<Index> src;
    for (Index i = n_plus_ - 1; i >= 0; --i) src.push_back(i);
    for (Index i = Index(size()) - 1; i >= n_plus_; --i) src.push_back(i);
    for (Index s : src) {
        const double x = nodes_[std::size_t(s)];
        g.nodes_.push_back(1.0 / x);
        g.weights_.push_back(weights_[std::size_t(s)] / (x * x));
    }
    g.n_plus_ = n_plus_;
    if (perm) *perm = src;
    return g;
}

Index Grid::nearest(double x) const {
    if (x == 0.0) throw DomainError("grid: cannot snap x = 0");
    const Index lo = x > 0.0 ? 0 : n_plus_;
    const Index hi = x > 0.0 ? n_plus_ : Index(size());
    Index best = lo;
    for (Index i = lo; i < hi; ++i)
        if (std::abs(nodes_[std::size_t(i)] - x) < std::abs(nodes_[std::size_t(best)] - x)) best = i;
    return best;
}

Grid build_grid(const GridSpec& spec) {
    if (spec.nodes_per_side < 1) throw ConfigError("grid.nodes_per_side: each side needs at least one node");
    if (!(spec.delta > 0.0)) throw ConfigError("grid.delta: must be positive");
    if (!(spec.outer > spec.delta)) throw ConfigError("grid.outer: must exceed delta");
    std::vector<double> half_x, half_w;
    if (spec.scheme == GridScheme::uniform) {
        const double h = (spec.outer - spec.delta) / spec.nodes_per_side;
        for (int i = 0; i < spec.nodes_per_side; ++i) {
            half_x.push_back(spec.delta + (i + 0.5) * h);
            half_w.push_back(h);
        }
    } else {
        if (spec.panels < 1 || spec.nodes_per_side % spec.panels != 0) {
            std::ostringstream os;
            os << "grid.panels: nodes_per_side (" << spec.nodes_per_side << ") must be a positive multiple of panels ("
               << spec.panels << ")";
            throw ConfigError(os.str());
        }
        const int per = spec.nodes_per_side / spec.panels;
        std::vector<double> gx, gw;
        gauss_legendre(per, gx, gw);
        for (int p = 0; p < spec.panels; ++p) {
            double a, b;
            if (spec.spacing == PanelSpacing::geometric) {
                const double r = spec.outer / spec.delta;
                a = spec.delta * std::pow(r, double(p) / spec.panels);
                b = spec.delta * std::pow(r, double(p + 1) / spec.panels);
            } else {
                const double h = (spec.outer - spec.delta) / spec.panels;
                a = spec.delta + p * h;
                b = a + h;
            }
            for (std::size_t k = 0; k < gx.size(); ++k) {
                half_x.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[k]);
                half_w.push_back(0.5 * (b - a) * gw[k]);
            }
        }
    }
    std::vector<double> x, w;
    for (std::size_t i = 0; i < half_x.size(); ++i) {
        x.push_back(half_x[i]);
        w.push_back(half_w[i]);
        x.push_back(-half_x[i]);
        w.push_back(half_w[i]);
    }
    return Grid::from_nodes(x, w, spec.delta, spec.scheme);
}

}  // namespace jdpp
