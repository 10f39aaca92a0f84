#pragma once

#include <cstddef>
#include <vector>

namespace jdpp {

using Index = std::ptrdiff_t;

enum class GridScheme { uniform, gauss_legendre_panels };
enum class PanelSpacing { linear, geometric };

struct GridSpec {
    GridScheme scheme = GridScheme::gauss_legendre_panels;
    int nodes_per_side = 20;
    double delta = 0.05;  // inner edge of each half-line
    double outer = 20.0;  // outer edge of each half-line
    int panels = 4;
    PanelSpacing spacing = PanelSpacing::geometric;
};

// Nodes on the punctured line. Canonical order: positive nodes by increasing
// |x|, then negative nodes by increasing |x|.
class Grid {
public:
    Grid() = default;
    // Any order accepted; validated and sorted into canonical order.
    static Grid from_nodes(std::vector<double> nodes, std::vector<double> weights, double delta = 0.0,
                           GridScheme scheme = GridScheme::uniform);
    // Positive and negative side with n_plus and n_minus placeholder nodes,
    // unit weights. For tests of block algebra.
    static Grid synthetic(int n_plus, int n_minus);

    std::size_t size() const { return nodes_.size(); }
    Index n_plus() const { return n_plus_; }
    Index n_minus() const { return Index(nodes_.size()) - n_plus_; }
    double node(Index i) const { return nodes_[std::size_t(i)]; }
    double weight(Index i) const { return weights_[std::size_t(i)]; }
    double sign(Index i) const { return i < n_plus_ ? 1.0 : -1.0; }
    bool positive(Index i) const { return i < n_plus_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    double delta() const { return delta_; }
    GridScheme scheme() const { return scheme_; }

    // x -> 1/x with weights w / x^2; perm[i] is the source index of new node i.
    Grid inverted(std::vector<Index>* perm = nullptr) const;
    // Nearest node on the same half-line as x.
    Index nearest(double x) const;

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
    Index n_plus_ = 0;
    double delta_ = 0.0;
    GridScheme scheme_ = GridScheme::uniform;
};

Grid build_grid(const GridSpec& spec);

}  // namespace jdpp
