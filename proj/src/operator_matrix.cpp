#include "jdpp/operator_matrix.hpp"

#include "jdpp/errors.hpp"

#include <cmath>
#include <cstring>

namespace jdpp {

OperatorMatrix::OperatorMatrix(std::shared_ptr<const Grid> grid, Eigen::MatrixXd entries)
    : grid_(std::move(grid)), m_(std::move(entries)) {
    if (!grid_) throw ConfigError("OperatorMatrix: missing grid");
    if (m_.rows() != m_.cols() || std::size_t(m_.rows()) != grid_->size())
        throw SizeError("OperatorMatrix: dimension must equal the number of grid nodes");
}

Eigen::MatrixXd OperatorMatrix::block(Block b) const {
    const Index p = grid_->n_plus(), n = grid_->n_minus();
    switch (b) {
        case Block::pp: return m_.topLeftCorner(p, p);
        case Block::pm: return m_.topRightCorner(p, n);
        case Block::mp: return m_.bottomLeftCorner(n, p);
        case Block::mm: return m_.bottomRightCorner(n, n);
    }
    return {};
}

double OperatorMatrix::kernel_value(Index i, Index j) const {
    return m_(i, j) / std::sqrt(grid_->weight(i) * grid_->weight(j));
}

OperatorMatrix OperatorMatrix::with_entries(Eigen::MatrixXd entries) const {
    return OperatorMatrix(grid_, std::move(entries));
}

double OperatorMatrix::symmetry_residual() const {
    const Eigen::MatrixXd pp = block(Block::pp), mm = block(Block::mm);
    const Eigen::MatrixXd pm = block(Block::pm), mp = block(Block::mp);
    double r = (pp - pp.transpose()).cwiseAbs().maxCoeff();
    r = std::max(r, (mm - mm.transpose()).cwiseAbs().maxCoeff());
    r = std::max(r, (pm + mp.transpose()).cwiseAbs().maxCoeff());
    return r;
}

std::uint64_t OperatorMatrix::fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    const std::uint64_t n = std::uint64_t(m_.rows());
    mix(&n, sizeof n);
    mix(grid_->nodes().data(), grid_->nodes().size() * sizeof(double));
    mix(grid_->weights().data(), grid_->weights().size() * sizeof(double));
    for (Index i = 0; i < m_.rows(); ++i)
        for (Index j = 0; j < m_.cols(); ++j) {
            const double v = m_(i, j) == 0.0 ? 0.0 : m_(i, j);
            mix(&v, sizeof v);
        }
    return h;
}

Eigen::VectorXd sqrt_weights(const Grid& grid) {
    Eigen::VectorXd s(Index(grid.size()));
    for (Index i = 0; i < s.size(); ++i) s(i) = std::sqrt(grid.weight(i));
    return s;
}

}  // namespace jdpp
