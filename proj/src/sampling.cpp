#include "jdpp/sampling.hpp"

#include "jdpp/errors.hpp"
#include "jdpp/opalg.hpp"
#include "jdpp/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace jdpp {

bool Configuration::contains(Index i) const { return std::binary_search(points.begin(), points.end(), i); }

std::size_t Configuration::count_in(const Grid& grid, const Box& box) const {
    return std::size_t(std::count_if(points.begin(), points.end(), [&](Index i) { return box.contains(grid.node(i)); }));
}

long Configuration::signed_count(const Grid& grid, const Box& box) const {
    long c = 0;
    for (Index i : points)
        if (box.contains(grid.node(i))) c += grid.positive(i) ? 1 : -1;
    return c;
}

long Configuration::signed_count(const Grid& grid) const {
    long c = 0;
    for (Index i : points) c += grid.positive(i) ? 1 : -1;
    return c;
}

void write_sample_batch(std::ostream& os, const SampleBatch& batch) {
    os << "# jdpp sample batch v1\n";
    os << "# seed " << batch.seed << "\n";
    os << "# fingerprint " << std::hex << std::setw(16) << std::setfill('0') << batch.fingerprint << std::dec
       << std::setfill(' ') << "\n";
    os << "# count " << batch.configurations.size() << "\n";
    for (const Configuration& c : batch.configurations) {
        for (std::size_t k = 0; k < c.points.size(); ++k) os << (k ? " " : "") << c.points[k];
        os << "\n";
    }
}

SampleBatch read_sample_batch(std::istream& is) {
    SampleBatch b;
    std::string line;
    std::size_t count = 0;
    bool have_count = false;
    while (!have_count && std::getline(is, line)) {
        if (line.rfind("# ", 0) != 0) throw ConfigError("sample batch: missing header");
        std::istringstream ls(line.substr(2));
        std::string key;
        ls >> key;
        if (key == "seed") ls >> b.seed;
        else if (key == "fingerprint") ls >> std::hex >> b.fingerprint;
        else if (key == "count") {
            ls >> count;
            have_count = true;
        }
    }
    if (!have_count) throw ConfigError("sample batch: missing count header");
    for (std::size_t k = 0; k < count; ++k) {
        if (!std::getline(is, line)) throw ConfigError("sample batch: fewer configurations than announced");
        Configuration c;
        std::istringstream ls(line);
        Index v;
        while (ls >> v) c.points.push_back(v);
        if (!std::is_sorted(c.points.begin(), c.points.end()) ||
            std::adjacent_find(c.points.begin(), c.points.end()) != c.points.end())
            throw ConfigError("sample batch: configuration is not a sorted simple set");
        b.configurations.push_back(std::move(c));
    }
    return b;
}

EnumerationTable enumerate_l_ensemble(const OperatorMatrix& L) {
    const Index n = L.size();
    if (n > kMaxEnumerationNodes) {
        std::ostringstream os;
        os << "enumerate_l_ensemble: " << n << " nodes exceeds the limit of " << kMaxEnumerationNodes;
        throw SizeError(os.str());
    }
    const double z = fredholm_det(L);
    if (!(std::abs(z) > 1e-300)) throw SingularError("enumerate_l_ensemble: det(1 + L) = 0");
    EnumerationTable t;
    t.n = n;
    const std::uint32_t subsets = 1u << n;
    t.probability.assign(subsets, 0.0);
    std::vector<double> raw(subsets, 0.0);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t s = 0; s < std::int64_t(subsets); ++s) {
        std::vector<Index> idx;
        for (Index i = 0; i < n; ++i)
            if (s & (std::int64_t(1) << i)) idx.push_back(i);
        double d = 1.0;
        if (!idx.empty()) {
            Eigen::MatrixXd sub(Index(idx.size()), Index(idx.size()));
            for (std::size_t a = 0; a < idx.size(); ++a)
                for (std::size_t b = 0; b < idx.size(); ++b) sub(Index(a), Index(b)) = L.entries()(idx[a], idx[b]);
            d = sub.partialPivLu().determinant();
        }
        raw[std::size_t(s)] = d / z;
    }
    for (std::uint32_t s = 0; s < subsets; ++s) {
        t.raw_sum += raw[s];
        t.min_raw = std::min(t.min_raw, raw[s]);
        t.probability[s] = std::max(0.0, raw[s]);
    }
    return t;
}

DualSampler::DualSampler(const OperatorMatrix& K) : n_plus_(K.grid().n_plus()) {
    const Eigen::MatrixXd h = hat_k(K).entries();
    const Eigen::MatrixXd sym = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) throw SpectrumError("sample_dual: eigendecomposition failed");
    lambda_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
    for (Index i = 0; i < lambda_.size(); ++i) {
        const double l = lambda_(i);
        if (l < -kSpectrumBand || l > 1.0 + kSpectrumBand) {
            std::ostringstream os;
            os << "sample_dual: eigenvalue " << l << " of the dual kernel lies outside [-0.05, 1.05]";
            throw SpectrumError(os.str());
        }
        const double c = std::clamp(l, 0.0, 1.0);
        clipped_ = std::max(clipped_, std::abs(c - l));
        lambda_(i) = c;
    }
}

Configuration DualSampler::draw(std::uint64_t seed, std::uint64_t index) const {
    Stream rng(seed, index);
    const Index n = vectors_.rows();
    std::vector<Index> chosen;
    for (Index i = 0; i < lambda_.size(); ++i)
        if (rng.uniform() < lambda_(i)) chosen.push_back(i);
    Index t = Index(chosen.size());
    Eigen::MatrixXd q(n, t);
    for (Index c = 0; c < t; ++c) q.col(c) = vectors_.col(chosen[std::size_t(c)]);
    Eigen::VectorXd norms = q.rowwise().squaredNorm();

    std::vector<Index> y;
    while (t > 0) {
        // Pick a node with probability proportional to its squared row norm.
        const double total = norms.head(n).sum();
        double u = rng.uniform() * total;
        Index pick = n - 1;
        for (Index i = 0; i < n; ++i) {
            u -= norms(i);
            if (u < 0.0) {
                pick = i;
                break;
            }
        }
        y.push_back(pick);
        if (t == 1) break;
        // Householder rotation sending row `pick` onto the first column, then drop it.
        Eigen::VectorXd v = q.row(pick).head(t).transpose();
        const double r = v.norm();
        v(0) += v(0) >= 0.0 ? r : -r;
        const double vv = v.squaredNorm();
        if (vv > 0.0) {
            const Eigen::VectorXd qv = q.leftCols(t) * v;
            q.leftCols(t).noalias() -= (2.0 / vv) * qv * v.transpose();
        }
        norms -= q.col(0).cwiseAbs2();
        norms = norms.cwiseMax(0.0);
        norms(pick) = 0.0;
        q.leftCols(t - 1) = q.middleCols(1, t - 1).eval();
        --t;
    }
    std::sort(y.begin(), y.end());

    Configuration x;
    std::size_t k = 0;
    for (Index i = 0; i < n; ++i) {
        const bool in_y = k < y.size() && y[k] == i;
        if (in_y) ++k;
        if (i < n_plus_ ? in_y : !in_y) x.points.push_back(i);
    }
    return x;
}

namespace {

SampleBatch run_batch(const OperatorMatrix& K, std::size_t n, std::uint64_t seed, bool parallel,
                      std::uint64_t fingerprint) {
    const DualSampler sampler(K);
    SampleBatch b;
    b.seed = seed;
    b.fingerprint = fingerprint;
    b.configurations.resize(n);
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (std::int64_t i = 0; i < std::int64_t(n); ++i)
        slot.run([&] { b.configurations[std::size_t(i)] = sampler.draw(seed, std::uint64_t(i)); });
    slot.rethrow();
    return b;
}

}  // namespace

SampleBatch sample_dual_k(const OperatorMatrix& K, std::size_t n, std::uint64_t seed) {
    return run_batch(K, n, seed, true, K.fingerprint());
}

SampleBatch sample_dual_k_serial(const OperatorMatrix& K, std::size_t n, std::uint64_t seed) {
    return run_batch(K, n, seed, false, K.fingerprint());
}

SampleBatch sample_dual(const OperatorMatrix& L, std::size_t n, std::uint64_t seed) {
    return run_batch(k_from_l(L), n, seed, true, L.fingerprint());
}

MomentReport estimate_correlations(const SampleBatch& batch, const std::vector<Box>& boxes, const OperatorMatrix& K) {
    for (std::size_t a = 0; a < boxes.size(); ++a)
        for (std::size_t b = a + 1; b < boxes.size(); ++b)
            if (boxes[a].lo <= boxes[b].hi && boxes[b].lo <= boxes[a].hi)
                throw DomainError("estimate_correlations: boxes must be disjoint");
    MomentReport rep;
    rep.samples = batch.configurations.size();
    if (rep.samples < 2) {
        rep.insufficient_data = true;
        return rep;
    }
    const Grid& grid = K.grid();
    const Eigen::MatrixXd& m = K.entries();
    std::vector<std::vector<Index>> members(boxes.size());
    for (std::size_t b = 0; b < boxes.size(); ++b)
        for (Index i = 0; i < K.size(); ++i)
            if (boxes[b].contains(grid.node(i))) members[b].push_back(i);

    std::vector<std::vector<double>> counts(boxes.size(), std::vector<double>(rep.samples));
    for (std::size_t s = 0; s < rep.samples; ++s)
        for (std::size_t b = 0; b < boxes.size(); ++b)
            counts[b][s] = double(batch.configurations[s].count_in(grid, boxes[b]));

    const double ns = double(rep.samples);
    auto mean_se = [ns](const std::vector<double>& v) {
        double mu = 0.0;
        for (double x : v) mu += x;
        mu /= ns;
        double var = 0.0;
        for (double x : v) var += (x - mu) * (x - mu);
        var /= (ns - 1.0);
        return std::pair<double, double>(mu, std::sqrt(var / ns));
    };
    auto z = [](double emp, double pred, double se) {
        if (se > 0.0) return std::abs(emp - pred) / se;
        return std::abs(emp - pred) > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
    };
    for (std::size_t b = 0; b < boxes.size(); ++b) {
        BoxMoment bm;
        bm.box = boxes[b];
        std::tie(bm.mean, bm.stderr_) = mean_se(counts[b]);
        for (Index i : members[b]) bm.predicted += m(i, i);
        rep.max_z = std::max(rep.max_z, z(bm.mean, bm.predicted, bm.stderr_));
        rep.single.push_back(bm);
    }
    for (std::size_t a = 0; a < boxes.size(); ++a)
        for (std::size_t b = a + 1; b < boxes.size(); ++b) {
            JointMoment jm;
            jm.first = a;
            jm.second = b;
            std::vector<double> prod(rep.samples);
            for (std::size_t s = 0; s < rep.samples; ++s) prod[s] = counts[a][s] * counts[b][s];
            std::tie(jm.mean, jm.stderr_) = mean_se(prod);
            for (Index i : members[a])
                for (Index j : members[b]) jm.predicted += m(i, i) * m(j, j) - m(i, j) * m(j, i);
            rep.max_z = std::max(rep.max_z, z(jm.mean, jm.predicted, jm.stderr_));
            rep.joint.push_back(jm);
        }
    return rep;
}

}  // namespace jdpp
