#pragma once

#include "jdpp/operator_matrix.hpp"
#include "jdpp/rng.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace jdpp {

// Closed coordinate interval [lo, hi].
struct Box {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct Configuration {
    std::vector<Index> points;  // sorted node indices

    std::size_t size() const { return points.size(); }
    bool contains(Index i) const;
    std::size_t count_in(const Grid& grid, const Box& box) const;
    // #(box and R+) - #(box and R-)
    long signed_count(const Grid& grid, const Box& box) const;
    long signed_count(const Grid& grid) const;
};

struct SampleBatch {
    std::vector<Configuration> configurations;
    std::uint64_t seed = 0;
    std::uint64_t fingerprint = 0;
};

void write_sample_batch(std::ostream& os, const SampleBatch& batch);
SampleBatch read_sample_batch(std::istream& is);

struct EnumerationTable {
    Index n = 0;
    std::vector<double> probability;  // indexed by subset bitmask
    double raw_sum = 0.0;             // before normalization by det(1 + L)
    double min_raw = 0.0;             // most negative probability before clipping

    double operator[](std::uint32_t mask) const { return probability[mask]; }
};

constexpr Index kMaxEnumerationNodes = 16;

EnumerationTable enumerate_l_ensemble(const OperatorMatrix& L);

constexpr double kSpectrumBand = 0.05;

// Spectral sampler for the Hermitian dual Khat, with particle-hole dualization
// on the negative half-line.
class DualSampler {
public:
    explicit DualSampler(const OperatorMatrix& K);

    Configuration draw(std::uint64_t seed, std::uint64_t index) const;
    const Eigen::VectorXd& eigenvalues() const { return lambda_; }
    double clipped_mass() const { return clipped_; }

private:
    Index n_plus_ = 0;
    Eigen::MatrixXd vectors_;
    Eigen::VectorXd lambda_;
    double clipped_ = 0.0;
};

// Samples the process with correlation kernel K.
SampleBatch sample_dual_k(const OperatorMatrix& K, std::size_t n, std::uint64_t seed);
SampleBatch sample_dual_k_serial(const OperatorMatrix& K, std::size_t n, std::uint64_t seed);
// Samples the L-process: K = L (1 + L)^{-1}.
SampleBatch sample_dual(const OperatorMatrix& L, std::size_t n, std::uint64_t seed);

struct BoxMoment {
    Box box;
    double mean = 0.0;
    double stderr_ = 0.0;
    double predicted = 0.0;
};

struct JointMoment {
    std::size_t first = 0;
    std::size_t second = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double predicted = 0.0;
};

struct MomentReport {
    bool insufficient_data = false;
    std::size_t samples = 0;
    std::vector<BoxMoment> single;
    std::vector<JointMoment> joint;
    // max |empirical - predicted| / stderr over all moments with stderr > 0
    double max_z = 0.0;
};

MomentReport estimate_correlations(const SampleBatch& batch, const std::vector<Box>& boxes, const OperatorMatrix& K);

}  // namespace jdpp
