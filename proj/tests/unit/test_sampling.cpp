#include "jdpp/errors.hpp"
#include "jdpp/parallel.hpp"
#include "jdpp/sampling.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace jdpp;
using namespace jdpp::testing;

TEST_CASE("enumeration small cases") {
    const auto g = two_point_grid();
    const EnumerationTable z = enumerate_l_ensemble(OperatorMatrix(g, Eigen::Matrix2d::Zero()));
    CHECK(z[0] == 1.0);
    const EnumerationTable t = enumerate_l_ensemble(two_point_l(1.0));
    CHECK(t[0] == doctest::Approx(0.5));
    CHECK(t[3] == doctest::Approx(0.5));
    CHECK(t[1] == 0.0);
    CHECK(t[2] == 0.0);

    auto one = std::make_shared<const Grid>(Grid::from_nodes({2.0, -1.0}, {1.0, 1.0}));
    Eigen::Matrix2d l;
    l << 0.7, 0.0, 0.0, 0.0;
    const EnumerationTable s = enumerate_l_ensemble(OperatorMatrix(one, l));
    CHECK(s[1] == doctest::Approx(0.7 / 1.7));

    const EnumerationTable w = enumerate_l_ensemble(whittaker_l(conjugate_params(), 5, 0.05, 4.0));
    double sum = 0.0;
    for (double p : w.probability) sum += p;
    CHECK(std::abs(sum - 1.0) < 1e-10);
    CHECK(w.min_raw >= -1e-12);

    CHECK_THROWS_AS(enumerate_l_ensemble(whittaker_l(real_params(), 9)), SizeError);
}

TEST_CASE("sampler on the zero kernel returns empty configurations") {
    const OperatorMatrix z(panel_grid(5), Eigen::MatrixXd::Zero(10, 10));
    const SampleBatch b = sample_dual_k(z, 50, 1);
    for (const auto& c : b.configurations) CHECK(c.size() == 0u);
}

TEST_CASE("two-point sampler") {
    const SampleBatch b = sample_dual(two_point_l(1.0), 10000, 42);
    std::size_t both = 0;
    for (const auto& c : b.configurations) {
        CHECK((c.size() == 0u || c.size() == 2u));
        both += c.size() == 2u;
    }
    const double p = double(both) / 1e4;
    CHECK(std::abs(p - 0.5) < 3.0 * std::sqrt(0.25 / 1e4));
}

TEST_CASE("sampler is deterministic and thread independent") {
    const OperatorMatrix L = whittaker_l(dense_params(), 15);
    const OperatorMatrix K = k_from_l(L);
    set_thread_count(1);
    const SampleBatch a = sample_dual_k(K, 300, 9);
    set_thread_count(4);
    const SampleBatch b = sample_dual_k(K, 300, 9);
    set_thread_count(0);
    const SampleBatch c = sample_dual_k_serial(K, 300, 9);
    for (std::size_t i = 0; i < a.configurations.size(); ++i) {
        CHECK(a.configurations[i].points == b.configurations[i].points);
        CHECK(a.configurations[i].points == c.configurations[i].points);
    }
    CHECK(a.fingerprint == K.fingerprint());
    CHECK(sample_dual(L, 3, 9).fingerprint == L.fingerprint());
}

TEST_CASE("sample batch text round trip") {
    const SampleBatch b = sample_dual(whittaker_l(dense_params(), 10), 40, 5);
    std::stringstream ss;
    write_sample_batch(ss, b);
    const SampleBatch r = read_sample_batch(ss);
    CHECK(r.seed == b.seed);
    CHECK(r.fingerprint == b.fingerprint);
    REQUIRE(r.configurations.size() == b.configurations.size());
    for (std::size_t i = 0; i < b.configurations.size(); ++i) CHECK(r.configurations[i].points == b.configurations[i].points);

    std::stringstream bad("garbage\n");
    CHECK_THROWS_AS(read_sample_batch(bad), ConfigError);
}

TEST_CASE("one-point function matches the kernel diagonal") {
    const OperatorMatrix L = whittaker_l(conjugate_params(), 20);
    const OperatorMatrix K = k_from_l(L);
    const SampleBatch b = sample_dual(L, 10000, 77);
    const std::vector<Box> boxes{{0.05, 0.49}, {0.5, 3.0}, {-0.49, -0.05}, {-3.0, -0.5}};
    const MomentReport r = estimate_correlations(b, boxes, K);
    CHECK_FALSE(r.insufficient_data);
    CHECK(r.single.size() == 4u);
    CHECK(r.joint.size() == 6u);
    CHECK(r.max_z < 4.0);
}

TEST_CASE("correlation estimator edge cases") {
    const OperatorMatrix K = k_from_l(two_point_l(1.0));
    const MomentReport e = estimate_correlations(SampleBatch{}, {{0.5, 1.5}}, K);
    CHECK(e.insufficient_data);
    CHECK_THROWS_AS(estimate_correlations(SampleBatch{}, {{0.0, 1.0}, {0.5, 2.0}}, K), DomainError);

    const SampleBatch b = sample_dual(two_point_l(1.0), 10000, 3);
    const MomentReport r = estimate_correlations(b, {{0.5, 1.5}, {-1.5, -0.5}}, K);
    CHECK(r.single[0].predicted == doctest::Approx(0.5));
    CHECK(std::abs(r.single[0].mean - 0.5) < 3.0 * r.single[0].stderr_);
}

TEST_CASE("spectrum guard") {
    // Khat of this K has eigenvalue 2.
    Eigen::Matrix2d k;
    k << 2.0, 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(DualSampler(OperatorMatrix(two_point_grid(), k)), SpectrumError);
}

TEST_CASE("configuration counting") {
    const auto g = two_point_grid();
    Configuration c{{0, 1}};
    CHECK(c.signed_count(*g) == 0);
    CHECK(c.signed_count(*g, {0.0, 2.0}) == 1);
    CHECK(c.count_in(*g, {-2.0, 2.0}) == 2u);
    CHECK(c.contains(1));
}
