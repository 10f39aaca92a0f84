#pragma once

#include "jdpp/specfun.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace jdpp {

enum class Singularity { origin, infinity };

// Per-point data cached by discretize so that an N x N matrix costs N feature
// evaluations plus N^2 cheap pair combinations.
using Features = std::array<double, 4>;

class KernelFn {
public:
    using FeatureFn = std::function<Features(double)>;
    using PairFn = std::function<double(double, const Features&, double, const Features&)>;
    using DiagFn = std::function<double(double, const Features&)>;

    KernelFn() = default;
    KernelFn(FeatureFn features, PairFn pair, DiagFn diag, Singularity sing, std::string name);

    // Throws DomainError at x = 0 or y = 0.
    double operator()(double x, double y) const;
    double diag(double x) const;

    Features features(double x) const;
    double pair(double x, const Features& fx, double y, const Features& fy) const;
    double diag(double x, const Features& fx) const;

    Singularity singularity() const { return sing_; }
    const std::string& name() const { return name_; }

private:
    FeatureFn features_;
    PairFn pair_;
    DiagFn diag_;
    Singularity sing_ = Singularity::origin;
    std::string name_;
};

KernelFn zero_kernel(Singularity sing = Singularity::origin);

KernelFn whittaker_kernel(const KernelParams& params, const AccuracySpec& acc = {});
// K_new(x, y) = K(1/x, 1/y) / |xy|.
KernelFn transform_to_infinity(const KernelFn& k);
KernelFn transform_to_origin(const KernelFn& k);

struct DecayReport {
    double C = 0.0;
    double C_prime = 0.0;
    double M = 1.0;
    double delta_prime = 0.2;
    double max_violation = 0.0;
    std::size_t pairs_checked = 0;
    double tail_R1 = 10.0;
    double tail_R2 = 20.0;
    double tail_ratio = 0.0;  // int_{|t|>=R1} Phi / int_{|t|>=R2} Phi
};

// Fits C' on |x - y| <= delta' and C on |x - y| >= delta' over |x|, |y| in [M, box].
DecayReport verify_decay(const KernelFn& k, double M, double delta_prime, double box = 40.0, int samples_per_side = 100);

class AFunction {
public:
    AFunction() = default;
    AFunction(std::function<double(double)> a, std::string name);

    double operator()(double x) const;
    double plus(double x) const { return x > 0.0 ? (*this)(x) : 0.0; }
    double minus(double x) const { return x < 0.0 ? (*this)(x) : 0.0; }
    const std::string& name() const { return name_; }

private:
    std::function<double(double)> a_;
    std::string name_;
};

AFunction whittaker_a(const KernelParams& params);
KernelFn l_kernel(const AFunction& a);

struct PalmAnchor {
    std::vector<double> p_plus;
    std::vector<double> p_minus;

    static PalmAnchor make(std::vector<double> p_plus, std::vector<double> p_minus);
    std::size_t n() const { return p_plus.size(); }
    bool empty() const { return p_plus.empty(); }
    double lambda() const;
};

struct ConditioningFunctions {
    std::function<double(double)> g;
    std::function<double(double)> f;
    std::function<double(double)> h;
    std::function<double(double)> c;
};

ConditioningFunctions conditioning_functions(const PalmAnchor& p);

// Central-difference step used for kernel diagonals.
double diagonal_step(double x);

}  // namespace jdpp
