#pragma once

#include "jdpp/statistics.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace jdpp::cli {

constexpr int kExitOk = 0;
constexpr int kExitThreshold = 1;
constexpr int kExitUsage = 2;

constexpr int kSchemaVersion = 1;

struct KernelSpec {
    std::string family = "whittaker";  // whittaker | two-point | zero
    cplx z{0.2, 0.0};
    cplx zp{0.1, 0.0};
    double v = 1.0;  // two-point coupling
};

struct TestSpec {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    double depth = 0.5;
    bool both_sides = false;
};

struct DecaySpec {
    double M = 1.0;
    double delta_prime = 0.2;
    double box = 40.0;
    int samples_per_side = 60;
};

struct ExperimentSpec {
    std::string name;  // rigidity | palm-equivalence
    std::vector<int> levels{1, 2, 4, 8};
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    double R = 1.0;
    PalmAnchor anchor;
    std::vector<double> schedule = default_delta_schedule();
    std::vector<TestSpec> tests;
    DecaySpec decay;
};

struct RunConfig {
    KernelSpec kernel;
    GridSpec grid;
    ExperimentSpec experiment;
    std::string out_dir;
    bool has_experiment = false;
};

// Throws ConfigError naming the offending field path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

struct Context {
    RunConfig config;
    bool has_config = false;
    std::filesystem::path out_dir = ".";
    bool overwrite = false;
    bool strict = false;
    std::optional<std::uint64_t> seed;

    std::uint64_t effective_seed() const { return seed.value_or(config.experiment.seed); }
    // Output path for a new file; refuses to replace an existing one unless
    // overwrite is set.
    std::string claim(const std::string& name) const;
    std::ofstream open(const std::string& name, bool binary = false) const;
};

// Operators built from the kernel and grid sections.
OperatorMatrix build_l(const RunConfig& cfg);
KernelParams kernel_params(const KernelSpec& k);

// Accepts re, re,im or (re,im).
cplx parse_complex(const std::string& s);

void write_json(const Context& ctx, const std::string& name, const nlohmann::json& doc);

int cmd_eval(const Context& ctx, const std::vector<std::string>& args);
int cmd_build_operators(const Context& ctx);
int cmd_sample(const Context& ctx, std::size_t count);
int cmd_verify(const Context& ctx, const std::string& suite);
int cmd_experiment(const Context& ctx);

const std::vector<std::string>& suite_names();

}  // namespace jdpp::cli
