#include "cli.hpp"

#include "jdpp/errors.hpp"
#include "jdpp/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace jdpp;
using namespace jdpp::cli;

namespace {

int env_threads() {
    const char* v = std::getenv("JDPP_THREADS");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 0) throw ConfigError("JDPP_THREADS: expected a non-negative integer");
    return int(n);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerics for J-Hermitian determinantal point processes with Whittaker kernels"};
    app.require_subcommand(1);

    std::string config_path, out_dir, z, zp;
    std::uint64_t seed = 0;
    int threads = -1;
    bool strict = false, overwrite = false;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides experiment.seed)");
    app.add_option("--out", out_dir, "Output directory (overrides JDPP_OUT_DIR and output.dir)");
    app.add_flag("--strict", strict, "Exit 1 when experiment thresholds fail");
    app.add_option("--threads", threads, "Worker threads, 0 for the runtime default (overrides JDPP_THREADS)")
        ->check(CLI::NonNegativeNumber);
    app.add_flag("--overwrite", overwrite, "Replace existing output files");

    auto* eval = app.add_subcommand("eval", "Evaluate gamma, whittaker-w, kummer-u, kernel, l-kernel or a");
    std::vector<std::string> eval_args;
    eval->add_option("args", eval_args, "FUNCTION ARGS...  complex values as re or (re,im)")->required();
    eval->add_option("--z", z, "Kernel parameter z for kernel, l-kernel and a");
    eval->add_option("--zp", zp, "Kernel parameter z' for kernel, l-kernel and a");

    auto* build = app.add_subcommand("build-operators", "Discretize L and K and write matrix containers");
    auto* sample = app.add_subcommand("sample", "Draw configurations from the L-process");
    std::size_t count = 0;
    sample->add_option("--count", count, "Number of configurations (default experiment.samples)");

    auto* verify = app.add_subcommand("verify", "Run an invariant suite");
    std::string suite;
    verify->add_option("suite", suite, "l12, determinants, palm-identity, iiks, decay or variance")->required();

    auto* experiment = app.add_subcommand("experiment", "Run the experiment named in the config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        Context ctx;
        if (!config_path.empty()) {
            ctx.config = load_config(config_path);
            ctx.has_config = true;
        }
        if (seed_opt->count()) ctx.seed = seed;
        ctx.strict = strict;
        ctx.overwrite = overwrite;
        if (!out_dir.empty()) ctx.out_dir = out_dir;
        else if (const char* env = std::getenv("JDPP_OUT_DIR"); env && *env) ctx.out_dir = env;
        else if (!ctx.config.out_dir.empty()) ctx.out_dir = ctx.config.out_dir;
        set_thread_count(threads >= 0 ? threads : env_threads());

        if (*eval) {
            if (!z.empty()) ctx.config.kernel.z = parse_complex(z);
            if (!zp.empty()) ctx.config.kernel.zp = parse_complex(zp);
            return cmd_eval(ctx, eval_args);
        }
        if (*build) return cmd_build_operators(ctx);
        if (*sample) return cmd_sample(ctx, count ? count : ctx.config.experiment.samples);
        if (*verify) return cmd_verify(ctx, suite);
        if (*experiment) return cmd_experiment(ctx);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
