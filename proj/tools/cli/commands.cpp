#include "cli.hpp"

#include "jdpp/csv.hpp"
#include "jdpp/errors.hpp"
#include "jdpp/matrix_io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace jdpp::cli {

using nlohmann::json;

cplx parse_complex(const std::string& s) {
    std::string t = s;
    if (!t.empty() && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
    const auto comma = t.find(',');
    try {
        std::size_t used = 0;
        if (comma == std::string::npos) {
            const double re = std::stod(t, &used);
            if (used != t.size()) throw std::invalid_argument(s);
            return {re, 0.0};
        }
        const std::string a = t.substr(0, comma), b = t.substr(comma + 1);
        const double re = std::stod(a, &used);
        if (used != a.size()) throw std::invalid_argument(s);
        const double im = std::stod(b, &used);
        if (used != b.size()) throw std::invalid_argument(s);
        return {re, im};
    } catch (const std::logic_error&) {
        throw ConfigError("cannot parse number '" + s + "'");
    }
}

namespace {

double parse_real(const std::string& s) {
    const cplx v = parse_complex(s);
    if (v.imag() != 0.0) throw ConfigError("expected a real number, got '" + s + "'");
    return v.real();
}

std::string show(cplx v) {
    char buf[96];
    if (v.imag() == 0.0) std::snprintf(buf, sizeof buf, "%.17g", v.real());
    else std::snprintf(buf, sizeof buf, "(%.17g,%.17g)", v.real(), v.imag());
    return buf;
}

void expect_args(const std::vector<std::string>& args, std::size_t n, const char* usage) {
    if (args.size() != n + 1) throw ConfigError(std::string("usage: eval ") + usage);
}

std::string num(double v) { return csv::number(v); }

}  // namespace

int cmd_eval(const Context& ctx, const std::vector<std::string>& args) {
    if (args.empty()) throw ConfigError("eval: missing function name");
    const std::string& f = args[0];
    cplx out;
    if (f == "gamma") {
        expect_args(args, 1, "gamma W");
        out = gamma_complex(parse_complex(args[1]));
    } else if (f == "whittaker-w") {
        expect_args(args, 3, "whittaker-w KAPPA MU X");
        out = whittaker_w(parse_complex(args[1]), parse_complex(args[2]), parse_real(args[3]));
    } else if (f == "kummer-u") {
        expect_args(args, 3, "kummer-u A B X");
        out = kummer_u(parse_complex(args[1]), parse_complex(args[2]), parse_real(args[3]));
    } else if (f == "kernel") {
        expect_args(args, 2, "kernel X Y");
        out = whittaker_kernel(kernel_params(ctx.config.kernel))(parse_real(args[1]), parse_real(args[2]));
    } else if (f == "l-kernel") {
        expect_args(args, 2, "l-kernel X Y");
        out = l_kernel(whittaker_a(kernel_params(ctx.config.kernel)))(parse_real(args[1]), parse_real(args[2]));
    } else if (f == "a") {
        expect_args(args, 1, "a X");
        out = whittaker_a(kernel_params(ctx.config.kernel))(parse_real(args[1]));
    } else {
        throw ConfigError("eval: unknown function '" + f + "' (gamma, whittaker-w, kummer-u, kernel, l-kernel, a)");
    }
    std::cout << show(out) << '\n';
    return kExitOk;
}

int cmd_build_operators(const Context& ctx) {
    const RunConfig& cfg = ctx.config;
    const OperatorMatrix L = build_l(cfg);
    SolveInfo info;
    const OperatorMatrix K = k_from_l(L, &info);
    write_matrix_binary(ctx.claim("l.bin"), L);
    write_matrix_csv(ctx.claim("l.csv"), L);
    write_matrix_binary(ctx.claim("k.bin"), K);
    write_matrix_csv(ctx.claim("k.csv"), K);

    json rep;
    rep["kernel_family"] = cfg.kernel.family;
    rep["nodes"] = L.size();
    rep["l_fingerprint"] = L.fingerprint();
    rep["k_fingerprint"] = K.fingerprint();
    rep["condition_1_plus_l"] = info.condition;
    rep["projection_defect"] = projection_defect(hat_k(K));
    rep["k_symmetry_residual"] = K.symmetry_residual();
    rep["k_l12_norm"] = l12_norm(K);
    rep["k_l12_norm_abs_ge_0.5"] = l12_norm(compress(K, nodes_with_abs_at_least(K.grid(), 0.5)));
    if (cfg.kernel.family == "whittaker") {
        const OperatorMatrix W = discretize(whittaker_kernel(kernel_params(cfg.kernel)), L.grid_ptr());
        write_matrix_binary(ctx.claim("whittaker_k.bin"), W);
        rep["whittaker_k_fingerprint"] = W.fingerprint();
        rep["whittaker_k_symmetry_residual"] = W.symmetry_residual();
    }
    write_json(ctx, "operators.json", rep);
    std::cout << "wrote operators for " << L.size() << " nodes to " << ctx.out_dir.string() << '\n';
    return kExitOk;
}

int cmd_sample(const Context& ctx, std::size_t count) {
    const OperatorMatrix L = build_l(ctx.config);
    const OperatorMatrix K = k_from_l(L);
    const SampleBatch batch = sample_dual(L, count, ctx.effective_seed());
    {
        std::ofstream os = ctx.open("samples.txt");
        write_sample_batch(os, batch);
    }
    double total = 0.0;
    for (const auto& c : batch.configurations) total += double(c.size());
    json rep;
    rep["samples"] = batch.configurations.size();
    rep["seed"] = batch.seed;
    rep["fingerprint"] = batch.fingerprint;
    rep["mean_count"] = batch.configurations.empty() ? 0.0 : total / double(batch.configurations.size());
    rep["expected_count"] = K.entries().trace();
    write_json(ctx, "sample_report.json", rep);
    std::cout << "wrote " << batch.configurations.size() << " configurations to " << ctx.out_dir.string() << '\n';
    return kExitOk;
}

namespace {

void write_plot(const Context& ctx, const std::string& name, const std::vector<std::array<double, 3>>& rows) {
    std::ofstream os = ctx.open(name);
    csv::write_row(os, {"level", "value", "error_bar"});
    for (const auto& r : rows) csv::write_row(os, {num(r[0]), num(r[1]), num(r[2])});
}

int run_rigidity(const Context& ctx) {
    const RunConfig& cfg = ctx.config;
    const ExperimentSpec& e = cfg.experiment;
    RigidityConfig rc;
    rc.R = e.R;
    rc.levels = e.levels;
    rc.samples = e.samples;
    rc.seed = ctx.effective_seed();
    OperatorMatrix K;
    if (cfg.kernel.family == "whittaker") {
        // The process with kernel K(1/x, 1/y)/|xy|: its singularity sits at infinity.
        K = invert_operator(k_from_l(build_l(cfg)));
        rc.decay = verify_decay(transform_to_infinity(whittaker_kernel(kernel_params(cfg.kernel))), e.decay.M,
                                e.decay.delta_prime, e.decay.box, e.decay.samples_per_side);
    } else if (cfg.kernel.family == "zero") {
        K = build_l(cfg);
        rc.decay.M = e.decay.M;
        rc.decay.delta_prime = e.decay.delta_prime;
    } else {
        throw ConfigError("kernel.family: rigidity needs whittaker or zero");
    }
    const RigidityReport r = rigidity_experiment(K, rc);

    {
        std::ofstream os = ctx.open("rigidity.csv");
        csv::write_row(os, {"n", "N", "delta_n", "k", "flat", "variance_analytic", "variance_empirical",
                            "variance_stderr", "expected", "accuracy", "sup_window_error", "I1", "I2", "I3", "I4"});
        for (const auto& lv : r.levels) {
            const auto& d = lv.diagnostics;
            csv::write_row(os, {std::to_string(lv.n), num(d.N), num(d.delta_n), num(d.k), d.flat ? "1" : "0",
                                num(lv.variance_analytic), num(lv.variance_empirical), num(lv.variance_stderr),
                                num(lv.expected), num(lv.accuracy), num(d.sup_window_error), num(d.I1), num(d.I2),
                                num(d.I3), num(d.I4)});
        }
    }
    std::vector<std::array<double, 3>> plot;
    for (const auto& lv : r.levels) plot.push_back({double(lv.n), lv.variance_empirical, lv.variance_stderr});
    write_plot(ctx, "rigidity_plot.csv", plot);

    const RigidityLevel& top = r.levels.back();
    const bool pass = r.variance_monotone && top.variance_analytic <= 0.2 && top.accuracy >= 0.9;
    json rep;
    rep["experiment"] = "rigidity";
    rep["R"] = r.R;
    rep["samples"] = r.samples;
    rep["seed"] = rc.seed;
    rep["decay"] = {{"C", rc.decay.C},
                    {"C_prime", rc.decay.C_prime},
                    {"M", rc.decay.M},
                    {"delta_prime", rc.decay.delta_prime},
                    {"max_violation", rc.decay.max_violation}};
    rep["variance_monotone"] = r.variance_monotone;
    rep["accuracy_monotone"] = r.accuracy_monotone;
    rep["top_variance"] = top.variance_analytic;
    rep["top_accuracy"] = top.accuracy;
    rep["pass"] = pass;
    write_json(ctx, "rigidity_report.json", rep);
    std::cout << "rigidity: " << (pass ? "pass" : "fail") << " (top variance " << top.variance_analytic
              << ", accuracy " << top.accuracy << ")\n";
    return ctx.strict && !pass ? kExitThreshold : kExitOk;
}

int run_palm(const Context& ctx) {
    const RunConfig& cfg = ctx.config;
    const ExperimentSpec& e = cfg.experiment;
    if (cfg.kernel.family == "zero") throw ConfigError("kernel.family: palm-equivalence needs whittaker or two-point");
    std::vector<TestFunction> tests;
    for (const TestSpec& t : e.tests) tests.push_back(bump_test_function(t.name, t.lo, t.hi, t.depth, t.both_sides));
    if (tests.empty()) {
        tests = {bump_test_function("inner", 0.2, 0.8, 0.5), bump_test_function("negative", -4.0, -2.5, 0.7),
                 bump_test_function("paired", 1.2, 1.8, 0.4, true)};
    }
    const OperatorMatrix L = build_l(cfg);
    const std::uint64_t seed = ctx.effective_seed();
    const PalmEquivalenceReport r = palm_equivalence_experiment(L, e.anchor, tests, e.samples, seed, e.schedule);

    bool pass = true;
    {
        std::ofstream os = ctx.open("palm_routes.csv");
        csv::write_row(os, {"test", "palm_kernel", "ratio", "reweighted", "reweighted_stderr", "self_normalized",
                            "rel_ab", "rel_ac", "rel_bc", "z_ac"});
        for (const auto& rt : r.routes) {
            csv::write_row(os, {rt.name, num(rt.palm_kernel), num(rt.ratio), num(rt.reweighted),
                                num(rt.reweighted_stderr), num(rt.self_normalized), num(rt.rel_ab), num(rt.rel_ac),
                                num(rt.rel_bc), num(rt.z_ac)});
            pass = pass && rt.rel_ab <= 1e-8 && rt.z_ac <= 3.0;
        }
    }
    std::vector<std::array<double, 3>> plot;
    for (std::size_t i = 0; i < r.routes.size(); ++i)
        plot.push_back({double(i), r.routes[i].reweighted, r.routes[i].reweighted_stderr});
    write_plot(ctx, "palm_plot.csv", plot);

    json rep;
    rep["experiment"] = "palm-equivalence";
    rep["anchor"] = {{"plus", r.anchor.p_plus}, {"minus", r.anchor.p_minus}};
    rep["anchor_nodes"] = r.anchor_nodes;
    rep["skipped"] = r.skipped;
    rep["samples"] = r.samples;
    rep["seed"] = seed;
    rep["delta"] = r.delta;
    rep["normalizer"] = {{"value", r.normalizer.value},
                         {"value_coarse", r.normalizer.value_coarse},
                         {"stable", r.normalizer.stable},
                         {"empirical", r.normalizer_empirical}};
    rep["cauchy_stable"] = r.cauchy_stable;
    rep["weight_ess"] = r.weight_ess;
    rep["pass"] = pass;
    write_json(ctx, "palm_report.json", rep);
    std::cout << "palm-equivalence: " << (pass ? "pass" : "fail") << " (" << r.routes.size() << " test functions)\n";
    return ctx.strict && !pass ? kExitThreshold : kExitOk;
}

}  // namespace

int cmd_experiment(const Context& ctx) {
    if (!ctx.has_config || !ctx.config.has_experiment) throw ConfigError("experiment: --config with an experiment section is required");
    if (ctx.config.experiment.name == "rigidity") return run_rigidity(ctx);
    return run_palm(ctx);
}

}  // namespace jdpp::cli
