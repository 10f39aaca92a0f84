#include "cli.hpp"

#include "jdpp/errors.hpp"

#include <cstdlib>
#include <set>

namespace jdpp::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& known) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key())) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
}

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

double positive(const json& v, const std::string& path) {
    const double x = number(v, path);
    if (!(x > 0.0)) fail(path, "must be positive");
    return x;
}

long integer(const json& v, const std::string& path, long lo) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const long x = v.get<long>();
    if (x < lo) fail(path, "must be at least " + std::to_string(lo));
    return x;
}

cplx complex_value(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    fail(path, "expected a number or [re, im]");
}

std::vector<double> number_list(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void parse_kernel(const json& j, KernelSpec& k) {
    const std::string p = "kernel";
    reject_unknown(j, p, {"family", "z", "zp", "v"});
    if (j.contains("family")) {
        if (!j["family"].is_string()) fail(join(p, "family"), "expected a string");
        k.family = j["family"].get<std::string>();
        if (k.family != "whittaker" && k.family != "two-point" && k.family != "zero")
            fail(join(p, "family"), "expected whittaker, two-point or zero");
    }
    if (j.contains("z")) k.z = complex_value(j["z"], join(p, "z"));
    if (j.contains("zp")) k.zp = complex_value(j["zp"], join(p, "zp"));
    if (j.contains("v")) k.v = number(j["v"], join(p, "v"));
    if (k.family == "whittaker") {
        try {
            const KernelParams kp = KernelParams::make(k.z, k.zp);
            if (!kp.l_admissible) fail(join(p, "z"), "pair is not admissible for the L-kernel (|z + z'| >= 1)");
        } catch (const DomainError& e) {
            fail(join(p, "z"), e.what());
        }
    }
}

void parse_grid(const json& j, GridSpec& g) {
    const std::string p = "grid";
    reject_unknown(j, p, {"scheme", "nodes_per_side", "delta", "outer", "panels", "spacing"});
    if (j.contains("scheme")) {
        const std::string s = j["scheme"].is_string() ? j["scheme"].get<std::string>() : "";
        if (s == "uniform") g.scheme = GridScheme::uniform;
        else if (s == "gauss_legendre_panels") g.scheme = GridScheme::gauss_legendre_panels;
        else fail(join(p, "scheme"), "expected uniform or gauss_legendre_panels");
    }
    if (j.contains("spacing")) {
        const std::string s = j["spacing"].is_string() ? j["spacing"].get<std::string>() : "";
        if (s == "linear") g.spacing = PanelSpacing::linear;
        else if (s == "geometric") g.spacing = PanelSpacing::geometric;
        else fail(join(p, "spacing"), "expected linear or geometric");
    }
    if (j.contains("nodes_per_side")) g.nodes_per_side = int(integer(j["nodes_per_side"], join(p, "nodes_per_side"), 1));
    if (j.contains("panels")) g.panels = int(integer(j["panels"], join(p, "panels"), 1));
    if (j.contains("delta")) g.delta = positive(j["delta"], join(p, "delta"));
    if (j.contains("outer")) g.outer = positive(j["outer"], join(p, "outer"));
    if (!(g.outer > g.delta)) fail(join(p, "outer"), "must exceed grid.delta");
    if (g.scheme == GridScheme::gauss_legendre_panels && g.nodes_per_side % g.panels != 0)
        fail(join(p, "nodes_per_side"), "must be a multiple of grid.panels");
}

void parse_experiment(const json& j, ExperimentSpec& e) {
    const std::string p = "experiment";
    reject_unknown(j, p, {"name", "levels", "samples", "seed", "R", "anchor", "schedule", "tests", "decay"});
    if (!j.contains("name") || !j["name"].is_string()) fail(join(p, "name"), "required string");
    e.name = j["name"].get<std::string>();
    if (e.name != "rigidity" && e.name != "palm-equivalence")
        fail(join(p, "name"), "expected rigidity or palm-equivalence");
    if (j.contains("levels")) {
        const json& l = j["levels"];
        if (!l.is_array() || l.empty()) fail(join(p, "levels"), "expected a non-empty array");
        e.levels.clear();
        for (std::size_t i = 0; i < l.size(); ++i)
            e.levels.push_back(int(integer(l[i], join(p, "levels") + "[" + std::to_string(i) + "]", 1)));
    }
    if (j.contains("samples")) e.samples = std::size_t(integer(j["samples"], join(p, "samples"), 1));
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) fail(join(p, "seed"), "expected a non-negative integer");
        e.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("R")) e.R = positive(j["R"], join(p, "R"));
    if (j.contains("anchor")) {
        const json& a = j["anchor"];
        const std::string ap = join(p, "anchor");
        reject_unknown(a, ap, {"plus", "minus"});
        try {
            e.anchor = PalmAnchor::make(number_list(a.value("plus", json::array()), join(ap, "plus")),
                                        number_list(a.value("minus", json::array()), join(ap, "minus")));
        } catch (const DomainError& err) {
            fail(ap, err.what());
        }
    }
    if (j.contains("schedule")) {
        e.schedule = number_list(j["schedule"], join(p, "schedule"));
        if (e.schedule.empty()) fail(join(p, "schedule"), "must not be empty");
        for (std::size_t i = 0; i < e.schedule.size(); ++i) {
            if (!(e.schedule[i] > 0.0)) fail(join(p, "schedule"), "radii must be positive");
            if (i && !(e.schedule[i] < e.schedule[i - 1])) fail(join(p, "schedule"), "radii must decrease");
        }
    }
    if (j.contains("tests")) {
        const json& t = j["tests"];
        if (!t.is_array()) fail(join(p, "tests"), "expected an array");
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::string tp = join(p, "tests") + "[" + std::to_string(i) + "]";
            reject_unknown(t[i], tp, {"name", "lo", "hi", "depth", "both_sides"});
            TestSpec s;
            s.name = t[i].value("name", "h" + std::to_string(i));
            if (!t[i].contains("lo") || !t[i].contains("hi")) fail(tp, "lo and hi are required");
            s.lo = number(t[i]["lo"], join(tp, "lo"));
            s.hi = number(t[i]["hi"], join(tp, "hi"));
            if (!(s.lo < s.hi)) fail(join(tp, "hi"), "must exceed lo");
            if (s.lo < 0.0 && s.hi > 0.0) fail(tp, "support must not contain the origin");
            if (t[i].contains("depth")) s.depth = number(t[i]["depth"], join(tp, "depth"));
            if (t[i].contains("both_sides")) {
                if (!t[i]["both_sides"].is_boolean()) fail(join(tp, "both_sides"), "expected a boolean");
                s.both_sides = t[i]["both_sides"].get<bool>();
            }
            e.tests.push_back(s);
        }
    }
    if (j.contains("decay")) {
        const json& d = j["decay"];
        const std::string dp = join(p, "decay");
        reject_unknown(d, dp, {"M", "delta_prime", "box", "samples_per_side"});
        if (d.contains("M")) e.decay.M = positive(d["M"], join(dp, "M"));
        if (d.contains("delta_prime")) e.decay.delta_prime = positive(d["delta_prime"], join(dp, "delta_prime"));
        if (d.contains("box")) e.decay.box = positive(d["box"], join(dp, "box"));
        if (d.contains("samples_per_side"))
            e.decay.samples_per_side = int(integer(d["samples_per_side"], join(dp, "samples_per_side"), 2));
    }
}

}  // namespace

RunConfig parse_config(const json& doc) {
    reject_unknown(doc, "", {"schema_version", "kernel", "grid", "experiment", "output"});
    if (!doc.contains("schema_version")) fail("schema_version", "required");
    if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion)
        fail("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
    RunConfig cfg;
    if (doc.contains("kernel")) parse_kernel(doc["kernel"], cfg.kernel);
    if (doc.contains("grid")) parse_grid(doc["grid"], cfg.grid);
    if (doc.contains("experiment")) {
        parse_experiment(doc["experiment"], cfg.experiment);
        cfg.has_experiment = true;
    }
    if (doc.contains("output")) {
        reject_unknown(doc["output"], "output", {"dir"});
        if (doc["output"].contains("dir")) {
            if (!doc["output"]["dir"].is_string()) fail("output.dir", "expected a string");
            cfg.out_dir = doc["output"]["dir"].get<std::string>();
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(doc);
}

std::string Context::claim(const std::string& name) const {
    const std::filesystem::path p = out_dir / name;
    if (std::filesystem::exists(p) && !overwrite)
        throw ConfigError("refusing to overwrite " + p.string() + " (pass --overwrite)");
    std::filesystem::create_directories(out_dir);
    return p.string();
}

std::ofstream Context::open(const std::string& name, bool binary) const {
    const std::string p = claim(name);
    std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
    if (!os) throw ConfigError("cannot write " + p);
    return os;
}

void write_json(const Context& ctx, const std::string& name, const json& doc) {
    std::ofstream os = ctx.open(name);
    os << doc.dump(2) << '\n';
}

KernelParams kernel_params(const KernelSpec& k) { return KernelParams::make(k.z, k.zp); }

OperatorMatrix build_l(const RunConfig& cfg) {
    if (cfg.kernel.family == "two-point") {
        auto grid = std::make_shared<const Grid>(Grid::from_nodes({1.0, -1.0}, {1.0, 1.0}));
        Eigen::MatrixXd l(2, 2);
        l << 0.0, cfg.kernel.v, -cfg.kernel.v, 0.0;
        return OperatorMatrix(grid, l);
    }
    auto grid = std::make_shared<const Grid>(build_grid(cfg.grid));
    if (cfg.kernel.family == "zero") return OperatorMatrix(grid, Eigen::MatrixXd::Zero(Index(grid->size()), Index(grid->size())));
    return discretize(l_kernel(whittaker_a(kernel_params(cfg.kernel))), grid);
}

}  // namespace jdpp::cli
