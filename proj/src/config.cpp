#include "heatopt/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace heatopt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) fail(path + key, "missing required key");
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + key, "expected a number");
    return v.get<double>();
}

double get_number_or(const json& obj, const std::string& path, const std::string& key,
                     double def) {
    if (!obj.contains(key)) return def;
    return get_number(obj, path, key);
}

// scalar or [x, y]; returns the entries read
std::array<double, 2> get_point(const json& v, const std::string& path, int& dim) {
    if (v.is_number()) {
        dim = 1;
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        dim = 2;
        return {v[0].get<double>(), v[1].get<double>()};
    }
    fail(path, "expected a number or an array of two numbers");
}

std::vector<double> get_decreasing_list(const json& obj, const std::string& path,
                                        const std::string& key) {
    std::vector<double> out;
    if (!obj.contains(key)) return out;
    const json& v = obj.at(key);
    if (!v.is_array() || v.empty()) fail(path + key, "expected a non-empty array of numbers");
    for (const auto& e : v) {
        if (!e.is_number()) fail(path + key, "expected numbers");
        double d = e.get<double>();
        if (!(d > 0.0)) fail(path + key, "entries must be positive");
        if (!out.empty() && !(d < out.back()))
            fail(path + key, "entries must be strictly decreasing");
        out.push_back(d);
    }
    return out;
}

} // namespace

Schedule RunConfig::make_schedule(const Scene& s, double epsilon) const {
    Schedule sched = default_schedule(s, epsilon);
    if (!kappa1_seq.empty()) sched.kappa1_seq = kappa1_seq;
    if (!kappa2_seq.empty()) sched.kappa2_seq = kappa2_seq;
    sched.solver = solver;
    sched.seed_volume = seed_volume;
    return sched;
}

double RunConfig::default_vol_tol(const Scene& s) const {
    if (vol_tol > 0.0) return vol_tol;
    double per = s.spec.domain.perimeter(s.grid.dim);
    return 4.0 * s.grid.max_h() * std::max(1.0, 0.5 * per);
}

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");

    check_keys(root, "", {"box", "domain", "obstacle", "m", "penalty", "continuation", "solver",
                          "output"});

    RunConfig cfg;

    // box
    if (!root.contains("box")) throw ConfigError("box: missing required key");
    const json& box = root.at("box");
    if (!box.is_object()) throw ConfigError("box: expected an object");
    check_keys(box, "box", {"lo", "hi", "nodes"});
    if (!box.contains("lo") || !box.contains("hi") || !box.contains("nodes"))
        throw ConfigError("box: requires lo, hi, nodes");
    int dlo = 0, dhi = 0;
    cfg.scene.box_lo = get_point(box.at("lo"), "box.lo", dlo);
    cfg.scene.box_hi = get_point(box.at("hi"), "box.hi", dhi);
    if (dlo != dhi) throw ConfigError("box: lo and hi must have the same dimension");
    cfg.scene.dim = dlo;
    {
        const json& nodes = box.at("nodes");
        if (nodes.is_number_integer()) {
            if (cfg.scene.dim != 1) throw ConfigError("box.nodes: expected two entries for 2D");
            cfg.scene.nodes = {nodes.get<int>(), 1};
        } else if (nodes.is_array() && nodes.size() == 2 && nodes[0].is_number_integer() &&
                   nodes[1].is_number_integer()) {
            if (cfg.scene.dim != 2) throw ConfigError("box.nodes: expected one entry for 1D");
            cfg.scene.nodes = {nodes[0].get<int>(), nodes[1].get<int>()};
        } else {
            throw ConfigError("box.nodes: expected an integer or an array of two integers");
        }
        for (int a = 0; a < cfg.scene.dim; ++a)
            if (cfg.scene.nodes[a] < 3) throw ConfigError("box.nodes: need at least 3 nodes per axis");
    }

    // domain
    if (!root.contains("domain")) throw ConfigError("domain: missing required key");
    const json& dom = root.at("domain");
    if (!dom.is_object()) throw ConfigError("domain: expected an object");
    check_keys(dom, "domain", {"shape", "center", "radius", "lo", "hi"});
    if (!dom.contains("shape") || !dom.at("shape").is_string())
        throw ConfigError("domain.shape: missing or not a string");
    std::string shape = dom.at("shape").get<std::string>();
    if (shape == "interval") {
        cfg.scene.domain.shape = DomainShape::Interval;
        if (cfg.scene.dim != 1) throw ConfigError("domain.shape: interval requires a 1D box");
        int d = 0;
        cfg.scene.domain.center = get_point(dom.contains("center") ? dom.at("center") : json(0.0),
                                            "domain.center", d);
        cfg.scene.domain.radius = get_number(dom, "domain.", "radius");
    } else if (shape == "disk") {
        cfg.scene.domain.shape = DomainShape::Disk;
        if (cfg.scene.dim != 2) throw ConfigError("domain.shape: disk requires a 2D box");
        if (!dom.contains("center")) throw ConfigError("domain.center: missing required key");
        int d = 0;
        cfg.scene.domain.center = get_point(dom.at("center"), "domain.center", d);
        if (d != 2) throw ConfigError("domain.center: expected [x, y]");
        cfg.scene.domain.radius = get_number(dom, "domain.", "radius");
    } else if (shape == "rectangle") {
        cfg.scene.domain.shape = DomainShape::Rectangle;
        if (cfg.scene.dim != 2) throw ConfigError("domain.shape: rectangle requires a 2D box");
        if (!dom.contains("lo") || !dom.contains("hi"))
            throw ConfigError("domain: rectangle requires lo and hi");
        int d1 = 0, d2 = 0;
        cfg.scene.domain.lo = get_point(dom.at("lo"), "domain.lo", d1);
        cfg.scene.domain.hi = get_point(dom.at("hi"), "domain.hi", d2);
        if (d1 != 2 || d2 != 2) throw ConfigError("domain.lo/hi: expected [x, y]");
    } else {
        throw ConfigError("domain.shape: must be interval, disk or rectangle");
    }
    if ((shape == "interval" || shape == "disk") && !(cfg.scene.domain.radius > 0.0))
        throw ConfigError("domain.radius: must be > 0");

    // obstacle
    if (root.contains("obstacle")) {
        const json& obs = root.at("obstacle");
        if (!obs.is_array()) throw ConfigError("obstacle: expected an array of bumps");
        for (std::size_t bi = 0; bi < obs.size(); ++bi) {
            std::string path = "obstacle[" + std::to_string(bi) + "]";
            const json& b = obs[bi];
            if (!b.is_object()) fail(path, "expected an object");
            check_keys(b, path, {"profile", "center", "radius", "height"});
            BumpSpec bump;
            if (b.contains("profile")) {
                if (!b.at("profile").is_string()) fail(path + ".profile", "expected a string");
                std::string prof = b.at("profile").get<std::string>();
                if (prof == "poly4") bump.profile = BumpProfile::Poly4;
                else if (prof == "mollifier") bump.profile = BumpProfile::Mollifier;
                else fail(path + ".profile", "must be poly4 or mollifier");
            }
            if (!b.contains("center")) fail(path + ".center", "missing required key");
            int d = 0;
            bump.center = get_point(b.at("center"), path + ".center", d);
            if (d != cfg.scene.dim) fail(path + ".center", "dimension does not match the box");
            bump.radius = get_number(b, path + ".", "radius");
            bump.height = get_number(b, path + ".", "height");
            if (!(bump.radius > 0.0)) fail(path + ".radius", "must be > 0");
            if (!(bump.height > 0.0)) fail(path + ".height", "must be > 0");
            cfg.scene.bumps.push_back(bump);
        }
    }

    // m
    if (!root.contains("m")) throw ConfigError("m: missing required key");
    if (!root.at("m").is_number()) throw ConfigError("m: expected a number");
    cfg.scene.m = root.at("m").get<double>();
    if (!(cfg.scene.m > 0.0)) throw ConfigError("m: must be > 0");

    // penalty
    if (root.contains("penalty")) {
        const json& p = root.at("penalty");
        if (!p.is_object()) throw ConfigError("penalty: expected an object");
        check_keys(p, "penalty", {"kappa1", "kappa2", "epsilon"});
        cfg.penalty.kappa1 = get_number_or(p, "penalty.", "kappa1", cfg.penalty.kappa1);
        cfg.penalty.kappa2 = get_number_or(p, "penalty.", "kappa2", cfg.penalty.kappa2);
        cfg.penalty.epsilon = get_number_or(p, "penalty.", "epsilon", cfg.penalty.epsilon);
        if (!(cfg.penalty.kappa1 > 0.0)) throw ConfigError("penalty.kappa1: must be > 0");
        if (!(cfg.penalty.kappa2 > 0.0)) throw ConfigError("penalty.kappa2: must be > 0");
        if (!(cfg.penalty.epsilon > 0.0)) throw ConfigError("penalty.epsilon: must be > 0");
    }

    // continuation
    if (root.contains("continuation")) {
        const json& c = root.at("continuation");
        if (!c.is_object()) throw ConfigError("continuation: expected an object");
        check_keys(c, "continuation",
                   {"kappa1_seq", "kappa2_seq", "epsilons", "vol_tol", "seed_volume"});
        cfg.kappa1_seq = get_decreasing_list(c, "continuation.", "kappa1_seq");
        cfg.kappa2_seq = get_decreasing_list(c, "continuation.", "kappa2_seq");
        auto eps = get_decreasing_list(c, "continuation.", "epsilons");
        if (!eps.empty()) cfg.epsilons = eps;
        cfg.vol_tol = get_number_or(c, "continuation.", "vol_tol", 0.0);
        if (c.contains("vol_tol") && !(cfg.vol_tol > 0.0))
            throw ConfigError("continuation.vol_tol: must be > 0");
        cfg.seed_volume = get_number_or(c, "continuation.", "seed_volume", 0.0);
        if (c.contains("seed_volume") && !(cfg.seed_volume > 0.0))
            throw ConfigError("continuation.seed_volume: must be > 0");
    }

    // solver
    if (root.contains("solver")) {
        const json& so = root.at("solver");
        if (!so.is_object()) throw ConfigError("solver: expected an object");
        check_keys(so, "solver",
                   {"max_iters", "grad_tol", "armijo_c", "step_init", "step_shrink", "clip_box"});
        if (so.contains("max_iters")) {
            if (!so.at("max_iters").is_number_integer())
                throw ConfigError("solver.max_iters: expected an integer");
            cfg.solver.max_iters = so.at("max_iters").get<int>();
            if (cfg.solver.max_iters < 0) throw ConfigError("solver.max_iters: must be >= 0");
        }
        cfg.solver.grad_tol = get_number_or(so, "solver.", "grad_tol", cfg.solver.grad_tol);
        if (!(cfg.solver.grad_tol >= 0.0)) throw ConfigError("solver.grad_tol: must be >= 0");
        cfg.solver.armijo_c = get_number_or(so, "solver.", "armijo_c", cfg.solver.armijo_c);
        if (!(cfg.solver.armijo_c > 0.0 && cfg.solver.armijo_c < 1.0))
            throw ConfigError("solver.armijo_c: must lie in (0,1)");
        cfg.solver.step_init = get_number_or(so, "solver.", "step_init", cfg.solver.step_init);
        cfg.solver.step_shrink =
            get_number_or(so, "solver.", "step_shrink", cfg.solver.step_shrink);
        if (!(cfg.solver.step_shrink > 0.0 && cfg.solver.step_shrink < 1.0))
            throw ConfigError("solver.step_shrink: must lie in (0,1)");
        if (so.contains("clip_box")) {
            if (!so.at("clip_box").is_boolean())
                throw ConfigError("solver.clip_box: expected a boolean");
            cfg.solver.clip_box = so.at("clip_box").get<bool>();
        }
    }

    // output
    if (root.contains("output")) {
        const json& o = root.at("output");
        if (!o.is_object()) throw ConfigError("output: expected an object");
        check_keys(o, "output", {"dir", "formats"});
        if (o.contains("dir")) {
            if (!o.at("dir").is_string()) throw ConfigError("output.dir: expected a string");
            cfg.output.dir = o.at("dir").get<std::string>();
        }
        if (o.contains("formats")) {
            if (!o.at("formats").is_array()) throw ConfigError("output.formats: expected an array");
            cfg.output.formats.clear();
            for (const auto& f : o.at("formats")) {
                if (!f.is_string()) throw ConfigError("output.formats: expected strings");
                std::string fmt = f.get<std::string>();
                if (fmt != "csv" && fmt != "bin" && fmt != "pgm")
                    throw ConfigError("output.formats: must be csv, bin or pgm");
                cfg.output.formats.push_back(fmt);
            }
        }
    }

    cfg.canonical_text = root.dump();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_reference() {
    return R"(Configuration reference (JSON). Keys marked * are required.

box* : {
  lo*    : number (1D) or [x, y] (2D)   lower box corner
  hi*    : number or [x, y]             upper box corner
  nodes* : integer or [nx, ny]          nodes per axis, >= 3
}
domain* : {
  shape* : "interval" | "disk" | "rectangle"
  center : number (interval, default 0) or [x, y]* (disk)
  radius : number > 0 (interval, disk)
  lo, hi : [x, y] (rectangle)
}
obstacle : [                            default: no bumps, phi == 0
  { profile : "poly4" | "mollifier"     default poly4
    center* : number or [x, y]
    radius* : number > 0                support radius, strictly inside D
    height* : number > 0 }
]
m* : number > 0                         target exterior volume
penalty : {                             fixed-parameter solves
  kappa1  : number > 0   default 0.1
  kappa2  : number > 0   default 0.5
  epsilon : number > 0   default 0.25
}
continuation : {
  kappa1_seq : decreasing positive array  default geometric(0.1 s, 1/2, 6), s = max(max phi, 1)
  kappa2_seq : decreasing positive array  default geometric(0.5 s, 1/2, 6)
  epsilons   : decreasing positive array  default [0.8 ... 0.025], used by sweep-eps
  vol_tol    : number > 0                 default 4 h max(1, perimeter(D)/2)
  seed_volume: number > 0                 default m
}
solver : {
  max_iters   : integer >= 0   default 50000
  grad_tol    : number >= 0    default 1e-6
  armijo_c    : number in (0,1) default 1e-4
  step_init   : number          default 0 = h^2/4
  step_shrink : number in (0,1) default 0.5
  clip_box    : boolean         default true
}
output : {
  dir     : string             default "out"
  formats : array of "csv" | "bin" | "pgm"   default ["csv", "bin"]
}
)";
}

} // namespace heatopt
