#include "heatopt/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace heatopt {

using nlohmann::json;

FieldFormat parse_field_format(const std::string& name) {
    if (name == "csv") return FieldFormat::Csv;
    if (name == "bin") return FieldFormat::Bin;
    if (name == "pgm") return FieldFormat::Pgm;
    throw std::invalid_argument("unknown field format: " + name);
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

json grid_sidecar(const Grid& g, std::size_t count) {
    return json{{"dim", g.dim},
                {"lo", {g.lo[0], g.lo[1]}},
                {"hi", {g.hi[0], g.hi[1]}},
                {"nodes", {g.n[0], g.n[1]}},
                {"count", count}};
}

void export_csv(const ScalarField& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    const Grid& g = u.grid;
    char buf[96];
    out << (g.dim == 1 ? "x,value\n" : "x,y,value\n");
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            if (g.dim == 1)
                std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.x(i), u(i, j));
            else
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.x(i), g.y(j), u(i, j));
            out << buf;
        }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void export_bin(const ScalarField& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    static_assert(sizeof(double) == 8);
    // assumes a little-endian host, as everything this project targets
    out.write(reinterpret_cast<const char*>(u.values.data()),
              std::streamsize(u.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path);
    write_text_file(path + ".json", grid_sidecar(u.grid, u.values.size()).dump(2) + "\n");
}

void export_pgm(const ScalarField& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    const Grid& g = u.grid;
    double umax = 0.0;
    for (double v : u.values) umax = std::max(umax, v);
    out << "P5\n" << g.n[0] << " " << g.n[1] << "\n65535\n";
    // top image row is the largest y
    for (int j = g.n[1] - 1; j >= 0; --j)
        for (int i = 0; i < g.n[0]; ++i) {
            double v = std::clamp(u(i, j), 0.0, umax);
            unsigned val = umax > 0.0 ? unsigned(std::lround(65535.0 * v / umax)) : 0u;
            unsigned char hi = (val >> 8) & 0xff, lo = val & 0xff;
            out.put(char(hi));
            out.put(char(lo));
        }
    if (!out) throw std::runtime_error("write failed: " + path);
    json side = grid_sidecar(g, u.values.size());
    side["pixel_map"] = {{"from", {0.0, umax}}, {"to", {0, 65535}}};
    write_text_file(path + ".json", side.dump(2) + "\n");
}

} // namespace

void export_field(const ScalarField& u, FieldFormat format, const std::string& path) {
    switch (format) {
        case FieldFormat::Csv: export_csv(u, path); return;
        case FieldFormat::Bin: export_bin(u, path); return;
        case FieldFormat::Pgm: export_pgm(u, path); return;
    }
}

ScalarField import_field_bin(const std::string& path) {
    json side = json::parse(read_text_file(path + ".json"));
    int dim = side.at("dim").get<int>();
    std::array<double, 2> lo{side.at("lo")[0].get<double>(), side.at("lo")[1].get<double>()};
    std::array<double, 2> hi{side.at("hi")[0].get<double>(), side.at("hi")[1].get<double>()};
    std::array<int, 2> n{side.at("nodes")[0].get<int>(), side.at("nodes")[1].get<int>()};
    Grid g = dim == 1 ? Grid::make_1d(lo[0], hi[0], n[0]) : Grid::make_2d(lo, hi, n);

    ScalarField f(g);
    std::size_t count = side.at("count").get<std::size_t>();
    if (count != f.values.size())
        throw std::runtime_error("field sidecar count does not match the grid: " + path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open field file: " + path);
    in.read(reinterpret_cast<char*>(f.values.data()),
            std::streamsize(f.values.size() * sizeof(double)));
    if (std::size_t(in.gcount()) != f.values.size() * sizeof(double))
        throw std::runtime_error("field file truncated: " + path);
    return f;
}

namespace {

CheckRecord::Status status_from_string(const std::string& s) {
    if (s == "pass") return CheckRecord::Status::Pass;
    if (s == "fail") return CheckRecord::Status::Fail;
    if (s == "report") return CheckRecord::Status::ReportOnly;
    if (s == "n/a") return CheckRecord::Status::NotApplicable;
    throw std::runtime_error("unknown check status: " + s);
}

} // namespace

json to_json(const CheckRecord& r) {
    return json{{"name", r.name},
                {"value", r.value},
                {"bound", r.bound},
                {"status", to_string(r.status)},
                {"detail", r.detail}};
}

json to_json(const Report& r) {
    json arr = json::array();
    for (const auto& rec : r.records) arr.push_back(to_json(rec));
    return json{{"records", arr}};
}

Report report_from_json(const json& j) {
    Report rep;
    for (const auto& e : j.at("records")) {
        CheckRecord r;
        r.name = e.at("name").get<std::string>();
        r.value = e.at("value").get<double>();
        r.bound = e.at("bound").get<double>();
        r.status = status_from_string(e.at("status").get<std::string>());
        r.detail = e.at("detail").get<std::string>();
        rep.add(std::move(r));
    }
    return rep;
}

json to_json(const StageRecord& r) {
    return json{{"kappa1", r.kappa1},
                {"kappa2", r.kappa2},
                {"epsilon", r.epsilon},
                {"iters", r.iters},
                {"start_energy", r.start_energy},
                {"energy", r.energy},
                {"grad_norm", r.grad_norm},
                {"min_u_minus_phi", r.min_u_minus_phi},
                {"grad_sup", r.grad_sup},
                {"exterior_volume", r.exterior_volume},
                {"converged", r.converged},
                {"stalled", r.stalled},
                {"wall_ms", r.wall_ms}};
}

StageRecord stage_from_json(const json& j) {
    StageRecord r;
    r.kappa1 = j.at("kappa1").get<double>();
    r.kappa2 = j.at("kappa2").get<double>();
    r.epsilon = j.at("epsilon").get<double>();
    r.iters = j.at("iters").get<int>();
    r.start_energy = j.at("start_energy").get<double>();
    r.energy = j.at("energy").get<double>();
    r.grad_norm = j.at("grad_norm").get<double>();
    r.min_u_minus_phi = j.at("min_u_minus_phi").get<double>();
    r.grad_sup = j.at("grad_sup").get<double>();
    r.exterior_volume = j.at("exterior_volume").get<double>();
    r.converged = j.at("converged").get<bool>();
    r.stalled = j.at("stalled").get<bool>();
    r.wall_ms = j.at("wall_ms").get<double>();
    return r;
}

json to_json(const SceneSpec& s) {
    json dom;
    switch (s.domain.shape) {
        case DomainShape::Interval:
            dom = json{{"shape", "interval"}, {"center", s.domain.center[0]},
                       {"radius", s.domain.radius}};
            break;
        case DomainShape::Disk:
            dom = json{{"shape", "disk"},
                       {"center", {s.domain.center[0], s.domain.center[1]}},
                       {"radius", s.domain.radius}};
            break;
        case DomainShape::Rectangle:
            dom = json{{"shape", "rectangle"},
                       {"lo", {s.domain.lo[0], s.domain.lo[1]}},
                       {"hi", {s.domain.hi[0], s.domain.hi[1]}}};
            break;
    }
    json bumps = json::array();
    for (const auto& b : s.bumps) {
        json jb{{"profile", b.profile == BumpProfile::Poly4 ? "poly4" : "mollifier"},
                {"radius", b.radius},
                {"height", b.height}};
        if (s.dim == 1)
            jb["center"] = b.center[0];
        else
            jb["center"] = {b.center[0], b.center[1]};
        bumps.push_back(jb);
    }
    json box;
    if (s.dim == 1)
        box = json{{"lo", s.box_lo[0]}, {"hi", s.box_hi[0]}, {"nodes", s.nodes[0]}};
    else
        box = json{{"lo", {s.box_lo[0], s.box_lo[1]}},
                   {"hi", {s.box_hi[0], s.box_hi[1]}},
                   {"nodes", {s.nodes[0], s.nodes[1]}}};
    return json{{"box", box}, {"domain", dom}, {"obstacle", bumps}, {"m", s.m}};
}

json RunManifest::to_json() const {
    json stages_j = json::array();
    for (const auto& s : stages) stages_j.push_back(heatopt::to_json(s));
    json sweep_j = json::array();
    for (const auto& e : sweep)
        sweep_j.push_back(json{{"epsilon", e.epsilon},
                               {"volume", e.volume},
                               {"energy", e.energy},
                               {"qualified", e.qualified}});
    return json{{"tool_version", tool_version},
                {"command", command},
                {"config_hash", config_hash},
                {"config", config_echo},
                {"stages", stages_j},
                {"sweep", sweep_j},
                {"epsilon_star", epsilon_star},
                {"qualified", qualified},
                {"diagnostics", heatopt::to_json(diagnostics)},
                {"total_wall_ms", total_wall_ms}};
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::uint64_t>();
    m.config_echo = j.at("config");
    for (const auto& s : j.at("stages")) m.stages.push_back(stage_from_json(s));
    for (const auto& e : j.at("sweep"))
        m.sweep.push_back(EpsSweepEntry{e.at("epsilon").get<double>(),
                                        e.at("volume").get<double>(),
                                        e.at("energy").get<double>(),
                                        e.at("qualified").get<bool>()});
    m.epsilon_star = j.at("epsilon_star").get<double>();
    m.qualified = j.at("qualified").get<bool>();
    m.diagnostics = report_from_json(j.at("diagnostics"));
    m.total_wall_ms = j.at("total_wall_ms").get<double>();
    return m;
}

void RunManifest::save(const std::string& path) const {
    write_text_file(path, to_json().dump(2) + "\n");
}

} // namespace heatopt
