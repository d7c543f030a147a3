#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "heatopt/config.hpp"
#include "heatopt/diagnostics.hpp"
#include "heatopt/field_io.hpp"
#include "heatopt/oracle.hpp"

namespace fs = std::filesystem;
using namespace heatopt;
using nlohmann::json;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

void print_stage_table(const std::vector<StageRecord>& stages) {
    std::printf("%-10s %-10s %-8s %7s %14s %12s %12s %6s\n", "kappa1", "kappa2", "eps", "iters",
                "energy", "min(u-phi)", "ext.volume", "conv");
    for (const auto& s : stages)
        std::printf("%-10.4g %-10.4g %-8.4g %7d %14.8g %12.4g %12.6g %6s\n", s.kappa1, s.kappa2,
                    s.epsilon, s.iters, s.energy, s.min_u_minus_phi, s.exterior_volume,
                    s.converged ? "yes" : (s.stalled ? "STALL" : "no"));
}

void print_report(const Report& rep) {
    for (const auto& r : rep.records)
        std::printf("[%-6s] %-34s value=%-14.6g bound=%-14.6g %s\n", to_string(r.status),
                    r.name.c_str(), r.value, r.bound, r.detail.c_str());
}

void write_fields(const ScalarField& u, const OutputOptions& out, const fs::path& dir) {
    for (const auto& fmt : out.formats)
        export_field(u, parse_field_format(fmt), (dir / ("u." + fmt)).string());
}

RunManifest base_manifest(const std::string& command, const RunConfig& cfg) {
    RunManifest man;
    man.command = command;
    man.config_hash = fnv1a64(cfg.canonical_text);
    man.config_echo = json::parse(cfg.canonical_text);
    return man;
}

int finish_run(const RunConfig& cfg, const fs::path& dir, RunManifest& man,
               const ScalarField& u, const Scene& scene, const PenaltyParams& final_p,
               const Timer& timer, bool stalled) {
    man.diagnostics = run_diagnostics(u, scene, final_p, cfg.solver.grad_tol);
    man.total_wall_ms = timer.ms();
    fs::create_directories(dir);
    write_text_file((dir / "config.json").string(), cfg.canonical_text + "\n");
    write_fields(u, cfg.output, dir);
    write_text_file((dir / "diagnostics.json").string(),
                    to_json(man.diagnostics).dump(2) + "\n");
    man.save((dir / "manifest.json").string());
    print_stage_table(man.stages);
    print_report(man.diagnostics);
    std::printf("run directory: %s\n", dir.string().c_str());
    return stalled ? 1 : 0;
}

StageRecord stage_from_solve(const SolveState& st, const Scene& s, const PenaltyParams& p,
                             double start_energy, double wall_ms) {
    StageRecord rec;
    rec.kappa1 = p.kappa1;
    rec.kappa2 = p.kappa2;
    rec.epsilon = p.epsilon;
    rec.iters = st.iters;
    rec.start_energy = start_energy;
    rec.energy = st.energy_history.back();
    rec.grad_norm = st.grad_norm;
    double mn = 0.0;
    for (std::size_t k = 0; k < st.u.values.size(); ++k)
        mn = std::min(mn, st.u.values[k] - s.phi.values[k]);
    rec.min_u_minus_phi = mn;
    rec.grad_sup = grad_sup_norm(st.u);
    rec.exterior_volume = exterior_positive_volume(st.u, s, s.positive_threshold());
    rec.converged = st.converged;
    rec.stalled = st.stalled;
    rec.wall_ms = wall_ms;
    return rec;
}

int cmd_solve(const std::string& config_path, const std::string& out_dir, double seed_volume) {
    Timer timer;
    RunConfig cfg = load_config(config_path);
    Scene scene = build_scene(cfg.scene);
    ScalarField u0 = seed_volume > 0.0 ? initial_guess(scene, seed_volume) : ScalarField(scene.grid);

    Timer solve_timer;
    SolveState st = solve_fixed_params(u0, scene, cfg.penalty, cfg.solver);

    RunManifest man = base_manifest("solve", cfg);
    man.stages.push_back(stage_from_solve(st, scene, cfg.penalty,
                                          perturbed_energy(u0, scene, cfg.penalty).total,
                                          solve_timer.ms()));
    return finish_run(cfg, out_dir.empty() ? cfg.output.dir : out_dir, man, st.u, scene,
                      cfg.penalty, timer, st.stalled || !st.converged);
}

int cmd_anneal(const std::string& config_path, const std::string& out_dir, double seed_volume) {
    Timer timer;
    RunConfig cfg = load_config(config_path);
    Scene scene = build_scene(cfg.scene);
    Schedule sched = cfg.make_schedule(scene, cfg.penalty.epsilon);
    if (seed_volume > 0.0) sched.seed_volume = seed_volume;

    AnnealResult res = anneal(scene, sched);
    RunManifest man = base_manifest("anneal", cfg);
    man.stages = res.stages;
    PenaltyParams final_p{res.stages.back().kappa1, res.stages.back().kappa2, sched.epsilon};
    return finish_run(cfg, out_dir.empty() ? cfg.output.dir : out_dir, man, res.state.u, scene,
                      final_p, timer, !res.all_converged);
}

int cmd_sweep_eps(const std::string& config_path, const std::string& out_dir) {
    Timer timer;
    RunConfig cfg = load_config(config_path);
    Scene scene = build_scene(cfg.scene);
    Schedule sched = cfg.make_schedule(scene, cfg.epsilons.front());
    double vol_tol = cfg.default_vol_tol(scene);

    EpsSelection sel = select_epsilon(scene, cfg.epsilons, sched, vol_tol);
    RunManifest man = base_manifest("sweep-eps", cfg);
    man.stages = sel.result.stages;
    man.sweep = sel.tried;
    man.epsilon_star = sel.epsilon_star;
    man.qualified = sel.qualified;
    std::printf("epsilon sweep (vol_tol %.6g):\n", vol_tol);
    for (const auto& e : sel.tried)
        std::printf("  eps=%-10.6g volume=%-12.8g energy=%-14.8g %s\n", e.epsilon, e.volume,
                    e.energy, e.qualified ? "qualified" : "");
    std::printf("selected epsilon_star = %.6g (%s)\n", sel.epsilon_star,
                sel.qualified ? "volume constraint met" : "NOT met; best available");

    PenaltyParams final_p{sel.result.stages.back().kappa1, sel.result.stages.back().kappa2,
                          sel.epsilon_star};
    bool stalled = false;
    for (const auto& st : sel.result.stages) stalled = stalled || st.stalled;
    return finish_run(cfg, out_dir.empty() ? cfg.output.dir : out_dir, man, sel.result.state.u,
                      scene, final_p, timer, stalled);
}

int cmd_analyze(const std::string& config_path, const std::string& field_path,
                const std::string& out_dir) {
    RunConfig cfg = load_config(config_path);
    Scene scene = build_scene(cfg.scene);
    ScalarField u = import_field_bin(field_path);
    if (!(u.grid == scene.grid))
        throw std::runtime_error("analyze: field grid does not match the scene grid");

    Report rep = run_diagnostics(u, scene, cfg.penalty, cfg.solver.grad_tol);
    print_report(rep);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file((fs::path(out_dir) / "diagnostics.json").string(),
                        to_json(rep).dump(2) + "\n");
    } else {
        std::printf("%s\n", to_json(rep).dump(2).c_str());
    }
    return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& out_dir, int resolution) {
    RunConfig cfg = load_config(config_path);
    Scene scene = build_scene(cfg.scene);
    fs::create_directories(out_dir);

    json golden;
    ScalarField u_star(scene.grid);
    if (scene.grid.dim == 1) {
        Oracle1DResult r = oracle_solve_1d(scene, resolution > 0 ? resolution : 10000);
        golden = json{{"kind", "1d"},
                      {"scene_hash", fnv1a64(to_json(cfg.scene).dump())},
                      {"resolution", r.resolution},
                      {"t_star", r.t_star},
                      {"energy", r.energy},
                      {"has_free_boundary", r.has_free_boundary},
                      {"fb_points", {r.fb_points[0], r.fb_points[1]}},
                      {"m", r.m}};
        u_star = r.sample(scene);
        std::printf("1D oracle: t_star=%.12g energy=%.12g fb=[%.6g, %.6g]\n", r.t_star, r.energy,
                    r.fb_points[0], r.fb_points[1]);
    } else {
        OracleRadialResult r = oracle_radial_2d(scene, resolution > 0 ? resolution : 2048);
        golden = json{{"kind", "radial"},
                      {"scene_hash", fnv1a64(to_json(cfg.scene).dump())},
                      {"resolution", r.resolution},
                      {"t_star", r.t_star},
                      {"energy", r.energy},
                      {"R_star", r.R_star},
                      {"m", r.m}};
        u_star = r.sample(scene);
        std::printf("radial oracle: t_star=%.12g energy=%.12g R_star=%.12g\n", r.t_star, r.energy,
                    r.R_star);
    }
    write_text_file((fs::path(out_dir) / "golden.json").string(), golden.dump(2) + "\n");
    for (const auto& fmt : cfg.output.formats)
        export_field(u_star, parse_field_format(fmt), (fs::path(out_dir) / ("u_star." + fmt)).string());
    std::printf("golden file: %s\n", (fs::path(out_dir) / "golden.json").string().c_str());
    return 0;
}

int cmd_export(const std::string& field_path, const std::string& format,
               const std::string& out_path) {
    ScalarField u = import_field_bin(field_path);
    export_field(u, parse_field_format(format), out_path);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heatopt: insulated heat-conduction energy minimization on uniform grids"};
    app.require_subcommand(0, 1);

    bool show_reference = false;
    app.add_flag("--config-reference", show_reference, "print the config schema with defaults");

    std::string config_path, out_dir, field_path, format = "csv";
    double seed_volume = 0.0;
    int resolution = 0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_dir, "output directory");
    };

    CLI::App* solve = app.add_subcommand("solve", "minimize at fixed penalty parameters");
    add_common(solve, true);
    solve->add_option("--seed-volume", seed_volume,
                      "start from the seeded initial guess with this exterior volume");

    CLI::App* anneal_cmd = app.add_subcommand("anneal", "run the kappa1 then kappa2 continuation");
    add_common(anneal_cmd, true);
    anneal_cmd->add_option("--seed-volume", seed_volume, "exterior seed volume (default m)");

    CLI::App* sweep = app.add_subcommand("sweep-eps", "anneal per epsilon, select the largest "
                                                      "epsilon meeting the volume constraint");
    add_common(sweep, true);

    CLI::App* analyze = app.add_subcommand("analyze", "diagnostics on a saved field");
    add_common(analyze, true);
    analyze->add_option("--field", field_path, "binary field file (.bin)")->required();

    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "regenerate golden files for symmetric scenes");
    add_common(oracle_cmd, true);
    oracle_cmd->add_option("--resolution", resolution, "oracle grid cells");

    CLI::App* export_cmd = app.add_subcommand("export", "convert a saved binary field");
    export_cmd->add_option("--field", field_path, "binary field file (.bin)")->required();
    export_cmd->add_option("--format", format, "csv, bin or pgm");
    export_cmd->add_option("--out", out_dir, "output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (show_reference) {
            std::printf("%s", config_reference().c_str());
            return 0;
        }
        if (solve->parsed()) return cmd_solve(config_path, out_dir, seed_volume);
        if (anneal_cmd->parsed()) return cmd_anneal(config_path, out_dir, seed_volume);
        if (sweep->parsed()) return cmd_sweep_eps(config_path, out_dir);
        if (analyze->parsed()) return cmd_analyze(config_path, field_path, out_dir);
        if (oracle_cmd->parsed()) return cmd_oracle(config_path, out_dir, resolution);
        if (export_cmd->parsed()) return cmd_export(field_path, format, out_dir);
        std::printf("%s", app.help().c_str());
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
