#pragma once

#include <vector>

#include "heatopt/solver.hpp"

namespace heatopt {

// Shrink kappa1 to its floor at the initial kappa2, then shrink kappa2, warm
// starting every stage from the previous solution. Floors are tied to the
// grid: kernels narrower than a cell are unresolved, so shrinking further
// only adds stiffness without changing the discrete limit.
struct Schedule {
    std::vector<double> kappa1_seq; // strictly decreasing, positive
    std::vector<double> kappa2_seq; // strictly decreasing, positive
    double epsilon = 0.25;
    double kappa1_floor_scale = 1.0; // floor = scale * h_min^2
    double kappa2_floor_scale = 1.0; // floor = scale * h_min / 2
    double seed_volume = 0.0;        // <= 0: scene target m
    SolverOptions solver;

    void validate() const;
    double kappa1_floor(const Grid& g) const { return kappa1_floor_scale * g.min_h() * g.min_h(); }
    double kappa2_floor(const Grid& g) const { return kappa2_floor_scale * 0.5 * g.min_h(); }
};

// Geometric sequences with ratio 1/2, 6 stages each, scaled by the obstacle
// height.
Schedule default_schedule(const Scene& s, double epsilon);

struct StageRecord {
    double kappa1 = 0.0, kappa2 = 0.0, epsilon = 0.0;
    int iters = 0;
    double start_energy = 0.0;
    double energy = 0.0;
    double grad_norm = 0.0;
    double min_u_minus_phi = 0.0;
    double grad_sup = 0.0;
    double exterior_volume = 0.0;
    bool converged = false;
    bool stalled = false;
    double wall_ms = 0.0;
};

struct AnnealResult {
    SolveState state;
    std::vector<StageRecord> stages;
    bool all_converged = false;
};

AnnealResult anneal(const Scene& s, const Schedule& sched);

// Anneal per epsilon from largest to smallest; the first (largest) epsilon
// whose final exterior positive volume lies within vol_tol of m wins, so
// epsilon never shrinks further than needed. If none qualifies the closest
// state is returned with qualified = false.
struct EpsSweepEntry {
    double epsilon = 0.0;
    double volume = 0.0;
    double energy = 0.0;
    bool qualified = false;
};

struct EpsSelection {
    double epsilon_star = 0.0;
    AnnealResult result;
    bool qualified = false;
    std::vector<EpsSweepEntry> tried;
};

EpsSelection select_epsilon(const Scene& s, const std::vector<double>& epsilons,
                            const Schedule& sched_template, double vol_tol);

} // namespace heatopt
