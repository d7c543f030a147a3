#pragma once

#include <vector>

#include "heatopt/scene.hpp"

namespace heatopt {

// Independent ground-truth solvers for symmetric scenes, used by the test
// and acceptance suites. They share nothing with the descent solver beyond
// the grid primitives: candidates are parametrized by the boundary value
// t = u(dD), the interior obstacle problem is solved exactly per t, the
// exterior is the closed-form energy minimizer at fixed t and exterior
// volume m, and t is found by exhaustive scan plus one golden-section
// refinement (ties break to the smallest t).

struct Oracle1DResult {
    double t_star = 0.0;
    double energy = 0.0; // total Dirichlet energy of the optimal profile
    bool has_free_boundary = false;
    std::array<double, 2> fb_points{0.0, 0.0}; // +-(r_D + m/2) when t_star > 0
    int resolution = 0;

    // interior profile on the oracle's fine grid over [-r_D, r_D]
    std::vector<double> fine_x, fine_u;
    double r_D = 0.0, m = 0.0, center = 0.0;

    double eval(double x) const;
    ScalarField sample(const Scene& s) const;
};

// Symmetric 1D scenes only: D an interval centered at the origin, phi even.
// The interior part per t is the exact discrete obstacle solution on a fine
// grid with `resolution` cells (the least concave majorant of the obstacle
// samples with boundary values t); the exterior parts are linear ramps from
// t to 0 over length m/2 per side, with Dirichlet energy 2 t^2 / m.
Oracle1DResult oracle_solve_1d(const Scene& s, int resolution);

struct OracleRadialResult {
    double t_star = 0.0;
    double energy = 0.0;
    double R_star = 0.0; // sqrt(r_D^2 + m/pi), from pi (R^2 - r_D^2) = m
    int resolution = 0;

    std::vector<double> fine_r, fine_u; // interior radial profile on [0, r_D]
    double r_D = 0.0, m = 0.0;
    std::array<double, 2> center{0.0, 0.0};

    double eval_radius(double r) const;
    ScalarField sample(const Scene& s) const;
};

// Radial 2D scenes only: D a disk, all bumps centered at its center. The
// interior radial obstacle problem (r-weighted Laplacian) is solved per t by
// a primal-dual active-set method on a fine grid with `resolution` cells;
// the exterior is the radial harmonic t * log(R/r) / log(R/r_D) with R fixed
// by the exact exterior volume m.
OracleRadialResult oracle_radial_2d(const Scene& s, int resolution);

} // namespace heatopt
