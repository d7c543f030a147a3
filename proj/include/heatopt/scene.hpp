#pragma once

#include <array>
#include <string>
#include <vector>

#include "heatopt/grid.hpp"
#include "heatopt/report.hpp"

namespace heatopt {

enum class DomainShape { Interval, Disk, Rectangle };
enum class BumpProfile { Poly4, Mollifier };

// The heated region D: an interval (1D) or a disk / axis-aligned rectangle (2D).
struct DomainSpec {
    DomainShape shape = DomainShape::Interval;
    std::array<double, 2> center{0.0, 0.0}; // interval & disk
    double radius = 1.0;                    // interval & disk
    std::array<double, 2> lo{0.0, 0.0};     // rectangle
    std::array<double, 2> hi{0.0, 0.0};     // rectangle

    bool contains(double x, double y) const;
    // Signed distance is not needed; this is the exact distance from an
    // exterior point to D (0 inside).
    double exterior_distance(double x, double y) const;
    double diameter(int dim) const;
    double perimeter(int dim) const; // measure of the boundary (2 points in 1D)
};

// One radial obstacle bump. Profiles, with s = |x-c|/radius < 1:
//   poly4:     height * (1 - s^2)^4
//   mollifier: height * exp(1 - 1/(1 - s^2))
struct BumpSpec {
    BumpProfile profile = BumpProfile::Poly4;
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.5;
    double height = 1.0;
};

struct SceneSpec {
    int dim = 1;
    std::array<double, 2> box_lo{-4.0, -4.0};
    std::array<double, 2> box_hi{4.0, 4.0};
    std::array<int, 2> nodes{513, 1};
    DomainSpec domain;
    std::vector<BumpSpec> bumps;
    double m = 1.0;
};

// Immutable problem instance: grid, sharp nodal indicator of D, obstacle phi
// with its closed-form Laplacian sampled at nodes, target exterior volume m,
// and the obstacle norms used by the explicit estimates.
struct Scene {
    SceneSpec spec;
    Grid grid;
    ScalarField chi_D;   // 1 on nodes strictly inside D, else 0
    ScalarField phi;     // >= 0, zero wherever chi_D == 0
    ScalarField lap_phi; // analytic Laplacian of phi at nodes, not a stencil
    double m = 0.0;
    double max_phi = 0.0;
    double c1_norm_phi = 0.0;      // max(sup |phi|, grad_sup_norm(phi))
    double c11_seminorm_phi = 0.0; // sup |analytic Laplacian of phi|

    double positive_threshold() const { return 1e-8 * (max_phi > 1.0 ? max_phi : 1.0); }
};

// Evaluate phi and its analytic Laplacian at a point (sum over bumps).
double eval_phi(const SceneSpec& spec, double x, double y);
double eval_lap_phi(const SceneSpec& spec, double x, double y);

// Validates the spec geometry (D strictly inside the box, every bump support
// strictly inside D) and populates all Scene fields. Deterministic: the same
// spec reproduces bit-identical fields.
Scene build_scene(const SceneSpec& spec);

// Reports nodal support containment, nonnegativity, and the sign of the
// analytic Laplacian of phi on the interior sublevel sets
// {phi > eta * max_phi}, eta in {0.01, 0.1, 0.5}. A smooth compactly
// supported bump cannot have a negative Laplacian up to its support edge, so
// negativity is reported on these sets rather than asserted globally.
// Failed mathematical hypotheses are reported, never thrown.
Report validate_scene(const Scene& s);

} // namespace heatopt
