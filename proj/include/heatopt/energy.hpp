#pragma once

#include "heatopt/grid.hpp"
#include "heatopt/penalty.hpp"
#include "heatopt/scene.hpp"

namespace heatopt {

struct EnergyBreakdown {
    double dirichlet = 0.0;       // 1/2 int |grad u|^2, cell-based forward differences
    double penalty_A_total = 0.0; // int A_k1(u - phi)
    double volume_measured = 0.0; // int_{D^c} B_k2(u)
    double f_value = 0.0;         // f_eps(volume_measured)
    double total = 0.0;           // dirichlet + penalty_A_total + f_value
};

// Discrete Dirichlet energy: each cell contributes
//   h^d * 1/2 * sum_axis ((f(p+e) - f(p)) / h_axis)^2
// over its corner p. With zero boundary values this makes the nodal energy
// gradient exactly -h^d * (central-stencil Laplacian) at interior nodes, so
// first_variation is the exact discrete gradient of perturbed_energy.
double dirichlet_energy(const ScalarField& f);

// The full three-term functional. Requires u = 0 on box boundary nodes.
EnergyBreakdown perturbed_energy(const ScalarField& u, const Scene& s, const PenaltyParams& p);

// Euler-Lagrange residual direction:
//   g = -lap(u) + alpha_k1(u - phi) + f'(int_{D^c} B(u)) * beta_k2(u) * chi_{D^c}
// at interior nodes, 0 on the boundary. Equals the gradient of
// perturbed_energy with respect to nodal values divided by the node
// quadrature weight.
ScalarField first_variation(const ScalarField& u, const Scene& s, const PenaltyParams& p);

// Single-parameter functional: Dirichlet energy plus f_eps of the sharp
// nodal volume of {u > threshold} outside D.
double sharp_energy(const ScalarField& u, const Scene& s, double epsilon, double threshold);

// Trapezoid-weighted nodal measure of {u > threshold} \ D.
double exterior_positive_volume(const ScalarField& u, const Scene& s, double threshold);

// Dirichlet minimizer above phi vanishing outside D, computed by projected
// SOR for the discrete obstacle problem (w >= phi, stencil-Laplacian <= 0,
// equality off contact). Its Dirichlet energy bounds the perturbed minimum
// for every parameter triple.
struct UniversalCompetitor {
    ScalarField w;
    double energy = 0.0; // Dirichlet energy of w
    int iters = 0;
    double residual = 0.0;
};

UniversalCompetitor universal_competitor(const Scene& s);

} // namespace heatopt
