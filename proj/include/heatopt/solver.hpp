#pragma once

#include <vector>

#include "heatopt/energy.hpp"

namespace heatopt {

struct SolverOptions {
    int max_iters = 50000;
    double grad_tol = 1e-6;   // stop when sup |first_variation| <= grad_tol
    double armijo_c = 1e-4;
    double step_init = 0.0;   // <= 0: use h_min^2 / 4, the explicit stability scale
    double step_shrink = 0.5;
    bool clip_box = true;     // clamp iterates to [0, max_phi]

    void validate() const;
};

struct SolveState {
    ScalarField u;
    int iters = 0;
    std::vector<double> energy_history; // totals of accepted iterates, strictly decreasing
    double grad_norm = 0.0;
    bool converged = false;
    bool stalled = false; // line search found no decreasing step at machine precision
};

// Safeguarded gradient descent on the perturbed functional at fixed
// parameters: u <- clip(u - tau * g) with Armijo backtracking on the total
// energy. A step is accepted when
//   E(new) <= E(old) - armijo_c * tau * sum(g^2 * node_weight).
// g is the Euler-Lagrange residual; when the measured volume is pinned at
// the kink of f the f-slope is replaced by the clamped least-squares
// multiplier in [eps, 1/eps], which makes the step volume-neutral to first
// order (the fixed one-sided slope is not a descent model there, and the
// iteration would stall short of the minimizer). The descent direction is
// preconditioned by the local curvature metric -lap + diag(A''): the
// obstacle penalty's 1/kappa1^2 curvature would otherwise throttle explicit
// steps globally. The metric solve is exact in 1D and a fixed-budget
// Jacobi-PCG in 2D; directions are always descent directions, every accepted
// step satisfies the Armijo decrease (falling back to the plain gradient at
// the stability scale when needed), and the energy history is strictly
// decreasing. Deterministic: identical inputs produce identical iterate
// sequences.
SolveState solve_fixed_params(const ScalarField& u0, const Scene& s, const PenaltyParams& p,
                              const SolverOptions& opts);

// sup-norm over interior nodes of the same kink-aware residual the solver
// uses for its stopping rule; a converged state satisfies
// el_residual_norm <= grad_tol.
double el_residual_norm(const SolveState& state, const Scene& s, const PenaltyParams& p);

// Warm-start policy: max of the universal competitor and an exterior collar
// seed carrying positive phase of measure ~ seed_volume outside D (the zero
// exterior phase is a local minimum the descent cannot leave, so the seed
// must carry it). seed_volume <= 0 selects the scene's target m.
ScalarField initial_guess(const Scene& s, double seed_volume = 0.0);

} // namespace heatopt
