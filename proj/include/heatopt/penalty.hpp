#pragma once

namespace heatopt {

// The three scalar kernels of the perturbed functional and their derivatives.
// All are stateless pure functions.

struct PenaltyParams {
    double kappa1 = 0.1;
    double kappa2 = 0.5;
    double epsilon = 0.25;

    void validate() const;
};

struct PenaltyValue {
    double value = 0.0;
    double slope = 0.0;
};

// Obstacle penalty A and its derivative alpha. Nonnegative, decreasing,
// convex, vanishing on [0,inf). Linear tail of slope -1/kappa1 for
// t < -kappa1, joined C^1 by the quadratic t^2/(2*kappa1^2) on [-kappa1, 0):
//   A(t) = 0                      for t >= 0
//   A(t) = t^2 / (2 kappa1^2)     for -kappa1 <= t < 0
//   A(t) = -(t + kappa1/2)/kappa1 for t < -kappa1
PenaltyValue penalty_A(double t, double kappa1);

// Volume regularizer B and its a.e. derivative beta:
//   B(s) = clamp(s/kappa2, 0, 1)
// beta is 1/kappa2 strictly inside the ramp and 0 elsewhere; at the kinks
// s = 0 and s = kappa2 it takes 0, the one-sided value from the flat side,
// which keeps u == 0 stationary for the discrete functional.
PenaltyValue regularizer_B(double s, double kappa2);

// Volume misfit penalty f and its derivative: zero at v = m, slope epsilon
// to the left, slope 1/epsilon to the right. The derivative at v = m takes
// epsilon (the descent-friendly subgradient). Rejects v < 0.
PenaltyValue volume_penalty_f(double v, double epsilon, double m);

} // namespace heatopt
