#include "heatopt/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace heatopt {

void PenaltyParams::validate() const {
    if (!(kappa1 > 0.0) || !std::isfinite(kappa1))
        throw std::invalid_argument("penalty: kappa1 must be positive and finite");
    if (!(kappa2 > 0.0) || !std::isfinite(kappa2))
        throw std::invalid_argument("penalty: kappa2 must be positive and finite");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("penalty: epsilon must be positive and finite");
}

PenaltyValue penalty_A(double t, double kappa1) {
    if (!(kappa1 > 0.0)) throw std::invalid_argument("penalty_A: kappa1 must be positive");
    if (t >= 0.0) return {0.0, 0.0};
    if (t >= -kappa1) return {t * t / (2.0 * kappa1 * kappa1), t / (kappa1 * kappa1)};
    return {-(t + 0.5 * kappa1) / kappa1, -1.0 / kappa1};
}

PenaltyValue regularizer_B(double s, double kappa2) {
    if (!(kappa2 > 0.0)) throw std::invalid_argument("regularizer_B: kappa2 must be positive");
    if (s <= 0.0) return {0.0, 0.0};
    if (s >= kappa2) return {1.0, 0.0};
    return {s / kappa2, 1.0 / kappa2};
}

PenaltyValue volume_penalty_f(double v, double epsilon, double m) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("volume_penalty_f: epsilon must be positive");
    if (!(m > 0.0)) throw std::invalid_argument("volume_penalty_f: m must be positive");
    if (v < 0.0) throw std::invalid_argument("volume_penalty_f: volume must be nonnegative");
    if (v <= m) return {epsilon * (v - m), epsilon};
    return {(v - m) / epsilon, 1.0 / epsilon};
}

} // namespace heatopt
