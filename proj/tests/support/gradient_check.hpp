#pragma once

#include <cmath>
#include <stdexcept>

#include "heatopt/energy.hpp"
#include "test_helpers.hpp"

// Directional-derivative check of first_variation against central finite
// differences of perturbed_energy. The random state is built away from every
// kernel kink: u - phi avoids {-kappa1, 0}, u avoids {0, kappa2} outside D,
// and the measured volume must sit away from the f kink at m.
struct GradientCheck {
    double max_rel_err = 0.0;
    double volume_margin = 0.0;
};

inline GradientCheck gradient_consistency_check(const heatopt::Scene& s,
                                                const heatopt::PenaltyParams& p, TestRng& rng,
                                                int n_dirs, double tau = 1e-6) {
    using namespace heatopt;
    const Grid& g = s.grid;
    const double margin = 1e-3;

    ScalarField u(g);
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            if (g.is_boundary(i, j)) continue;
            std::size_t k = g.index(i, j);
            double xi = 0.0;
            switch (rng.uniform_int(0, 2)) {
                case 0: xi = -p.kappa1 * rng.uniform(1.5, 3.0); break; // linear tail
                case 1: xi = -p.kappa1 * rng.uniform(0.2, 0.8); break; // quadratic piece
                default: // above the obstacle, clear of the B ramp kinks
                    do {
                        xi = rng.uniform(0.05, 0.6);
                    } while (std::fabs(xi - p.kappa2) < 3.0 * margin);
                    break;
            }
            u.values[k] = s.phi.values[k] + xi;
        }

    EnergyBreakdown e0 = perturbed_energy(u, s, p);
    GradientCheck out;
    out.volume_margin = std::fabs(e0.volume_measured - s.m);
    if (out.volume_margin < 10.0 * margin)
        throw std::runtime_error("gradient check setup landed on the volume kink; reseed");

    ScalarField grad = first_variation(u, s, p);
    ScalarField up(g), um(g), dir(g);
    for (int d = 0; d < n_dirs; ++d) {
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i)
                dir(i, j) = g.is_boundary(i, j) ? 0.0 : rng.uniform(-1.0, 1.0);
        double inner = 0.0;
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i)
                inner += grad(i, j) * dir(i, j) * g.node_weight(i, j);
        for (std::size_t k = 0; k < u.values.size(); ++k) {
            up.values[k] = u.values[k] + tau * dir.values[k];
            um.values[k] = u.values[k] - tau * dir.values[k];
        }
        double fd = (perturbed_energy(up, s, p).total - perturbed_energy(um, s, p).total) /
                    (2.0 * tau);
        double rel = std::fabs(inner - fd) / std::max(std::fabs(fd), 1e-12);
        out.max_rel_err = std::max(out.max_rel_err, rel);
    }
    return out;
}
