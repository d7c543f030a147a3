#include "heatopt/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace heatopt {

namespace {

void require_same_grid(const ScalarField& u, const Scene& s, const char* op) {
    if (!(u.grid == s.grid))
        throw std::invalid_argument(std::string(op) + ": field grid does not match scene grid");
}

void require_zero_boundary(const ScalarField& u, const char* op) {
    const Grid& g = u.grid;
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i)
            if (g.is_boundary(i, j) && u(i, j) != 0.0)
                throw std::invalid_argument(std::string(op) +
                                            ": u must vanish on box boundary nodes");
}

} // namespace

double dirichlet_energy(const ScalarField& f) {
    const Grid& g = f.grid;
    double sum = 0.0;
    if (g.dim == 1) {
        const double ih = 1.0 / g.h[0];
        for (int i = 0; i + 1 < g.n[0]; ++i) {
            double d = (f.values[i + 1] - f.values[i]) * ih;
            sum += 0.5 * d * d * g.h[0];
        }
        return sum;
    }
    const double ihx = 1.0 / g.h[0], ihy = 1.0 / g.h[1];
    const double cell = g.h[0] * g.h[1];
    const int nx = g.n[0];
    for (int j = 0; j + 1 < g.n[1]; ++j) {
        const double* row = f.values.data() + std::size_t(j) * nx;
        const double* above = row + nx;
        double cellsum = 0.0;
        for (int i = 0; i + 1 < nx; ++i) {
            double dx = (row[i + 1] - row[i]) * ihx;
            double dy = (above[i] - row[i]) * ihy;
            cellsum += dx * dx + dy * dy;
        }
        sum += 0.5 * cell * cellsum;
    }
    return sum;
}

EnergyBreakdown perturbed_energy(const ScalarField& u, const Scene& s, const PenaltyParams& p) {
    require_same_grid(u, s, "perturbed_energy");
    require_zero_boundary(u, "perturbed_energy");
    p.validate();

    const Grid& g = s.grid;
    EnergyBreakdown e;
    e.dirichlet = dirichlet_energy(u);

    double a_total = 0.0, vol = 0.0;
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            std::size_t k = g.index(i, j);
            double w = g.node_weight(i, j);
            a_total += penalty_A(u.values[k] - s.phi.values[k], p.kappa1).value * w;
            if (s.chi_D.values[k] == 0.0)
                vol += regularizer_B(u.values[k], p.kappa2).value * w;
        }
    e.penalty_A_total = a_total;
    e.volume_measured = vol;
    e.f_value = volume_penalty_f(vol, p.epsilon, s.m).value;
    e.total = e.dirichlet + e.penalty_A_total + e.f_value;
    return e;
}

ScalarField first_variation(const ScalarField& u, const Scene& s, const PenaltyParams& p) {
    require_same_grid(u, s, "first_variation");
    require_zero_boundary(u, "first_variation");
    p.validate();

    const Grid& g = s.grid;
    double vol = 0.0;
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            std::size_t k = g.index(i, j);
            if (s.chi_D.values[k] == 0.0)
                vol += regularizer_B(u.values[k], p.kappa2).value * g.node_weight(i, j);
        }
    const double fprime = volume_penalty_f(vol, p.epsilon, s.m).slope;

    ScalarField grad = laplacian(u);
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            std::size_t k = g.index(i, j);
            if (g.is_boundary(i, j)) {
                grad.values[k] = 0.0;
                continue;
            }
            double v = -grad.values[k];
            v += penalty_A(u.values[k] - s.phi.values[k], p.kappa1).slope;
            if (s.chi_D.values[k] == 0.0)
                v += fprime * regularizer_B(u.values[k], p.kappa2).slope;
            grad.values[k] = v;
        }
    grad.interior_only = true;
    return grad;
}

double sharp_energy(const ScalarField& u, const Scene& s, double epsilon, double threshold) {
    require_same_grid(u, s, "sharp_energy");
    if (threshold < 0.0) throw std::invalid_argument("sharp_energy: threshold must be >= 0");
    double vol = exterior_positive_volume(u, s, threshold);
    return dirichlet_energy(u) + volume_penalty_f(vol, epsilon, s.m).value;
}

double exterior_positive_volume(const ScalarField& u, const Scene& s, double threshold) {
    require_same_grid(u, s, "exterior_positive_volume");
    if (threshold < 0.0)
        throw std::invalid_argument("exterior_positive_volume: threshold must be >= 0");
    const Grid& g = s.grid;
    double vol = 0.0;
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            std::size_t k = g.index(i, j);
            if (s.chi_D.values[k] == 0.0 && u.values[k] > threshold)
                vol += g.node_weight(i, j);
        }
    return vol;
}

UniversalCompetitor universal_competitor(const Scene& s) {
    const Grid& g = s.grid;
    UniversalCompetitor uc;
    uc.w = ScalarField(g, 0.0);

    // Unknowns: nodes strictly inside D. Everything else is pinned at 0,
    // which is the zero Dirichlet datum on the nodal approximation of dD.
    std::vector<std::size_t> dof;
    dof.reserve(g.num_nodes() / 4);
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i)
            if (s.chi_D(i, j) == 1.0 && !g.is_boundary(i, j)) dof.push_back(g.index(i, j));

    // Start on the obstacle.
    for (std::size_t k : dof) uc.w.values[k] = std::max(0.0, s.phi.values[k]);

    if (dof.empty()) return uc;

    const double ih2x = 1.0 / (g.h[0] * g.h[0]);
    const double ih2y = g.dim == 2 ? 1.0 / (g.h[1] * g.h[1]) : 0.0;
    const double diag = 2.0 * ih2x + 2.0 * ih2y;
    const std::size_t nx = std::size_t(g.n[0]);

    // Near-optimal over-relaxation for the Laplacian on D's node span.
    const double span = s.spec.domain.diameter(g.dim);
    double omega = 2.0 / (1.0 + std::sin(3.14159265358979323846 * g.min_h() / span));
    omega = std::clamp(omega, 1.0, 1.95);

    const int max_sweeps = 200000;
    const double tol = 1e-10;
    double residual = 0.0;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double* w = uc.w.values.data();
        for (std::size_t k : dof) {
            double nb = (w[k - 1] + w[k + 1]) * ih2x;
            if (g.dim == 2) nb += (w[k - nx] + w[k + nx]) * ih2y;
            double gs = nb / diag;
            double relaxed = w[k] + omega * (gs - w[k]);
            w[k] = std::max(relaxed, s.phi.values[k]);
        }
        // complementarity residual: max |min(-lap w, w - phi)| over the dofs
        residual = 0.0;
        for (std::size_t k : dof) {
            double nb = (w[k - 1] + w[k + 1]) * ih2x;
            if (g.dim == 2) nb += (w[k - nx] + w[k + nx]) * ih2y;
            double neg_lap = diag * w[k] - nb;
            double slack = w[k] - s.phi.values[k];
            double r = std::min(neg_lap, slack);
            residual = std::max(residual, std::fabs(r));
        }
        if (residual <= tol) break;
    }
    if (residual > tol)
        throw std::runtime_error("universal_competitor: projected SOR did not reach residual " +
                                 std::to_string(tol) + " within " + std::to_string(max_sweeps) +
                                 " sweeps (residual " + std::to_string(residual) + ")");
    uc.iters = sweep + 1;
    uc.residual = residual;
    uc.energy = dirichlet_energy(uc.w);
    return uc;
}

} // namespace heatopt
