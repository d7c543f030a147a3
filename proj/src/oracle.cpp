#include "heatopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace heatopt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kTScan = 10000;

// Exhaustive scan over [0, t_max] followed by one golden-section refinement
// of the bracketing interval. Ties break to the smallest t.
double scan_minimize(const std::function<double(double)>& energy, double t_max,
                     double* best_val) {
    if (t_max <= 0.0) {
        if (best_val) *best_val = energy(0.0);
        return 0.0;
    }
    int best_k = 0;
    double best_e = energy(0.0);
    for (int k = 1; k < kTScan; ++k) {
        double t = t_max * double(k) / double(kTScan - 1);
        double e = energy(t);
        if (e < best_e) {
            best_e = e;
            best_k = k;
        }
    }
    double lo = t_max * double(std::max(0, best_k - 1)) / double(kTScan - 1);
    double hi = t_max * double(std::min(kTScan - 1, best_k + 1)) / double(kTScan - 1);

    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = energy(x1), f2 = energy(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, t_max); ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = energy(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = energy(x2);
        }
    }
    double t_mid = 0.5 * (a + b);
    double e_mid = energy(t_mid);
    if (e_mid < best_e) {
        best_e = e_mid;
        if (best_val) *best_val = e_mid;
        return t_mid;
    }
    if (best_val) *best_val = best_e;
    return t_max * double(best_k) / double(kTScan - 1);
}

// Least concave majorant of the samples (x_i, v_i) via the upper convex
// hull (monotone chain over sorted abscissae). In 1D this is exactly the
// discrete obstacle solution: concave, above the obstacle, linear off
// contact, boundary values attained at the extreme abscissae.
void upper_concave_majorant(const std::vector<double>& x, const std::vector<double>& v,
                            std::vector<double>& out) {
    const std::size_t n = x.size();
    std::vector<std::size_t> hull;
    hull.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        while (hull.size() >= 2) {
            std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            // keep b only if it lies strictly above chord a->i
            double cross = (x[b] - x[a]) * (v[i] - v[a]) - (v[b] - v[a]) * (x[i] - x[a]);
            if (cross < 0.0) break; // b above the chord: convex-down turn, keep
            hull.pop_back();
        }
        hull.push_back(i);
    }
    out.assign(n, 0.0);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (seg + 1 < hull.size() && x[hull[seg + 1]] < x[i]) ++seg;
        std::size_t a = hull[seg], b = hull[std::min(seg + 1, hull.size() - 1)];
        if (a == b || x[b] == x[a]) {
            out[i] = v[a];
        } else {
            double w = (x[i] - x[a]) / (x[b] - x[a]);
            out[i] = (1.0 - w) * v[a] + w * v[b];
        }
    }
}

double piecewise_energy_1d(const std::vector<double>& x, const std::vector<double>& u) {
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        double dx = x[i + 1] - x[i];
        double d = (u[i + 1] - u[i]) / dx;
        e += 0.5 * d * d * dx;
    }
    return e;
}

double interp_table(const std::vector<double>& xs, const std::vector<double>& vs, double x) {
    if (x <= xs.front()) return vs.front();
    if (x >= xs.back()) return vs.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = std::size_t(it - xs.begin()) - 1;
    double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - w) * vs[i] + w * vs[i + 1];
}

} // namespace

double Oracle1DResult::eval(double x) const {
    double ax = std::fabs(x - center);
    if (ax <= r_D) return interp_table(fine_x, fine_u, x - center);
    double ramp = 0.5 * m;
    return t_star * std::max(0.0, 1.0 - (ax - r_D) / ramp);
}

ScalarField Oracle1DResult::sample(const Scene& s) const {
    ScalarField f(s.grid);
    for (int i = 0; i < s.grid.n[0]; ++i) f.values[i] = eval(s.grid.x(i));
    f.zero_boundary();
    return f;
}

Oracle1DResult oracle_solve_1d(const Scene& s, int resolution) {
    if (s.grid.dim != 1) throw std::invalid_argument("oracle_solve_1d: scene must be 1D");
    if (resolution < 8) throw std::invalid_argument("oracle_solve_1d: resolution too small");
    const DomainSpec& d = s.spec.domain;
    const double r_D = d.radius;
    const double c = d.center[0];

    // symmetry: phi even about the domain center
    for (int k = 1; k <= 64; ++k) {
        double x = r_D * double(k) / 64.0;
        if (std::fabs(eval_phi(s.spec, c + x, 0.0) - eval_phi(s.spec, c - x, 0.0)) >
            1e-12 * std::max(1.0, s.max_phi))
            throw std::invalid_argument("oracle_solve_1d: scene is not symmetric");
    }
    double side = r_D + 0.5 * s.m;
    if (c + side >= s.spec.box_hi[0] || c - side <= s.spec.box_lo[0])
        throw std::invalid_argument(
            "oracle_solve_1d: exterior volume m does not fit inside the box");

    Oracle1DResult res;
    res.resolution = resolution;
    res.r_D = r_D;
    res.m = s.m;
    res.center = c;

    const int n = resolution + 1;
    std::vector<double> x(n), phi(n);
    for (int i = 0; i < n; ++i) {
        x[i] = -r_D + 2.0 * r_D * double(i) / double(n - 1);
        phi[i] = eval_phi(s.spec, c + x[i], 0.0);
    }

    std::vector<double> pts(n), prof(n);
    auto energy_at = [&](double t) {
        pts = phi;
        pts.front() = std::max(pts.front(), t);
        pts.back() = std::max(pts.back(), t);
        upper_concave_majorant(x, pts, prof);
        return piecewise_energy_1d(x, prof) + 2.0 * t * t / s.m;
    };

    double best_e = 0.0;
    res.t_star = scan_minimize(energy_at, s.max_phi, &best_e);
    res.energy = best_e;

    pts = phi;
    pts.front() = std::max(pts.front(), res.t_star);
    pts.back() = std::max(pts.back(), res.t_star);
    upper_concave_majorant(x, pts, res.fine_u);
    res.fine_x = x;

    res.has_free_boundary = res.t_star > 0.0;
    res.fb_points = {c - side, c + side};
    return res;
}

double OracleRadialResult::eval_radius(double r) const {
    if (r <= r_D) return interp_table(fine_r, fine_u, r);
    if (r >= R_star) return 0.0;
    return t_star * std::log(R_star / r) / std::log(R_star / r_D);
}

ScalarField OracleRadialResult::sample(const Scene& s) const {
    ScalarField f(s.grid);
    for (int j = 0; j < s.grid.n[1]; ++j)
        for (int i = 0; i < s.grid.n[0]; ++i) {
            double r = std::hypot(s.grid.x(i) - center[0], s.grid.y(j) - center[1]);
            f(i, j) = eval_radius(r);
        }
    f.zero_boundary();
    return f;
}

namespace {

// Radial obstacle problem on [0, r_D] with boundary value t: primal-dual
// active set over the r-weighted three-point operator. Unknowns 0..n-1,
// node n pinned at t. Returns the profile; the active set persists across
// calls as a warm start.
struct RadialObstacle {
    int n; // cells
    double dr;
    double phi_max = 0.0;
    std::vector<double> r, phi;
    std::vector<char> active;
    std::vector<int> flips;
    std::vector<double> u, a, b, cc, rhs;

    RadialObstacle(int n_, double r_D, const std::vector<double>& phi_)
        : n(n_), dr(r_D / n_), r(n_ + 1), phi(phi_), active(n_ + 1, 0), flips(n_ + 1, 0),
          u(n_ + 1), a(n_ + 1), b(n_ + 1), cc(n_ + 1), rhs(n_ + 1) {
        for (int i = 0; i <= n; ++i) r[i] = dr * i;
        for (double p : phi) phi_max = std::max(phi_max, p);
    }

    // -(r u')' stencil coefficients; row i: a u_{i-1} + b u_i + c u_{i+1}
    void row(int i, double& ai, double& bi, double& ci) const {
        if (i == 0) {
            ai = 0.0;
            ci = -0.5 * dr; // r_{1/2}
            bi = 0.5 * dr;
        } else {
            double rm = r[i] - 0.5 * dr, rp = r[i] + 0.5 * dr;
            ai = -rm;
            ci = -rp;
            bi = rm + rp;
        }
    }

    void solve(double t) {
        // complementarity slack in solution units; the tridiagonal solve
        // carries O(n^2 eps) rounding, so the slack scales with n
        const double slack = std::max(1e-12, 1e-13 * double(n)) * std::max({1.0, t, phi_max});
        std::fill(flips.begin(), flips.end(), 0);

        // contact fronts can grow one ring per pass from a cold start, so the
        // pass budget scales with the grid
        const int max_passes = 3 * n + 100;
        for (int pass = 0; pass < max_passes; ++pass) {
            // assemble: active rows pin u = phi, inactive rows impose the
            // harmonic stencil; node n pinned at t
            for (int i = 0; i < n; ++i) {
                if (active[i]) {
                    a[i] = 0.0;
                    b[i] = 1.0;
                    cc[i] = 0.0;
                    rhs[i] = phi[i];
                } else {
                    row(i, a[i], b[i], cc[i]);
                    rhs[i] = 0.0;
                }
            }
            a[n] = 0.0;
            b[n] = 1.0;
            cc[n] = 0.0;
            rhs[n] = t;

            // Thomas
            for (int i = 1; i <= n; ++i) {
                double w = a[i] / b[i - 1];
                b[i] -= w * cc[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            u[n] = rhs[n] / b[n];
            for (int i = n - 1; i >= 0; --i) u[i] = (rhs[i] - cc[i] * u[i + 1]) / b[i];

            // violated nodes activate, nodes with a negative multiplier
            // release; nodes that keep flipping get pinned on the obstacle
            // (degenerate contact edge; the feasible choice)
            bool changed = false;
            for (int i = 0; i < n; ++i) {
                if (!active[i]) {
                    if (u[i] < phi[i] - slack) {
                        active[i] = 1;
                        ++flips[i];
                        changed = true;
                    }
                } else if (flips[i] < 4) {
                    double ai, bi, ci;
                    row(i, ai, bi, ci);
                    double lam = bi * u[i] + ci * u[i + 1] + (i > 0 ? ai * u[i - 1] : 0.0);
                    if (lam / bi < -slack) {
                        active[i] = 0;
                        ++flips[i];
                        changed = true;
                    }
                }
            }
            if (!changed) {
                for (int i = 0; i < n; ++i) u[i] = std::max(u[i], phi[i]);
                return;
            }
        }
        throw std::runtime_error("oracle_radial_2d: active-set iteration did not settle");
    }

    double energy() const {
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            double rm = 0.5 * (r[i] + r[i + 1]);
            double d = (u[i + 1] - u[i]) / dr;
            e += kPi * rm * d * d * dr;
        }
        return e;
    }
};

} // namespace

OracleRadialResult oracle_radial_2d(const Scene& s, int resolution) {
    if (s.grid.dim != 2 || s.spec.domain.shape != DomainShape::Disk)
        throw std::invalid_argument("oracle_radial_2d: scene must be 2D with a disk domain");
    if (resolution < 8) throw std::invalid_argument("oracle_radial_2d: resolution too small");
    const DomainSpec& d = s.spec.domain;
    for (const auto& bump : s.spec.bumps)
        if (std::hypot(bump.center[0] - d.center[0], bump.center[1] - d.center[1]) >
            1e-12 * std::max(1.0, d.radius))
            throw std::invalid_argument("oracle_radial_2d: scene is not radial");

    OracleRadialResult res;
    res.resolution = resolution;
    res.r_D = d.radius;
    res.m = s.m;
    res.center = d.center;
    res.R_star = std::sqrt(d.radius * d.radius + s.m / kPi);

    for (int axis = 0; axis < 2; ++axis)
        if (d.center[axis] + res.R_star >= s.spec.box_hi[axis] ||
            d.center[axis] - res.R_star <= s.spec.box_lo[axis])
            throw std::invalid_argument(
                "oracle_radial_2d: exterior volume m does not fit inside the box");

    const int n = resolution;
    std::vector<double> phi(n + 1);
    for (int i = 0; i <= n; ++i) {
        double r = d.radius * double(i) / double(n);
        phi[i] = eval_phi(s.spec, d.center[0] + r, d.center[1]);
    }

    RadialObstacle ob(n, d.radius, phi);
    const double log_denom = std::log(res.R_star / d.radius);
    auto energy_at = [&](double t) {
        ob.solve(t);
        return ob.energy() + kPi * t * t / log_denom;
    };

    double best_e = 0.0;
    res.t_star = scan_minimize(energy_at, s.max_phi, &best_e);
    res.energy = best_e;

    ob.solve(res.t_star);
    res.fine_r.resize(n + 1);
    for (int i = 0; i <= n; ++i) res.fine_r[i] = d.radius * double(i) / double(n);
    res.fine_u = ob.u;
    return res;
}

} // namespace heatopt
