#include "heatopt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace heatopt {

namespace {

RegionLabel base_label(double u, double phi, bool in_D, double t_c, double t_z) {
    if (u <= t_z) return RegionLabel::Zero;
    if (in_D) return (u - phi <= t_c) ? RegionLabel::Contact : RegionLabel::HeatedInactive;
    return RegionLabel::ExtPositive;
}

} // namespace

RegionLabels classify_regions(const ScalarField& u, const Scene& s, double t_c, double t_z) {
    if (!(u.grid == s.grid)) throw std::invalid_argument("classify_regions: grid mismatch");
    if (!(t_c > 0.0) || !(t_z > 0.0))
        throw std::invalid_argument("classify_regions: tolerances must be positive");

    const Grid& g = s.grid;
    RegionLabels out;
    out.grid = g;
    out.t_c = t_c;
    out.t_z = t_z;
    out.labels.resize(g.num_nodes());

    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            std::size_t k = g.index(i, j);
            out.labels[k] = base_label(u.values[k], s.phi.values[k], s.chi_D.values[k] == 1.0,
                                       t_c, t_z);
        }

    // Interface nodes: any node with an axis neighbor of a different label.
    std::vector<char> interface(g.num_nodes(), 0);
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            std::size_t k = g.index(i, j);
            if (i + 1 < g.n[0] && out.labels[k] != out.labels[g.index(i + 1, j)])
                interface[k] = interface[g.index(i + 1, j)] = 1;
            if (g.dim == 2 && j + 1 < g.n[1] && out.labels[k] != out.labels[g.index(i, j + 1)])
                interface[k] = interface[g.index(i, j + 1)] = 1;
        }

    // Band: Chebyshev dilation by two cells, then overwrite.
    std::vector<char> band = interface;
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<char> next = band;
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                if (next[g.index(i, j)]) continue;
                for (int dj = -1; dj <= 1 && !next[g.index(i, j)]; ++dj) {
                    if (g.dim == 1 && dj != 0) continue;
                    for (int di = -1; di <= 1; ++di) {
                        int ii = i + di, jj = j + dj;
                        if (ii < 0 || ii >= g.n[0] || jj < 0 || jj >= g.n[1]) continue;
                        if (band[g.index(ii, jj)]) {
                            next[g.index(i, j)] = 1;
                            break;
                        }
                    }
                }
            }
        band.swap(next);
    }
    for (std::size_t k = 0; k < band.size(); ++k)
        if (band[k]) out.labels[k] = RegionLabel::Band;
    return out;
}

double default_sign_tolerance(double grad_tol, const Grid& g) {
    return 10.0 * grad_tol / (g.min_h() * g.min_h());
}

Report check_sign_conditions(const ScalarField& u, const Scene& s, const RegionLabels& labels,
                             double tol) {
    if (!(u.grid == s.grid) || !(labels.grid == s.grid))
        throw std::invalid_argument("check_sign_conditions: grid mismatch");

    const Grid& g = s.grid;
    ScalarField lap = laplacian(u);

    double max_in_D = -std::numeric_limits<double>::infinity();
    double max_abs_heated = 0.0;
    double min_ext = std::numeric_limits<double>::infinity();
    double max_abs_ext_pos = 0.0;
    bool any_in_D = false, any_heated = false, any_ext = false, any_ext_pos = false;

    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            if (g.is_boundary(i, j)) continue;
            std::size_t k = g.index(i, j);
            RegionLabel lab = labels.labels[k];
            if (lab == RegionLabel::Band) continue;
            double lv = lap.values[k];
            if (s.chi_D.values[k] == 1.0) {
                any_in_D = true;
                max_in_D = std::max(max_in_D, lv);
                if (lab == RegionLabel::HeatedInactive) {
                    any_heated = true;
                    max_abs_heated = std::max(max_abs_heated, std::fabs(lv));
                }
            } else {
                any_ext = true;
                min_ext = std::min(min_ext, lv);
                if (lab == RegionLabel::ExtPositive) {
                    any_ext_pos = true;
                    max_abs_ext_pos = std::max(max_abs_ext_pos, std::fabs(lv));
                }
            }
        }

    Report rep;
    rep.add(CheckRecord::pass_fail("sign.lap_nonpositive_in_D", any_in_D ? max_in_D : 0.0, tol,
                                   !any_in_D || max_in_D <= tol,
                                   "max stencil lap(u) over D minus band"));
    rep.add(CheckRecord::pass_fail("sign.harmonic_where_detached", max_abs_heated, tol,
                                   !any_heated || max_abs_heated <= tol,
                                   "max |lap(u)| over heated-inactive minus band"));
    rep.add(CheckRecord::pass_fail("sign.lap_nonnegative_outside_D", any_ext ? min_ext : 0.0,
                                   -tol, !any_ext || min_ext >= -tol,
                                   "min stencil lap(u) over D^c minus band"));
    rep.add(CheckRecord::pass_fail("sign.harmonic_in_exterior_phase", max_abs_ext_pos, tol,
                                   !any_ext_pos || max_abs_ext_pos <= tol,
                                   "max |lap(u)| over exterior positive phase minus band"));
    return rep;
}

Report check_bounds(const ScalarField& u, const Scene& s, const PenaltyParams& p) {
    if (!(u.grid == s.grid)) throw std::invalid_argument("check_bounds: grid mismatch");
    p.validate();
    const double t_z = s.positive_threshold();

    double min_u = 0.0, max_u = 0.0, min_gap = 0.0, max_alpha = 0.0;
    for (std::size_t k = 0; k < u.values.size(); ++k) {
        min_u = std::min(min_u, u.values[k]);
        max_u = std::max(max_u, u.values[k]);
        double gap = u.values[k] - s.phi.values[k];
        min_gap = std::min(min_gap, gap);
        max_alpha = std::max(max_alpha, std::fabs(penalty_A(gap, p.kappa1).slope));
    }

    Report rep;
    double overshoot = std::max(max_u - s.max_phi, -min_u);
    rep.add(CheckRecord::pass_fail("bounds.range", overshoot, t_z, overshoot <= t_z,
                                   "max of (max u - max phi, -min u); u must stay in "
                                   "[0, max phi] up to threshold"));

    double delta = 2.0 * p.kappa1 * p.kappa1 * s.c11_seminorm_phi + t_z;
    rep.add(CheckRecord::pass_fail("bounds.obstacle_violation", min_gap, -delta,
                                   min_gap >= -delta,
                                   "min(u - phi) against the kappa1-stage slack"));

    double alpha_bound = s.c11_seminorm_phi + 1.0 / (p.epsilon * p.kappa2);
    rep.add(CheckRecord::pass_fail("bounds.alpha_sup", max_alpha, alpha_bound,
                                   max_alpha <= alpha_bound,
                                   "max |alpha(u - phi)| vs |D2 phi|_sup + 1/(eps*kappa2)"));
    return rep;
}

namespace {

// Per-axis derivative that avoids differencing across the zero set: central
// where both neighbors are positive, one-sided toward the positive side
// otherwise. Used for q_u sampling near the free boundary, where the
// gradient jumps.
void nodal_gradient_positive_side(const ScalarField& u, double t_z, ScalarField& gx,
                                  ScalarField& gy) {
    const Grid& g = u.grid;
    gx = ScalarField(g);
    gy = ScalarField(g);
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            std::size_t k = g.index(i, j);
            auto axis_deriv = [&](int axis) {
                int lo_i = i - (axis == 0), lo_j = j - (axis == 1);
                int hi_i = i + (axis == 0), hi_j = j + (axis == 1);
                double h = g.h[axis];
                bool has_lo = lo_i >= 0 && lo_j >= 0;
                bool has_hi = hi_i < g.n[0] && hi_j < g.n[1];
                double ulo = has_lo ? u(lo_i, lo_j) : 0.0;
                double uhi = has_hi ? u(hi_i, hi_j) : 0.0;
                if (has_lo && has_hi) {
                    bool plo = ulo > t_z, phi_ = uhi > t_z;
                    if (u.values[k] > t_z) {
                        if (plo && phi_) return (uhi - ulo) / (2.0 * h);
                        if (plo) return (u.values[k] - ulo) / h;
                        if (phi_) return (uhi - u.values[k]) / h;
                        return 0.0;
                    }
                    return (uhi - ulo) / (2.0 * h);
                }
                if (has_hi) return (uhi - u.values[k]) / h;
                if (has_lo) return (u.values[k] - ulo) / h;
                return 0.0;
            };
            gx.values[k] = axis_deriv(0);
            if (g.dim == 2) gy.values[k] = axis_deriv(1);
        }
}

void nodal_gradient_central(const ScalarField& f, ScalarField& gx, ScalarField& gy) {
    const Grid& g = f.grid;
    gx = ScalarField(g);
    gy = ScalarField(g);
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            std::size_t k = g.index(i, j);
            if (i > 0 && i + 1 < g.n[0])
                gx.values[k] = (f(i + 1, j) - f(i - 1, j)) / (2.0 * g.h[0]);
            else if (i + 1 < g.n[0])
                gx.values[k] = (f(i + 1, j) - f(i, j)) / g.h[0];
            else
                gx.values[k] = (f(i, j) - f(i - 1, j)) / g.h[0];
            if (g.dim == 2) {
                if (j > 0 && j + 1 < g.n[1])
                    gy.values[k] = (f(i, j + 1) - f(i, j - 1)) / (2.0 * g.h[1]);
                else if (j + 1 < g.n[1])
                    gy.values[k] = (f(i, j + 1) - f(i, j)) / g.h[1];
                else
                    gy.values[k] = (f(i, j) - f(i, j - 1)) / g.h[1];
            }
        }
}

double bilinear(const ScalarField& f, double x, double y) {
    const Grid& g = f.grid;
    double fx = (x - g.lo[0]) / g.h[0];
    int i = std::clamp(int(std::floor(fx)), 0, g.n[0] - 2);
    double wx = std::clamp(fx - i, 0.0, 1.0);
    if (g.dim == 1) return (1.0 - wx) * f(i, 0) + wx * f(i + 1, 0);
    double fy = (y - g.lo[1]) / g.h[1];
    int j = std::clamp(int(std::floor(fy)), 0, g.n[1] - 2);
    double wy = std::clamp(fy - j, 0.0, 1.0);
    return (1.0 - wx) * (1.0 - wy) * f(i, j) + wx * (1.0 - wy) * f(i + 1, j) +
           (1.0 - wx) * wy * f(i, j + 1) + wx * wy * f(i + 1, j + 1);
}

// Crossing parameter along an edge a -> b of the level function.
double crossing(double la, double lb) { return la / (la - lb); }

} // namespace

FreeBoundary extract_free_boundary(const ScalarField& u, const Scene& s, FbKind kind,
                                   double level_tol) {
    if (!(u.grid == s.grid)) throw std::invalid_argument("extract_free_boundary: grid mismatch");
    const Grid& g = s.grid;
    const bool interior = kind == FbKind::Interior;

    // level function and cell admissibility
    ScalarField level(g);
    for (std::size_t k = 0; k < level.values.size(); ++k)
        level.values[k] = interior ? u.values[k] - s.phi.values[k] - level_tol
                                   : u.values[k] - level_tol;
    auto node_ok = [&](int i, int j) {
        return interior ? s.chi_D(i, j) == 1.0 : s.chi_D(i, j) == 0.0;
    };

    FreeBoundary fb;
    fb.kind = kind;

    // gradient fields: level-function gradient for normals, positive-side
    // |grad u| for q_u
    ScalarField lx, ly, gx, gy;
    nodal_gradient_central(level, lx, ly);
    nodal_gradient_positive_side(u, s.positive_threshold(), gx, gy);

    auto push_point = [&](double x, double y) -> bool {
        double nx_ = bilinear(lx, x, y);
        double ny_ = g.dim == 2 ? bilinear(ly, x, y) : 0.0;
        double nn = std::hypot(nx_, ny_);
        if (!(nn > 1e-300)) return false;
        double vx = -nx_ / nn, vy = -ny_ / nn;
        double hh = g.min_h();
        double sx = x - hh * vx, sy = y - hh * vy;
        double qmx = bilinear(gx, sx, sy);
        double qmy = g.dim == 2 ? bilinear(gy, sx, sy) : 0.0;
        fb.points.push_back({x, y});
        fb.normals.push_back({vx, vy});
        fb.qu_samples.push_back(std::hypot(qmx, qmy));
        return true;
    };

    if (g.dim == 1) {
        for (int i = 0; i + 1 < g.n[0]; ++i) {
            if (!node_ok(i, 0) || !node_ok(i + 1, 0)) continue;
            double la = level.values[i], lb = level.values[i + 1];
            bool pa = la > 0.0, pb = lb > 0.0;
            if (pa == pb) continue;
            double x = g.x(i) + crossing(la, lb) * g.h[0];
            if (push_point(x, 0.0)) {
                // 1D outer normal by sign: positive phase on the left points +1
                fb.normals.back() = {pa ? 1.0 : -1.0, 0.0};
                double sx = x - g.h[0] * fb.normals.back()[0];
                fb.qu_samples.back() = std::fabs(bilinear(gx, sx, 0.0));
                fb.chains.push_back({fb.points.size() - 1, fb.points.size()});
                fb.chain_closed.push_back(0);
            }
        }
        return fb;
    }

    // marching squares: per admissible cell, emit segments between edge
    // crossings; saddle cells split by the center average
    struct Seg {
        std::array<double, 2> a, b;
    };
    std::vector<Seg> segs;
    for (int j = 0; j + 1 < g.n[1]; ++j)
        for (int i = 0; i + 1 < g.n[0]; ++i) {
            if (!node_ok(i, j) || !node_ok(i + 1, j) || !node_ok(i, j + 1) ||
                !node_ok(i + 1, j + 1))
                continue;
            double l00 = level(i, j), l10 = level(i + 1, j);
            double l01 = level(i, j + 1), l11 = level(i + 1, j + 1);
            int code = (l00 > 0.0) | ((l10 > 0.0) << 1) | ((l11 > 0.0) << 2) |
                       ((l01 > 0.0) << 3);
            if (code == 0 || code == 15) continue;

            double x0 = g.x(i), y0 = g.y(j), hx = g.h[0], hy = g.h[1];
            auto bottom = [&] { return std::array<double, 2>{x0 + crossing(l00, l10) * hx, y0}; };
            auto top = [&] { return std::array<double, 2>{x0 + crossing(l01, l11) * hx, y0 + hy}; };
            auto left = [&] { return std::array<double, 2>{x0, y0 + crossing(l00, l01) * hy}; };
            auto right = [&] {
                return std::array<double, 2>{x0 + hx, y0 + crossing(l10, l11) * hy};
            };

            switch (code) {
                case 1: case 14: segs.push_back({left(), bottom()}); break;
                case 2: case 13: segs.push_back({bottom(), right()}); break;
                case 3: case 12: segs.push_back({left(), right()}); break;
                case 4: case 11: segs.push_back({right(), top()}); break;
                case 6: case 9: segs.push_back({bottom(), top()}); break;
                case 7: case 8: segs.push_back({left(), top()}); break;
                case 5: { // corners 00 and 11 positive
                    double center = 0.25 * (l00 + l10 + l01 + l11);
                    if (center > 0.0) {
                        segs.push_back({left(), top()});
                        segs.push_back({right(), bottom()});
                    } else {
                        segs.push_back({left(), bottom()});
                        segs.push_back({right(), top()});
                    }
                    break;
                }
                case 10: { // corners 10 and 01 positive
                    double center = 0.25 * (l00 + l10 + l01 + l11);
                    if (center > 0.0) {
                        segs.push_back({left(), bottom()});
                        segs.push_back({right(), top()});
                    } else {
                        segs.push_back({left(), top()});
                        segs.push_back({right(), bottom()});
                    }
                    break;
                }
                default: break;
            }
        }

    if (segs.empty()) return fb;

    // stitch segments into chains; endpoints are matched exactly (both cells
    // sharing an edge compute the identical crossing point)
    std::map<std::pair<double, double>, std::vector<std::size_t>> at_point;
    for (std::size_t si = 0; si < segs.size(); ++si) {
        at_point[{segs[si].a[0], segs[si].a[1]}].push_back(si);
        at_point[{segs[si].b[0], segs[si].b[1]}].push_back(si);
    }
    std::vector<char> used(segs.size(), 0);

    for (std::size_t start = 0; start < segs.size(); ++start) {
        if (used[start]) continue;

        // walk backward from the start segment to find a chain end (or loop)
        std::size_t first = start;
        std::array<double, 2> tail = segs[start].a;
        {
            std::size_t cur = start;
            std::array<double, 2> back = segs[start].a;
            for (std::size_t guard = 0; guard <= segs.size(); ++guard) {
                auto& inc = at_point[{back[0], back[1]}];
                std::size_t nxt = std::size_t(-1);
                for (std::size_t si : inc)
                    if (si != cur && !used[si]) nxt = si;
                if (nxt == std::size_t(-1) || nxt == start) break;
                back = (segs[nxt].a == back) ? segs[nxt].b : segs[nxt].a;
                cur = nxt;
                first = nxt;
            }
            tail = back;
        }

        // walk forward from the chain end
        std::size_t chain_begin = fb.points.size();
        std::array<double, 2> p = tail;
        push_point(p[0], p[1]);
        std::size_t cur = first;
        for (std::size_t guard = 0; guard <= segs.size(); ++guard) {
            used[cur] = 1;
            p = (segs[cur].a == p) ? segs[cur].b : segs[cur].a;
            push_point(p[0], p[1]);
            auto& inc = at_point[{p[0], p[1]}];
            std::size_t nxt = std::size_t(-1);
            for (std::size_t si : inc)
                if (!used[si]) nxt = si;
            if (nxt == std::size_t(-1)) break;
            cur = nxt;
        }
        std::size_t chain_end = fb.points.size();
        if (chain_end - chain_begin < 2) {
            fb.points.resize(chain_begin);
            fb.normals.resize(chain_begin);
            fb.qu_samples.resize(chain_begin);
            continue;
        }
        bool closed = fb.points[chain_begin] == fb.points[chain_end - 1];
        fb.chains.push_back({chain_begin, chain_end});
        fb.chain_closed.push_back(closed ? 1 : 0);
        for (std::size_t k = chain_begin; k + 1 < chain_end; ++k)
            fb.length += std::hypot(fb.points[k + 1][0] - fb.points[k][0],
                                    fb.points[k + 1][1] - fb.points[k][1]);
    }
    return fb;
}

QuStatistics qu_statistics(const FreeBoundary& fb) {
    if (fb.kind != FbKind::Exterior)
        throw std::invalid_argument("qu_statistics: exterior free boundary required");
    if (fb.qu_samples.empty()) throw std::invalid_argument("qu_statistics: empty free boundary");
    QuStatistics st;
    st.count = fb.qu_samples.size();
    double sum = 0.0;
    for (double q : fb.qu_samples) sum += q;
    st.mean = sum / double(st.count);
    double var = 0.0;
    for (double q : fb.qu_samples) var += (q - st.mean) * (q - st.mean);
    st.std_dev = std::sqrt(var / double(st.count));
    st.rel_std = st.mean != 0.0 ? st.std_dev / std::fabs(st.mean) : 0.0;
    return st;
}

Report check_nondegeneracy(const ScalarField& u, const Scene& s, const PenaltyParams& p,
                           const RegionLabels& labels) {
    if (s.grid.dim != 2) throw std::invalid_argument("check_nondegeneracy: 2D only");
    if (!(u.grid == s.grid)) throw std::invalid_argument("check_nondegeneracy: grid mismatch");
    p.validate();

    const Grid& g = s.grid;
    const double t_z = s.positive_threshold();
    FreeBoundary fb = extract_free_boundary(u, s, FbKind::Exterior, t_z);

    Report rep;
    if (fb.empty()) {
        rep.add(CheckRecord::not_applicable("nondeg.density", "no exterior free boundary"));
        rep.add(CheckRecord::not_applicable("nondeg.vanishing", "no exterior free boundary"));
        return rep;
    }
    const double q_mean = qu_statistics(fb).mean;
    const double display_bound = p.epsilon / (s.c1_norm_phi + 1.0 / p.epsilon);
    const double h = g.min_h();

    for (double R : {4.0 * h, 8.0 * h}) {
        double min_density = std::numeric_limits<double>::infinity();
        std::size_t tested = 0, vanish_violations = 0, premise_hits = 0;

        for (const auto& pt : fb.points) {
            // ball must sit inside the box and avoid the interior contact set
            if (pt[0] - R < g.lo[0] || pt[0] + R > g.hi[0] || pt[1] - R < g.lo[1] ||
                pt[1] + R > g.hi[1])
                continue;
            int i0 = std::max(0, int(std::floor((pt[0] - R - g.lo[0]) / g.h[0])));
            int i1 = std::min(g.n[0] - 1, int(std::ceil((pt[0] + R - g.lo[0]) / g.h[0])));
            int j0 = std::max(0, int(std::floor((pt[1] - R - g.lo[1]) / g.h[1])));
            int j1 = std::min(g.n[1] - 1, int(std::ceil((pt[1] + R - g.lo[1]) / g.h[1])));
            std::size_t in_ball = 0, positive = 0;
            bool touches_contact = false;
            for (int j = j0; j <= j1 && !touches_contact; ++j)
                for (int i = i0; i <= i1; ++i) {
                    double dx = g.x(i) - pt[0], dy = g.y(j) - pt[1];
                    if (dx * dx + dy * dy > R * R) continue;
                    std::size_t k = g.index(i, j);
                    if (labels.labels[k] == RegionLabel::Contact) {
                        touches_contact = true;
                        break;
                    }
                    ++in_ball;
                    if (u.values[k] > t_z) ++positive;
                }
            if (touches_contact || in_ball == 0) continue;
            ++tested;
            min_density = std::min(min_density, double(positive) / double(in_ball));

            // sphere average of u on dB_R
            int n_ang = std::max<int>(16, int(std::ceil(2.0 * 3.14159265358979323846 * R / h)));
            double avg = 0.0;
            for (int a = 0; a < n_ang; ++a) {
                double th = 2.0 * 3.14159265358979323846 * double(a) / double(n_ang);
                avg += bilinear(u, pt[0] + R * std::cos(th), pt[1] + R * std::sin(th));
            }
            avg /= double(n_ang);
            if (avg < 0.01 * q_mean * R) {
                ++premise_hits;
                for (int j = j0; j <= j1; ++j)
                    for (int i = i0; i <= i1; ++i) {
                        double dx = g.x(i) - pt[0], dy = g.y(j) - pt[1];
                        if (dx * dx + dy * dy > 0.25 * R * R) continue;
                        if (u(i, j) > t_z) ++vanish_violations;
                    }
            }
        }

        std::string suffix = (R == 4.0 * h) ? ".R=4h" : ".R=8h";
        if (tested == 0) {
            rep.add(CheckRecord::not_applicable("nondeg.density" + suffix,
                                                "no admissible balls around the free boundary"));
            rep.add(CheckRecord::not_applicable("nondeg.vanishing" + suffix,
                                                "no admissible balls around the free boundary"));
            continue;
        }
        rep.add(CheckRecord::report(
            "nondeg.density" + suffix, min_density, display_bound,
            "min positive-phase ball density over " + std::to_string(tested) +
                " free boundary points; reference lower bound shown carries an unknown "
                "dimensional constant"));
        rep.add(CheckRecord::pass_fail(
            "nondeg.vanishing" + suffix, double(vanish_violations), 0.0, vanish_violations == 0,
            "positive nodes in B_{R/2} where the sphere average on dB_R is below 1% of "
            "mean(q_u)*R (" +
                std::to_string(premise_hits) + " premise hits)"));
    }
    return rep;
}

namespace {

// diameter of a finite point set: convex hull (monotone chain) then brute
// force over hull vertices
double point_set_diameter(std::vector<std::array<double, 2>>& pts) {
    if (pts.size() < 2) return 0.0;
    std::sort(pts.begin(), pts.end());
    auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                    const std::array<double, 2>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::array<double, 2>> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k);
    double d2 = 0.0;
    for (std::size_t a = 0; a < hull.size(); ++a)
        for (std::size_t b = a + 1; b < hull.size(); ++b) {
            double dx = hull[a][0] - hull[b][0], dy = hull[a][1] - hull[b][1];
            d2 = std::max(d2, dx * dx + dy * dy);
        }
    return std::sqrt(d2);
}

} // namespace

Report check_localization(const ScalarField& u, const Scene& s) {
    if (!(u.grid == s.grid)) throw std::invalid_argument("check_localization: grid mismatch");
    const Grid& g = s.grid;
    const double t_z = s.positive_threshold();

    std::vector<std::array<double, 2>> pos;
    double margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            if (u(i, j) <= t_z) continue;
            double x = g.x(i), y = g.y(j);
            pos.push_back({x, y});
            double m2 = std::min(x - g.lo[0], g.hi[0] - x);
            if (g.dim == 2) m2 = std::min({m2, y - g.lo[1], g.hi[1] - y});
            margin = std::min(margin, m2);
        }

    Report rep;
    double diam = 0.0;
    if (g.dim == 1 && pos.size() >= 2) {
        double mn = pos.front()[0], mx = pos.front()[0];
        for (auto& p : pos) {
            mn = std::min(mn, p[0]);
            mx = std::max(mx, p[0]);
        }
        diam = mx - mn;
    } else if (g.dim == 2) {
        diam = point_set_diameter(pos);
    }

    rep.add(CheckRecord::report("loc.positive_phase_diameter", diam,
                                s.spec.domain.diameter(g.dim) + 1.0,
                                "diam({u > t_z}); reference scale diam(D) + 1 shown without "
                                "the parameter-dependent slack (unknown constant)"));
    if (pos.empty()) {
        rep.add(CheckRecord::pass_fail("loc.box_margin", 0.0, 4.0 * g.max_h(), true,
                                       "positive phase is empty"));
        return rep;
    }
    bool ok = margin >= 4.0 * g.max_h();
    rep.add(CheckRecord::pass_fail("loc.box_margin", margin, 4.0 * g.max_h(), ok,
                                   ok ? "distance from {u > t_z} to the box boundary"
                                      : "positive phase within 4h of the box boundary: "
                                        "enlarge the box"));
    return rep;
}

Report run_diagnostics(const ScalarField& u, const Scene& s, const PenaltyParams& p,
                       double grad_tol) {
    const double t_z = s.positive_threshold();
    RegionLabels labels = classify_regions(u, s, t_z, t_z);
    Report rep;
    rep.append(check_bounds(u, s, p));
    rep.append(check_sign_conditions(u, s, labels, default_sign_tolerance(grad_tol, s.grid)));
    if (s.grid.dim == 2) rep.append(check_nondegeneracy(u, s, p, labels));
    rep.append(check_localization(u, s));
    return rep;
}

} // namespace heatopt
