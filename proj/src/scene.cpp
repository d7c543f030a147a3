#include "heatopt/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace heatopt {

const char* to_string(CheckRecord::Status s) {
    switch (s) {
        case CheckRecord::Status::Pass: return "pass";
        case CheckRecord::Status::Fail: return "fail";
        case CheckRecord::Status::ReportOnly: return "report";
        case CheckRecord::Status::NotApplicable: return "n/a";
    }
    return "?";
}

bool DomainSpec::contains(double x, double y) const {
    switch (shape) {
        case DomainShape::Interval: return std::fabs(x - center[0]) < radius;
        case DomainShape::Disk: {
            double dx = x - center[0], dy = y - center[1];
            return dx * dx + dy * dy < radius * radius;
        }
        case DomainShape::Rectangle:
            return x > lo[0] && x < hi[0] && y > lo[1] && y < hi[1];
    }
    return false;
}

double DomainSpec::exterior_distance(double x, double y) const {
    switch (shape) {
        case DomainShape::Interval: return std::max(0.0, std::fabs(x - center[0]) - radius);
        case DomainShape::Disk: {
            double dx = x - center[0], dy = y - center[1];
            return std::max(0.0, std::hypot(dx, dy) - radius);
        }
        case DomainShape::Rectangle: {
            double dx = std::max({lo[0] - x, 0.0, x - hi[0]});
            double dy = std::max({lo[1] - y, 0.0, y - hi[1]});
            return std::hypot(dx, dy);
        }
    }
    return 0.0;
}

double DomainSpec::diameter(int dim) const {
    switch (shape) {
        case DomainShape::Interval:
        case DomainShape::Disk: return 2.0 * radius;
        case DomainShape::Rectangle:
            return dim == 1 ? hi[0] - lo[0] : std::hypot(hi[0] - lo[0], hi[1] - lo[1]);
    }
    return 0.0;
}

double DomainSpec::perimeter(int dim) const {
    switch (shape) {
        case DomainShape::Interval: return 2.0; // two endpoints
        case DomainShape::Disk: return 2.0 * 3.14159265358979323846 * radius;
        case DomainShape::Rectangle:
            return dim == 1 ? 2.0 : 2.0 * ((hi[0] - lo[0]) + (hi[1] - lo[1]));
    }
    return 0.0;
}

namespace {

struct ProfileEval {
    double value;  // profile(t), unit height
    double d2;     // second derivative in t
    double d1_over_t; // first derivative divided by t (finite at t = 0)
};

// poly4: (1-t^2)^4 on t < 1.
ProfileEval eval_poly4(double t2) {
    double w = 1.0 - t2;
    double w2 = w * w;
    ProfileEval e;
    e.value = w2 * w2;
    e.d2 = w2 * (56.0 * t2 - 8.0);
    e.d1_over_t = -8.0 * w2 * w;
    return e;
}

// mollifier: exp(1 - 1/(1-t^2)) on t < 1. Exponent arguments below -700
// underflow to values around 1e-304; those and their derivative factors are
// clamped to exact zero.
ProfileEval eval_mollifier(double t2) {
    double w = 1.0 - t2;
    double a = 1.0 - 1.0 / w;
    if (a < -700.0) return {0.0, 0.0, 0.0};
    double psi = std::exp(a);
    double iw2 = 1.0 / (w * w);
    double iw3 = iw2 / w;
    double iw4 = iw2 * iw2;
    ProfileEval e;
    e.value = psi;
    // q = -2t/w^2, psi'' = (q' + q^2) psi
    e.d2 = (-2.0 * iw2 - 8.0 * t2 * iw3 + 4.0 * t2 * iw4) * psi;
    e.d1_over_t = -2.0 * iw2 * psi;
    return e;
}

ProfileEval eval_profile(BumpProfile p, double t2) {
    if (t2 >= 1.0) return {0.0, 0.0, 0.0};
    return p == BumpProfile::Poly4 ? eval_poly4(t2) : eval_mollifier(t2);
}

} // namespace

double eval_phi(const SceneSpec& spec, double x, double y) {
    double v = 0.0;
    for (const auto& b : spec.bumps) {
        double dx = x - b.center[0];
        double dy = spec.dim == 2 ? y - b.center[1] : 0.0;
        double t2 = (dx * dx + dy * dy) / (b.radius * b.radius);
        v += b.height * eval_profile(b.profile, t2).value;
    }
    return v;
}

double eval_lap_phi(const SceneSpec& spec, double x, double y) {
    double v = 0.0;
    for (const auto& b : spec.bumps) {
        double dx = x - b.center[0];
        double dy = spec.dim == 2 ? y - b.center[1] : 0.0;
        double t2 = (dx * dx + dy * dy) / (b.radius * b.radius);
        ProfileEval e = eval_profile(b.profile, t2);
        // radial Laplacian: (g'' + (dim-1) g'/t) / radius^2
        double lap = e.d2 + (spec.dim - 1) * e.d1_over_t;
        v += b.height * lap / (b.radius * b.radius);
    }
    return v;
}

namespace {

void validate_spec(const SceneSpec& spec) {
    if (spec.dim != 1 && spec.dim != 2)
        throw std::invalid_argument("scene: dim must be 1 or 2");
    if (!(spec.m > 0.0)) throw std::invalid_argument("scene: m must be positive");

    const DomainSpec& d = spec.domain;
    if (spec.dim == 1 && d.shape != DomainShape::Interval)
        throw std::invalid_argument("scene: 1D domain must be an interval");
    if (spec.dim == 2 && d.shape == DomainShape::Interval)
        throw std::invalid_argument("scene: interval domain requires dim 1");

    // D strictly inside the box
    bool inside = true;
    switch (d.shape) {
        case DomainShape::Interval:
            if (!(d.radius > 0.0)) throw std::invalid_argument("scene: domain radius must be positive");
            inside = d.center[0] - d.radius > spec.box_lo[0] &&
                     d.center[0] + d.radius < spec.box_hi[0];
            break;
        case DomainShape::Disk:
            if (!(d.radius > 0.0)) throw std::invalid_argument("scene: domain radius must be positive");
            for (int a = 0; a < 2; ++a)
                inside = inside && d.center[a] - d.radius > spec.box_lo[a] &&
                         d.center[a] + d.radius < spec.box_hi[a];
            break;
        case DomainShape::Rectangle:
            for (int a = 0; a < 2; ++a) {
                if (!(d.lo[a] < d.hi[a]))
                    throw std::invalid_argument("scene: rectangle domain needs lo < hi");
                inside = inside && d.lo[a] > spec.box_lo[a] && d.hi[a] < spec.box_hi[a];
            }
            break;
    }
    if (!inside)
        throw std::invalid_argument("scene: domain D must lie strictly inside the box");

    for (std::size_t i = 0; i < spec.bumps.size(); ++i) {
        const BumpSpec& b = spec.bumps[i];
        std::string tag = "scene: bump " + std::to_string(i);
        if (!(b.radius > 0.0)) throw std::invalid_argument(tag + ": radius must be positive");
        if (!(b.height > 0.0)) throw std::invalid_argument(tag + ": height must be positive");
        bool contained = false;
        switch (d.shape) {
            case DomainShape::Interval:
                contained = std::fabs(b.center[0] - d.center[0]) + b.radius < d.radius;
                break;
            case DomainShape::Disk: {
                double dx = b.center[0] - d.center[0], dy = b.center[1] - d.center[1];
                contained = std::hypot(dx, dy) + b.radius < d.radius;
                break;
            }
            case DomainShape::Rectangle: {
                contained = true;
                for (int a = 0; a < 2; ++a)
                    contained = contained && b.center[a] - b.radius > d.lo[a] &&
                                b.center[a] + b.radius < d.hi[a];
                break;
            }
        }
        if (!contained)
            throw std::invalid_argument(tag + ": support must lie strictly inside D");
    }
}

} // namespace

Scene build_scene(const SceneSpec& spec) {
    validate_spec(spec);

    Scene s;
    s.spec = spec;
    s.grid = spec.dim == 1 ? Grid::make_1d(spec.box_lo[0], spec.box_hi[0], spec.nodes[0])
                           : Grid::make_2d(spec.box_lo, spec.box_hi, spec.nodes);
    s.m = spec.m;
    s.chi_D = ScalarField(s.grid);
    s.phi = ScalarField(s.grid);
    s.lap_phi = ScalarField(s.grid);

    const Grid& g = s.grid;
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            double x = g.x(i), y = g.y(j);
            std::size_t k = g.index(i, j);
            s.chi_D.values[k] = spec.domain.contains(x, y) ? 1.0 : 0.0;
            s.phi.values[k] = eval_phi(spec, x, y);
            s.lap_phi.values[k] = eval_lap_phi(spec, x, y);
        }

    s.phi.require_finite("scene: phi");
    s.lap_phi.require_finite("scene: lap_phi");

    s.max_phi = 0.0;
    s.c11_seminorm_phi = 0.0;
    for (std::size_t k = 0; k < g.num_nodes(); ++k) {
        s.max_phi = std::max(s.max_phi, s.phi.values[k]);
        s.c11_seminorm_phi = std::max(s.c11_seminorm_phi, std::fabs(s.lap_phi.values[k]));
    }
    s.c1_norm_phi = std::max(s.max_phi, grad_sup_norm(s.phi));
    return s;
}

Report validate_scene(const Scene& s) {
    Report rep;
    const Grid& g = s.grid;

    double max_phi_outside = 0.0;
    double min_phi = 0.0;
    for (std::size_t k = 0; k < g.num_nodes(); ++k) {
        if (s.chi_D.values[k] == 0.0)
            max_phi_outside = std::max(max_phi_outside, s.phi.values[k]);
        min_phi = std::min(min_phi, s.phi.values[k]);
    }
    rep.add(CheckRecord::pass_fail("scene.support_in_D", max_phi_outside, 0.0,
                                   max_phi_outside <= 0.0,
                                   "max of phi over nodes outside D"));
    rep.add(CheckRecord::pass_fail("scene.phi_nonnegative", min_phi, 0.0, min_phi >= 0.0,
                                   "min nodal phi"));

    for (double eta : {0.01, 0.1, 0.5}) {
        std::string name = "scene.lap_phi_negativity.eta=" + std::to_string(eta).substr(0, 4);
        if (s.max_phi == 0.0) {
            rep.add(CheckRecord::not_applicable(name, "phi is identically zero"));
            continue;
        }
        double cut = eta * s.max_phi;
        double mn = 0.0, mx = 0.0;
        bool any = false;
        for (std::size_t k = 0; k < g.num_nodes(); ++k) {
            if (s.phi.values[k] > cut) {
                double v = s.lap_phi.values[k];
                if (!any) { mn = mx = v; any = true; }
                else { mn = std::min(mn, v); mx = std::max(mx, v); }
            }
        }
        if (!any) {
            rep.add(CheckRecord::not_applicable(name, "sublevel set contains no nodes"));
            continue;
        }
        rep.add(CheckRecord::report(name, mn, 0.0,
                                    "min/max of analytic lap(phi) on {phi > " +
                                        std::to_string(cut) + "}: max = " + std::to_string(mx)));
    }
    return rep;
}

} // namespace heatopt
