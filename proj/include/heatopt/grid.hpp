#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace heatopt {

// Uniform Cartesian grid on a box, dimension 1 or 2.
// Nodes along axis a sit at lo[a] + i*h[a], i = 0..n[a]-1.
// In 1D the second axis is degenerate (n[1] = 1, h[1] = 0).
struct Grid {
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};
    std::array<int, 2> n{0, 1};
    std::array<double, 2> h{0.0, 0.0};

    static Grid make_1d(double lo, double hi, int n_nodes);
    static Grid make_2d(std::array<double, 2> lo, std::array<double, 2> hi,
                        std::array<int, 2> n_nodes);

    std::size_t num_nodes() const { return std::size_t(n[0]) * std::size_t(n[1]); }

    // Linear index, x fastest (row-major over (iy, ix)).
    std::size_t index(int ix, int iy = 0) const {
        return std::size_t(iy) * std::size_t(n[0]) + std::size_t(ix);
    }

    double x(int ix) const { return lo[0] + ix * h[0]; }
    double y(int iy) const { return lo[1] + iy * h[1]; }

    bool is_boundary(int ix, int iy = 0) const {
        if (ix == 0 || ix == n[0] - 1) return true;
        if (dim == 2 && (iy == 0 || iy == n[1] - 1)) return true;
        return false;
    }

    double min_h() const { return dim == 2 ? (h[0] < h[1] ? h[0] : h[1]) : h[0]; }
    double max_h() const { return dim == 2 ? (h[0] > h[1] ? h[0] : h[1]) : h[0]; }

    // Trapezoid quadrature weight of a node: prod over axes of h, halved on axis boundaries.
    double node_weight(int ix, int iy = 0) const {
        double w = h[0] * ((ix == 0 || ix == n[0] - 1) ? 0.5 : 1.0);
        if (dim == 2) w *= h[1] * ((iy == 0 || iy == n[1] - 1) ? 0.5 : 1.0);
        return w;
    }

    bool operator==(const Grid& o) const {
        return dim == o.dim && lo == o.lo && hi == o.hi && n == o.n;
    }
};

// Nodal values of a scalar function on a Grid. Value semantics; the grid is
// stored by value (it is seven numbers).
struct ScalarField {
    Grid grid;
    std::vector<double> values;
    // Set by operations (e.g. laplacian) whose boundary entries are filler,
    // not data: only interior nodes are meaningful.
    bool interior_only = false;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), values(g.num_nodes(), fill) {}

    double& operator()(int ix, int iy = 0) { return values[grid.index(ix, iy)]; }
    double operator()(int ix, int iy = 0) const { return values[grid.index(ix, iy)]; }

    void require_finite(const char* what) const;
    void zero_boundary();
};

// Second-order central stencil (3-point in 1D, 5-point in 2D) at interior
// nodes. Boundary entries are 0 and flagged via interior_only.
ScalarField laplacian(const ScalarField& f);

// max over adjacent node pairs of |f(p)-f(q)|/h. Zero iff f is constant.
double grad_sup_norm(const ScalarField& f);

// Trapezoid-weighted sum of f*mask. Mask values must lie in [0,1] and the
// grids must match. Summation order is fixed (node index order) so results
// are bit-reproducible.
double integrate(const ScalarField& f, const ScalarField& mask);

} // namespace heatopt
