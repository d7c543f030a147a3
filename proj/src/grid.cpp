#include "heatopt/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace heatopt {

static void check_axis(double lo, double hi, int n, int axis) {
    if (n < 3)
        throw std::invalid_argument("grid axis " + std::to_string(axis) +
                                    ": need at least 3 nodes, got " + std::to_string(n));
    if (!(hi > lo))
        throw std::invalid_argument("grid axis " + std::to_string(axis) +
                                    ": hi must exceed lo");
}

Grid Grid::make_1d(double lo_, double hi_, int n_nodes) {
    check_axis(lo_, hi_, n_nodes, 0);
    Grid g;
    g.dim = 1;
    g.lo = {lo_, 0.0};
    g.hi = {hi_, 0.0};
    g.n = {n_nodes, 1};
    g.h = {(hi_ - lo_) / (n_nodes - 1), 0.0};
    return g;
}

Grid Grid::make_2d(std::array<double, 2> lo_, std::array<double, 2> hi_,
                   std::array<int, 2> n_nodes) {
    check_axis(lo_[0], hi_[0], n_nodes[0], 0);
    check_axis(lo_[1], hi_[1], n_nodes[1], 1);
    Grid g;
    g.dim = 2;
    g.lo = lo_;
    g.hi = hi_;
    g.n = n_nodes;
    g.h = {(hi_[0] - lo_[0]) / (n_nodes[0] - 1), (hi_[1] - lo_[1]) / (n_nodes[1] - 1)};
    return g;
}

void ScalarField::require_finite(const char* what) const {
    for (double v : values)
        if (!std::isfinite(v)) throw std::runtime_error(std::string(what) + ": non-finite value");
}

void ScalarField::zero_boundary() {
    const Grid& g = grid;
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix < g.n[0]; ++ix)
            if (g.is_boundary(ix, iy)) values[g.index(ix, iy)] = 0.0;
}

ScalarField laplacian(const ScalarField& f) {
    const Grid& g = f.grid;
    ScalarField out(g, 0.0);
    out.interior_only = true;
    const double invh2x = 1.0 / (g.h[0] * g.h[0]);
    if (g.dim == 1) {
        for (int i = 1; i < g.n[0] - 1; ++i)
            out.values[i] = (f.values[i - 1] - 2.0 * f.values[i] + f.values[i + 1]) * invh2x;
        return out;
    }
    const double invh2y = 1.0 / (g.h[1] * g.h[1]);
    const int nx = g.n[0];
    for (int j = 1; j < g.n[1] - 1; ++j) {
        const double* row = f.values.data() + std::size_t(j) * nx;
        const double* below = row - nx;
        const double* above = row + nx;
        double* o = out.values.data() + std::size_t(j) * nx;
        for (int i = 1; i < nx - 1; ++i)
            o[i] = (row[i - 1] - 2.0 * row[i] + row[i + 1]) * invh2x +
                   (below[i] - 2.0 * row[i] + above[i]) * invh2y;
    }
    return out;
}

double grad_sup_norm(const ScalarField& f) {
    const Grid& g = f.grid;
    double m = 0.0;
    const int nx = g.n[0];
    for (int j = 0; j < g.n[1]; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            double q = std::fabs(f(i + 1, j) - f(i, j)) / g.h[0];
            if (q > m) m = q;
        }
    }
    if (g.dim == 2) {
        for (int j = 0; j + 1 < g.n[1]; ++j)
            for (int i = 0; i < nx; ++i) {
                double q = std::fabs(f(i, j + 1) - f(i, j)) / g.h[1];
                if (q > m) m = q;
            }
    }
    return m;
}

double integrate(const ScalarField& f, const ScalarField& mask) {
    if (!(f.grid == mask.grid)) throw std::invalid_argument("integrate: grid mismatch");
    const Grid& g = f.grid;
    for (double v : mask.values)
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("integrate: mask values must lie in [0,1]");
    double sum = 0.0;
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            std::size_t k = g.index(i, j);
            sum += f.values[k] * mask.values[k] * g.node_weight(i, j);
        }
    return sum;
}

} // namespace heatopt
