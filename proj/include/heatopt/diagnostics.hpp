#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "heatopt/energy.hpp"
#include "heatopt/report.hpp"

namespace heatopt {

// Node classification. Zero wins over the in-D labels (a node below the
// positive threshold is dormant wherever it sits); Band is painted last over
// every node within two cells of a label change and is excluded from the
// stencil-based checks, whose stencils are polluted across interfaces.
enum class RegionLabel : std::uint8_t {
    Zero = 0,
    Contact = 1,        // inside D, u - phi <= t_c
    HeatedInactive = 2, // inside D, u > phi + t_c
    ExtPositive = 3,    // outside D, u > t_z
    Band = 4,
};

struct RegionLabels {
    Grid grid;
    std::vector<RegionLabel> labels;
    double t_c = 0.0, t_z = 0.0;

    RegionLabel operator()(int ix, int iy = 0) const { return labels[grid.index(ix, iy)]; }
};

RegionLabels classify_regions(const ScalarField& u, const Scene& s, double t_c, double t_z);

// Sign conditions on the stencil Laplacian away from interfaces:
//   lap u <= tol   on D \ Band
//   |lap u| <= tol on HeatedInactive \ Band
//   lap u >= -tol  on D^c \ Band
//   |lap u| <= tol on ExtPositive \ Band
// Empty regions pass vacuously.
Report check_sign_conditions(const ScalarField& u, const Scene& s, const RegionLabels& labels,
                             double tol);

double default_sign_tolerance(double grad_tol, const Grid& g);

// Constant-free bounds:
//  (a) -t_z <= u <= max_phi + t_z
//  (b) min(u - phi) >= -delta, delta the stage slack 2 kappa1^2 |D2 phi| + t_z
//  (c) max |alpha_k1(u - phi)| <= |D2 phi|_sup + 1/(epsilon kappa2)
Report check_bounds(const ScalarField& u, const Scene& s, const PenaltyParams& p);

enum class FbKind { Interior, Exterior };

// Level-set interface extracted by marching squares (point pairs in 1D):
// the zero contour of (u - phi - level_tol) over cells inside D for the
// interior kind, of (u - level_tol) over cells outside D for the exterior
// kind. Normals point out of the positive phase. qu_samples hold |grad u|
// sampled one cell inward along the inward normal via bilinear interpolation
// (the gradient jumps across the interface, so on-contour sampling would be
// ill-defined).
struct FreeBoundary {
    FbKind kind = FbKind::Exterior;
    std::vector<std::array<double, 2>> points;
    std::vector<std::array<double, 2>> normals;
    std::vector<double> qu_samples;
    double length = 0.0;
    // [begin, end) ranges into points, one per stitched polyline
    std::vector<std::pair<std::size_t, std::size_t>> chains;
    std::vector<char> chain_closed;

    bool empty() const { return points.empty(); }
};

FreeBoundary extract_free_boundary(const ScalarField& u, const Scene& s, FbKind kind,
                                   double level_tol);

struct QuStatistics {
    double mean = 0.0;
    double std_dev = 0.0;
    double rel_std = 0.0;
    std::size_t count = 0;
};

QuStatistics qu_statistics(const FreeBoundary& fb);

// Positive-phase density in balls around exterior free boundary points
// (report-only: the reference lower bound carries an unknown dimensional
// constant) and the vanishing implication: a sphere average of u on dB_R
// below 1% of (mean q_u) * R forces u <= t_z on B_{R/2}. 2D only.
Report check_nondegeneracy(const ScalarField& u, const Scene& s, const PenaltyParams& p,
                           const RegionLabels& labels);

// diam({u > t_z}), diam(D), and the distance from the positive phase to the
// box boundary; passes when the positive phase stays 4h clear of the box.
Report check_localization(const ScalarField& u, const Scene& s);

// Everything above on one state, in deterministic record order.
Report run_diagnostics(const ScalarField& u, const Scene& s, const PenaltyParams& p,
                       double grad_tol);

} // namespace heatopt
