#pragma once
#include <vector>

#include "torfek/grid.hpp"
#include "torfek/measure.hpp"
#include "torfek/polytope.hpp"
#include "torfek/weight.hpp"

namespace torfek {

// f*(p) = sup_x <x,p> - f(x) on a res-grid of Q, via the monotone-hull
// linear-time transform (separable per axis for n=2). Throws when an interior
// slope attains its argmax on the box boundary (box too small).
GridFunction legendre_transform(const GridFunction& f, const LatticePolytope& Q, int res);

// Largest convex minorant with subgradients in P: (f* + chi_P)*, sampled on
// [box_lo,box_hi] at res_x nodes.
GridFunction project(const ToricWeight& phi, const LatticePolytope& P, int res, Vec box_lo,
                     Vec box_hi, int res_x);

// (grad phi*)_# nu_P as an M-point measure: per quadrature node p, the argmax
// of <x,p> - phi(x) over the box grid (ties resolve to the argmax midpoint).
DiscreteMeasure equilibrium_measure(const ToricWeight& phi, const LatticePolytope& P, int M,
                                    Vec box_lo, Vec box_hi, int res_x);

// E^eq(phi) = -∫_P phi* dnu_P with nu_P the normalized Lebesgue measure.
double equilibrium_energy(const ToricWeight& phi, const LatticePolytope& P, int res, Vec box_lo,
                          Vec box_hi, int res_x);

struct CoupledPotentials {
    std::vector<GridFunction> psi;
    DiscreteMeasure mu;  // common Monge-Ampère measure (approximation)
    struct Residuals {
        double sup_violation = 0;  // max over grid of (sum psi_j - phi)
        double support_gap = 0;    // max |sum psi_j - phi| on supp mu
        double pairwise_w1 = 0;    // max W1 between the pushforward measures
    } residuals;
};

struct CoupledOptions {
    Vec box_lo{-8, -8};
    Vec box_hi{8, 8};
    int res_x = 512;
    int res_p = 513;
    int measure_points = 512;
    double eta0 = 1.0;
    double stop_gain = 1e-8;
    int stop_window = 50;
    int max_iter = 4000;
};

struct CoupledResult {
    double F = 0;
    CoupledPotentials potentials;
    std::vector<double> trace;  // accepted f values, nondecreasing
    int iterations = 0;
};

// Projected supergradient ascent on f_phi(psi_1..psi_m) =
// sum_j E^eq_j(psi_j) - sup(sum_j psi_j - phi).
CoupledResult coupled_energy(const ToricWeight& phi,
                             const std::vector<std::pair<LatticePolytope, int>>& bundles,
                             const CoupledOptions& opts = {});

// 1-D monotone rearrangement: psi_j'(x) = F_{nu_j}^{-1}(F_mu(x)) integrated,
// anchored so psi_j(0) = 0. The sum of the returned potentials is the
// designated phi (equality everywhere).
CoupledPotentials potentials_from_target_measure(const DiscreteMeasure& mu,
                                                 const std::vector<LatticePolytope>& intervals,
                                                 Vec box_lo, Vec box_hi, int res_x);

}  // namespace torfek
