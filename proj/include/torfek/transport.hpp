#pragma once
#include <vector>

#include "torfek/measure.hpp"
#include "torfek/polytope.hpp"

namespace torfek {

// Optimal permutation for the bilinear cost c(x,p) = -<x,p>; cost carries the
// 1/N normalization of the discrete transport cost.
struct AssignmentResult {
    std::vector<int> perm;  // row i matched to column perm[i]
    double cost = 0;
    bool unique = false;
    std::vector<double> u, v;  // dual certificate: cost(i,l) - u[i] - v[l] >= 0
};

AssignmentResult assignment(const std::vector<Vec>& x, const std::vector<Vec>& p, int n);

// True iff the optimal permutation is unique (tight-edge graph has no
// alternating cycle).
bool uniqueness_probe(const std::vector<Vec>& x, const std::vector<Vec>& p, int n);

// Exact optimal transport cost with c(x,y) = -<x,y> over all couplings.
double ot_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Exact Wasserstein-1 (Euclidean ground cost).
double wasserstein1(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Bottleneck quantity R(nu,nu') = inf_gamma esssup |p-q| for uniform-weight
// measures (cardinalities may differ). Thresholds are snapped to the sorted
// pairwise distances; feasibility via integral max-flow.
struct BottleneckResult {
    double value = 0;
    std::vector<std::pair<double, bool>> probes;  // (threshold, feasible)
};
BottleneckResult bottleneck_probe(const DiscreteMeasure& nu, const DiscreteMeasure& nup);
double bottleneck_R(const DiscreteMeasure& nu, const DiscreteMeasure& nup);

// Both perturbation inequalities for the bilinear cost:
//   |C(mu,nu)-C(mu',nu)|  <=  W1(mu,mu') * esssup_nu|p|
//   |C(mu,nu)-C(mu,nu')|  <=  (∫|x| dmu) * R(nu,nu')
struct PerturbationReport {
    double c_mu_nu = 0, c_mup_nu = 0, c_mu_nup = 0;
    double w1_mu_mup = 0, esssup_nu = 0, first_moment_mu = 0, r_nu_nup = 0;
    double lhs1 = 0, rhs1 = 0, lhs2 = 0, rhs2 = 0;
    bool holds1 = false, holds2 = false;
    bool holds() const { return holds1 && holds2; }
};
PerturbationReport perturbation_report(const DiscreteMeasure& mu, const DiscreteMeasure& mup,
                                       const DiscreteMeasure& nu, const DiscreteMeasure& nup);

}  // namespace torfek
