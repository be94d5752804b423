#pragma once
#include <memory>
#include <string>
#include <vector>

#include "torfek/grid.hpp"
#include "torfek/polytope.hpp"
#include "torfek/rational.hpp"

namespace torfek {

// A weight: continuous phi on R^n within bounded distance of the support
// function h_P of its reference polytope.
class ToricWeight {
  public:
    double value(const Vec& x) const;
    Vec grad(const Vec& x) const;  // subgradient at kinks
    const LatticePolytope& polytope() const;
    std::string family() const;

    // sup |phi - h_P| on a test grid of [lo,hi] (surrogate for the growth bound)
    double growth_bound(Vec lo, Vec hi, int res = 256) const;

    static ToricWeight support(const LatticePolytope& P);
    // phi(x) = (1/2s) log sum_p a_p e^{2s<x,p>} over the lattice points of P
    static ToricWeight logsumexp(const LatticePolytope& P, double sharpness,
                                 std::vector<std::pair<IVec, double>> coeffs = {});
    // phi(x) = 1/2 sum_t quad_t x_t^2 + <lin,x> + support_coef * h_P(x)
    static ToricWeight quadblend(const LatticePolytope& P, Vec quad, Vec lin, double support_coef);
    static ToricWeight gridinterp(const LatticePolytope& P, GridFunction g);

    struct Impl;

  private:
    explicit ToricWeight(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;

    friend ToricWeight scale_weight(const ToricWeight& w, Rat c);
    friend ToricWeight sum_weights(const std::vector<ToricWeight>& ws);
    friend ToricWeight shift_weight(const ToricWeight& w, double c);
};

// Weight of the volume-normalized bundle: phi/c on P/c.
ToricWeight scale_weight(const ToricWeight& w, Rat c);
// Sum weight on the Minkowski sum of the polytopes.
ToricWeight sum_weights(const std::vector<ToricWeight>& ws);
ToricWeight shift_weight(const ToricWeight& w, double c);

}  // namespace torfek
