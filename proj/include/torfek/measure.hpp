#pragma once
#include <string>
#include <vector>

#include "torfek/polytope.hpp"

namespace torfek {

// Finitely supported probability measure on R^n.
struct DiscreteMeasure {
    int n = 1;
    struct Atom {
        Vec p{0, 0};
        double w = 0;
    };
    std::vector<Atom> atoms;

    double total_mass() const;
    double first_moment() const;   // ∫ |x| dμ
    double esssup_norm() const;    // max |p| over the support
    bool uniform_weights(double tol = 1e-12) const;

    std::string to_csv() const;
    static DiscreteMeasure from_csv(const std::string& text);
};

// Sorts atoms lexicographically, merges exactly coincident points, checks the
// probability invariants (finite points, positive weights, mass 1 within 1e-12).
DiscreteMeasure make_measure(int n, std::vector<DiscreteMeasure::Atom> atoms);

DiscreteMeasure uniform_atoms(int n, const std::vector<Vec>& points);
DiscreteMeasure dirac(int n, const Vec& p);

// M-point equal-weight quadrature of the normalized Lebesgue measure on P.
DiscreteMeasure uniform_measure(const LatticePolytope& P, int M);

}  // namespace torfek
