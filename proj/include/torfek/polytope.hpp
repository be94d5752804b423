#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "torfek/rational.hpp"

namespace torfek {

// Points live in R^n with n in {1,2}; unused coordinates stay 0.
using Vec = std::array<double, 2>;
using IVec = std::array<std::int64_t, 2>;

inline double dot(int n, const Vec& a, const Vec& b) {
    double s = a[0] * b[0];
    if (n > 1) s += a[1] * b[1];
    return s;
}

// Convex rational polytope with consistent vertex and halfspace representations.
class LatticePolytope {
  public:
    int n = 1;
    std::vector<std::array<Rat, 2>> vertices;  // 1-D: {min,max}; 2-D: CCW hull order
    struct Halfspace {
        std::array<std::int64_t, 2> normal;  // primitive integer normal
        Rat offset;                          // P = { p : <normal,p> <= offset }
    };
    std::vector<Halfspace> halfspaces;

    static LatticePolytope from_vertices(int n, std::vector<std::array<Rat, 2>> pts);
    static LatticePolytope interval(Rat a, Rat b);
    static LatticePolytope box2(Rat ax, Rat bx, Rat ay, Rat by);

    Rat volume() const;  // Lebesgue measure (length / area)
    double support(const Vec& x) const;
    // Subgradient of the support function: lexicographically first maximizing vertex.
    Vec support_grad(const Vec& x) const;

    bool contains_dilated(const IVec& p, std::int64_t d) const;  // p in dP, exact
    bool contains(const Vec& x, double tol = 1e-12) const;
    bool strictly_inside(const Vec& x, double margin) const;

    LatticePolytope scaled(Rat f) const;
    bool is_box() const;
    std::array<Rat, 2> rational_lo() const;
    std::array<Rat, 2> rational_hi() const;
    Vec lo() const;
    Vec hi() const;
    std::vector<Vec> vertices_double() const;

    void validate() const;
};

std::vector<IVec> lattice_points(const LatticePolytope& P, std::int64_t d);

LatticePolytope minkowski_sum(const LatticePolytope& P, const LatticePolytope& Q);

struct NormalizedPolytope {
    LatticePolytope polytope;  // P / c, unit Lebesgue volume
    Rat c;                     // volume^{1/n}
};
NormalizedPolytope normalize_volume(const LatticePolytope& P);

// Ordered monomial-exponent basis for the dilate dP, d = floor(k*lambda).
struct LatticeBasis {
    int k = 1;
    Rat lambda{1};
    std::int64_t d = 1;
    std::vector<IVec> points;  // lexicographically sorted
    int N = 0;
    LatticePolytope base;  // the integral polytope P the dilation acts on
};
LatticeBasis make_basis(const LatticePolytope& P, int k, Rat lambda);

}  // namespace torfek
