#pragma once
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "torfek/polytope.hpp"

namespace torfek {

// Values of a function on a uniform box grid. Off-grid queries extend by the
// reference support function h_P when a polytope is attached (the function is
// asymptotic to h_P), otherwise clamp to the boundary value.
class GridFunction {
  public:
    int n = 1;
    Vec box_lo{0, 0};
    Vec box_hi{0, 0};
    std::array<int, 2> res{2, 1};  // nodes per axis (res[1]=1 when n==1)
    std::vector<double> values;    // row-major: index = ix*res[1] + iy
    std::optional<LatticePolytope> asymptote;

    static GridFunction sample(int n, Vec lo, Vec hi, std::array<int, 2> res,
                               const std::function<double(const Vec&)>& f,
                               std::optional<LatticePolytope> asymptote = std::nullopt);

    double spacing(int axis) const {
        return (box_hi[axis] - box_lo[axis]) / static_cast<double>(res[axis] - 1);
    }
    Vec node(int ix, int iy = 0) const {
        Vec x{box_lo[0] + spacing(0) * ix, 0};
        if (n > 1) x[1] = box_lo[1] + spacing(1) * iy;
        return x;
    }
    double& at(int ix, int iy = 0) { return values[static_cast<size_t>(ix) * res[1] + iy]; }
    double at(int ix, int iy = 0) const { return values[static_cast<size_t>(ix) * res[1] + iy]; }

    // multilinear interpolation inside the box, asymptote-aware extension outside
    double eval(const Vec& x) const;

    double max_value() const;

    std::string to_csv() const;
    static GridFunction from_csv(const std::string& text);
};

// f + g on f's grid (g interpolated), f + c, pointwise max residual, etc.
GridFunction grid_shift(const GridFunction& f, double c);
double grid_sup_diff(const GridFunction& f, const GridFunction& g);  // sup |f - g| on f's nodes

}  // namespace torfek
