#include "torfek/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "torfek/errors.hpp"

namespace torfek {

namespace {

bool lex_less(const std::array<Rat, 2>& a, const std::array<Rat, 2>& b) {
    if (a[0] != b[0]) return a[0] < b[0];
    return a[1] < b[1];
}

// sign of cross(b-a, c-a)
int cross_sign(const std::array<Rat, 2>& a, const std::array<Rat, 2>& b, const std::array<Rat, 2>& c) {
    Rat v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    return v.num == 0 ? 0 : (v.num > 0 ? 1 : -1);
}

std::array<std::int64_t, 2> primitive_normal(Rat nx, Rat ny) {
    // clear denominators, divide by gcd
    std::int64_t l = std::lcm(nx.den, ny.den);
    std::int64_t a = nx.num * (l / nx.den);
    std::int64_t b = ny.num * (l / ny.den);
    std::int64_t g = std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
    if (g > 1) { a /= g; b /= g; }
    return {a, b};
}

}  // namespace

LatticePolytope LatticePolytope::interval(Rat a, Rat b) {
    return from_vertices(1, {{a, Rat(0)}, {b, Rat(0)}});
}

LatticePolytope LatticePolytope::box2(Rat ax, Rat bx, Rat ay, Rat by) {
    return from_vertices(2, {{ax, ay}, {bx, ay}, {bx, by}, {ax, by}});
}

LatticePolytope LatticePolytope::from_vertices(int n, std::vector<std::array<Rat, 2>> pts) {
    if (n != 1 && n != 2) throw Error("polytope dimension must be 1 or 2");
    if (pts.empty()) throw Error("polytope needs vertices");
    LatticePolytope P;
    P.n = n;
    if (n == 1) {
        Rat lo = pts[0][0], hi = pts[0][0];
        for (auto& p : pts) {
            if (p[0] < lo) lo = p[0];
            if (hi < p[0]) hi = p[0];
        }
        if (!(lo < hi)) throw Error("degenerate polytope: empty interior");
        P.vertices = {{lo, Rat(0)}, {hi, Rat(0)}};
        P.halfspaces.push_back({{1, 0}, hi});
        P.halfspaces.push_back({{-1, 0}, -lo});
        return P;
    }
    // 2-D convex hull, monotone chain over exact rationals
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](auto& a, auto& b) { return a[0] == b[0] && a[1] == b[1]; }),
              pts.end());
    if (pts.size() < 3) throw Error("degenerate polytope: empty interior");
    std::vector<std::array<Rat, 2>> hull;
    auto build = [&](auto begin, auto end) {
        size_t start = hull.size();
        for (auto it = begin; it != end; ++it) {
            while (hull.size() >= start + 2 &&
                   cross_sign(hull[hull.size() - 2], hull.back(), *it) <= 0)
                hull.pop_back();
            hull.push_back(*it);
        }
    };
    build(pts.begin(), pts.end());
    hull.pop_back();
    build(pts.rbegin(), pts.rend());
    hull.pop_back();
    if (hull.size() < 3) throw Error("degenerate polytope: empty interior");
    P.vertices = hull;  // CCW
    for (size_t i = 0; i < hull.size(); ++i) {
        auto& a = hull[i];
        auto& b = hull[(i + 1) % hull.size()];
        // CCW edge (dx,dy): outward normal (dy,-dx)
        auto nrm = primitive_normal(b[1] - a[1], a[0] - b[0]);
        Rat off = Rat(nrm[0]) * a[0] + Rat(nrm[1]) * a[1];
        P.halfspaces.push_back({nrm, off});
    }
    P.validate();
    return P;
}

void LatticePolytope::validate() const {
    for (auto& v : vertices) {
        for (auto& h : halfspaces) {
            Rat val = Rat(h.normal[0]) * v[0] + Rat(h.normal[1]) * v[1];
            if (h.offset < val) throw Error("polytope invariant: vertex violates halfspace");
        }
    }
    for (auto& h : halfspaces) {
        int tight = 0;
        for (auto& v : vertices) {
            Rat val = Rat(h.normal[0]) * v[0] + Rat(h.normal[1]) * v[1];
            if (val == h.offset) ++tight;
        }
        if (tight < n) throw Error("polytope invariant: halfspace not supported by vertices");
    }
}

Rat LatticePolytope::volume() const {
    if (n == 1) return vertices[1][0] - vertices[0][0];
    Rat two_area(0);
    for (size_t i = 0; i < vertices.size(); ++i) {
        auto& a = vertices[i];
        auto& b = vertices[(i + 1) % vertices.size()];
        two_area = two_area + (a[0] * b[1] - b[0] * a[1]);
    }
    if (two_area.num < 0) two_area = -two_area;
    return two_area / Rat(2);
}

double LatticePolytope::support(const Vec& x) const {
    double best = -1e300;
    for (auto& v : vertices) {
        double s = v[0].to_double() * x[0];
        if (n > 1) s += v[1].to_double() * x[1];
        if (s > best) best = s;
    }
    return best;
}

Vec LatticePolytope::support_grad(const Vec& x) const {
    double best = -1e300;
    Vec arg{0, 0};
    for (auto& v : vertices) {
        Vec vd{v[0].to_double(), n > 1 ? v[1].to_double() : 0.0};
        double s = dot(n, vd, x);
        if (s > best + 1e-15 * (1.0 + std::fabs(best))) {
            best = s;
            arg = vd;
        }
    }
    // ties resolve to the lexicographically first maximizer
    double tol = 1e-12 * (1.0 + std::fabs(best));
    for (auto& v : vertices) {
        Vec vd{v[0].to_double(), n > 1 ? v[1].to_double() : 0.0};
        if (dot(n, vd, x) >= best - tol) {
            if (vd[0] < arg[0] - 1e-15 || (vd[0] <= arg[0] + 1e-15 && vd[1] < arg[1] - 1e-15)) arg = vd;
        }
    }
    return arg;
}

bool LatticePolytope::contains_dilated(const IVec& p, std::int64_t d) const {
    for (auto& h : halfspaces) {
        Rat lhs(h.normal[0] * p[0] + (n > 1 ? h.normal[1] * p[1] : 0));
        if (Rat(d) * h.offset < lhs) return false;
    }
    return true;
}

bool LatticePolytope::contains(const Vec& x, double tol) const {
    for (auto& h : halfspaces) {
        double lhs = h.normal[0] * x[0] + (n > 1 ? h.normal[1] * x[1] : 0.0);
        double nn = std::sqrt(double(h.normal[0]) * h.normal[0] + double(h.normal[1]) * h.normal[1]);
        if (lhs > h.offset.to_double() + tol * nn) return false;
    }
    return true;
}

bool LatticePolytope::strictly_inside(const Vec& x, double margin) const {
    for (auto& h : halfspaces) {
        double lhs = h.normal[0] * x[0] + (n > 1 ? h.normal[1] * x[1] : 0.0);
        double nn = std::sqrt(double(h.normal[0]) * h.normal[0] + double(h.normal[1]) * h.normal[1]);
        if (lhs > h.offset.to_double() - margin * nn) return false;
    }
    return true;
}

LatticePolytope LatticePolytope::scaled(Rat f) const {
    if (!(Rat(0) < f)) throw Error("polytope scale must be positive");
    std::vector<std::array<Rat, 2>> pts;
    for (auto& v : vertices) pts.push_back({v[0] * f, v[1] * f});
    return from_vertices(n, pts);
}

bool LatticePolytope::is_box() const {
    if (n == 1) return true;
    if (vertices.size() != 4) return false;
    for (auto& h : halfspaces)
        if (h.normal[0] != 0 && h.normal[1] != 0) return false;
    return true;
}

std::array<Rat, 2> LatticePolytope::rational_lo() const {
    std::array<Rat, 2> out = vertices[0];
    for (auto& v : vertices)
        for (int t = 0; t < 2; ++t)
            if (v[t] < out[t]) out[t] = v[t];
    return out;
}

std::array<Rat, 2> LatticePolytope::rational_hi() const {
    std::array<Rat, 2> out = vertices[0];
    for (auto& v : vertices)
        for (int t = 0; t < 2; ++t)
            if (out[t] < v[t]) out[t] = v[t];
    return out;
}

Vec LatticePolytope::lo() const {
    auto r = rational_lo();
    return {r[0].to_double(), n > 1 ? r[1].to_double() : 0.0};
}

Vec LatticePolytope::hi() const {
    auto r = rational_hi();
    return {r[0].to_double(), n > 1 ? r[1].to_double() : 0.0};
}

std::vector<Vec> LatticePolytope::vertices_double() const {
    std::vector<Vec> out;
    for (auto& v : vertices) out.push_back({v[0].to_double(), n > 1 ? v[1].to_double() : 0.0});
    return out;
}

std::vector<IVec> lattice_points(const LatticePolytope& P, std::int64_t d) {
    if (d <= 0) throw Error("lattice_points: dilation must be positive");
    auto rlo = P.rational_lo();
    auto rhi = P.rational_hi();
    std::array<std::int64_t, 2> lo{}, hi{};
    for (int t = 0; t < P.n; ++t) {
        lo[t] = rat_ceil(Rat(d) * rlo[t]);
        hi[t] = rat_floor(Rat(d) * rhi[t]);
    }
    double cells = 1;
    for (int t = 0; t < P.n; ++t) cells *= double(hi[t] - lo[t] + 1);
    if (cells > 2e8) throw BudgetError("lattice_points: bounding-box scan budget of 2e8 cells exceeded");
    std::vector<IVec> out;
    if (P.n == 1) {
        for (std::int64_t x = lo[0]; x <= hi[0]; ++x)
            if (P.contains_dilated({x, 0}, d)) out.push_back({x, 0});
    } else {
        for (std::int64_t x = lo[0]; x <= hi[0]; ++x)
            for (std::int64_t y = lo[1]; y <= hi[1]; ++y)
                if (P.contains_dilated({x, y}, d)) out.push_back({x, y});
    }
    // scan order is already lexicographic
    return out;
}

LatticePolytope minkowski_sum(const LatticePolytope& P, const LatticePolytope& Q) {
    if (P.n != Q.n) throw Error("minkowski_sum: dimension mismatch");
    std::vector<std::array<Rat, 2>> pts;
    for (auto& a : P.vertices)
        for (auto& b : Q.vertices) pts.push_back({a[0] + b[0], a[1] + b[1]});
    return LatticePolytope::from_vertices(P.n, pts);
}

NormalizedPolytope normalize_volume(const LatticePolytope& P) {
    Rat vol = P.volume();
    if (vol.is_zero()) throw Error("normalize_volume: degenerate polytope (zero volume)");
    Rat c;
    if (P.n == 1) {
        c = vol;
    } else {
        if (!rat_sqrt(vol, c))
            throw Error("normalize_volume: 2-D volume " + vol.str() +
                        " has no rational square root; pick a polytope with rational c");
    }
    return {P.scaled(Rat(1) / c), c};
}

LatticeBasis make_basis(const LatticePolytope& P, int k, Rat lambda) {
    if (k <= 0) throw Error("make_basis: level k must be positive");
    if (!(Rat(0) < lambda)) throw Error("make_basis: lambda must be positive");
    LatticeBasis B;
    B.k = k;
    B.lambda = lambda;
    B.d = rat_floor(Rat(k) * lambda);
    if (B.d <= 0) throw Error("make_basis: floor(k*lambda) must be positive; raise k");
    B.points = lattice_points(P, B.d);
    B.N = static_cast<int>(B.points.size());
    B.base = P;
    return B;
}

}  // namespace torfek
