#include "torfek/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "torfek/errors.hpp"
#include "torfek/io.hpp"

namespace torfek {

GridFunction GridFunction::sample(int n, Vec lo, Vec hi, std::array<int, 2> res,
                                  const std::function<double(const Vec&)>& f,
                                  std::optional<LatticePolytope> asymptote) {
    GridFunction g;
    g.n = n;
    g.box_lo = lo;
    g.box_hi = hi;
    if (n == 1) res[1] = 1;
    g.res = res;
    if (res[0] < 2 || (n > 1 && res[1] < 2)) throw Error("grid: need at least 2 nodes per axis");
    g.values.resize(static_cast<size_t>(res[0]) * res[1]);
    for (int ix = 0; ix < res[0]; ++ix)
        for (int iy = 0; iy < res[1]; ++iy) {
            double v = f(g.node(ix, iy));
            if (!std::isfinite(v)) throw Error("grid: non-finite sample value");
            g.at(ix, iy) = v;
        }
    g.asymptote = std::move(asymptote);
    return g;
}

double GridFunction::eval(const Vec& x) const {
    Vec q = x;
    bool outside = false;
    for (int t = 0; t < n; ++t) {
        if (q[t] < box_lo[t]) { q[t] = box_lo[t]; outside = true; }
        if (q[t] > box_hi[t]) { q[t] = box_hi[t]; outside = true; }
    }
    auto cell = [&](int axis) {
        double u = (q[axis] - box_lo[axis]) / spacing(axis);
        int i = std::clamp(static_cast<int>(std::floor(u)), 0, res[axis] - 2);
        return std::pair<int, double>{i, u - i};
    };
    double v;
    if (n == 1) {
        auto [i, t] = cell(0);
        v = (1 - t) * at(i) + t * at(i + 1);
    } else {
        auto [i, t] = cell(0);
        auto [j, s] = cell(1);
        v = (1 - t) * ((1 - s) * at(i, j) + s * at(i, j + 1)) +
            t * ((1 - s) * at(i + 1, j) + s * at(i + 1, j + 1));
    }
    if (outside && asymptote) v += asymptote->support(x) - asymptote->support(q);
    return v;
}

double GridFunction::max_value() const {
    double m = values[0];
    for (double v : values) m = std::max(m, v);
    return m;
}

std::string GridFunction::to_csv() const {
    std::ostringstream out;
    out << "# grid n=" << n << " lo=" << fmt17(box_lo[0]);
    if (n > 1) out << ";" << fmt17(box_lo[1]);
    out << " hi=" << fmt17(box_hi[0]);
    if (n > 1) out << ";" << fmt17(box_hi[1]);
    out << " res=" << res[0];
    if (n > 1) out << ";" << res[1];
    out << "\n";
    if (n == 1) {
        out << "x,value\n";
        for (int i = 0; i < res[0]; ++i) out << fmt17(node(i)[0]) << "," << fmt17(at(i)) << "\n";
    } else {
        out << "x,y,value\n";
        for (int i = 0; i < res[0]; ++i)
            for (int j = 0; j < res[1]; ++j) {
                Vec p = node(i, j);
                out << fmt17(p[0]) << "," << fmt17(p[1]) << "," << fmt17(at(i, j)) << "\n";
            }
    }
    return out.str();
}

GridFunction GridFunction::from_csv(const std::string& text) {
    auto rows = parse_csv(text);
    if (rows.size() < 2) throw ConfigError("grid csv: too short");
    int n = rows[0].size() == 2 ? 1 : 2;
    std::vector<double> xs, ys, vs;
    for (size_t i = 1; i < rows.size(); ++i) {
        xs.push_back(std::stod(rows[i][0]));
        if (n > 1) ys.push_back(std::stod(rows[i][1]));
        vs.push_back(std::stod(rows[i][n]));
    }
    GridFunction g;
    g.n = n;
    if (n == 1) {
        g.res = {static_cast<int>(xs.size()), 1};
        g.box_lo = {xs.front(), 0};
        g.box_hi = {xs.back(), 0};
    } else {
        std::vector<double> ux = xs, uy = ys;
        std::sort(ux.begin(), ux.end());
        ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
        std::sort(uy.begin(), uy.end());
        uy.erase(std::unique(uy.begin(), uy.end()), uy.end());
        g.res = {static_cast<int>(ux.size()), static_cast<int>(uy.size())};
        g.box_lo = {ux.front(), uy.front()};
        g.box_hi = {ux.back(), uy.back()};
    }
    g.values = vs;
    if (g.values.size() != static_cast<size_t>(g.res[0]) * g.res[1])
        throw ConfigError("grid csv: node count mismatch");
    return g;
}

GridFunction grid_shift(const GridFunction& f, double c) {
    GridFunction g = f;
    for (auto& v : g.values) v += c;
    return g;
}

double grid_sup_diff(const GridFunction& f, const GridFunction& g) {
    double m = 0;
    for (int i = 0; i < f.res[0]; ++i)
        for (int j = 0; j < f.res[1]; ++j)
            m = std::max(m, std::fabs(f.at(i, j) - g.eval(f.node(i, j))));
    return m;
}

}  // namespace torfek
