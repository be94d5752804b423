#include "torfek/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "torfek/errors.hpp"
#include "torfek/io.hpp"

namespace torfek {

double DiscreteMeasure::total_mass() const {
    double s = 0;
    for (auto& a : atoms) s += a.w;
    return s;
}

double DiscreteMeasure::first_moment() const {
    double s = 0;
    for (auto& a : atoms) s += a.w * std::sqrt(dot(n, a.p, a.p));
    return s;
}

double DiscreteMeasure::esssup_norm() const {
    double s = 0;
    for (auto& a : atoms) s = std::max(s, std::sqrt(dot(n, a.p, a.p)));
    return s;
}

bool DiscreteMeasure::uniform_weights(double tol) const {
    if (atoms.empty()) return true;
    double w0 = atoms[0].w;
    for (auto& a : atoms)
        if (std::fabs(a.w - w0) > tol) return false;
    return true;
}

DiscreteMeasure make_measure(int n, std::vector<DiscreteMeasure::Atom> atoms) {
    if (atoms.empty()) throw Error("measure: no atoms");
    for (auto& a : atoms) {
        if (!std::isfinite(a.p[0]) || !std::isfinite(a.p[1]) || !std::isfinite(a.w))
            throw Error("measure: non-finite atom");
        if (a.w <= 0) throw Error("measure: weights must be positive");
    }
    std::sort(atoms.begin(), atoms.end(), [](auto& a, auto& b) {
        if (a.p[0] != b.p[0]) return a.p[0] < b.p[0];
        return a.p[1] < b.p[1];
    });
    std::vector<DiscreteMeasure::Atom> merged;
    for (auto& a : atoms) {
        if (!merged.empty() && merged.back().p[0] == a.p[0] && merged.back().p[1] == a.p[1])
            merged.back().w += a.w;
        else
            merged.push_back(a);
    }
    DiscreteMeasure mu;
    mu.n = n;
    mu.atoms = std::move(merged);
    if (std::fabs(mu.total_mass() - 1.0) > 1e-12)
        throw Error("measure: weights must sum to 1 (got " + fmt17(mu.total_mass()) + ")");
    return mu;
}

DiscreteMeasure uniform_atoms(int n, const std::vector<Vec>& points) {
    std::vector<DiscreteMeasure::Atom> atoms;
    double w = 1.0 / static_cast<double>(points.size());
    for (auto& p : points) atoms.push_back({p, w});
    return make_measure(n, std::move(atoms));
}

DiscreteMeasure dirac(int n, const Vec& p) { return uniform_atoms(n, {p}); }

std::string DiscreteMeasure::to_csv() const {
    std::ostringstream out;
    out << (n == 1 ? "x,w\n" : "x,y,w\n");
    for (auto& a : atoms) {
        out << fmt17(a.p[0]) << ",";
        if (n > 1) out << fmt17(a.p[1]) << ",";
        out << fmt17(a.w) << "\n";
    }
    return out.str();
}

DiscreteMeasure DiscreteMeasure::from_csv(const std::string& text) {
    auto rows = parse_csv(text);
    if (rows.empty()) throw ConfigError("measure csv: empty");
    size_t cols = rows[0].size();
    int n = cols == 2 ? 1 : 2;
    std::vector<DiscreteMeasure::Atom> atoms;
    for (size_t i = 1; i < rows.size(); ++i) {
        auto& r = rows[i];
        if (r.size() != cols) throw ConfigError("measure csv: ragged row");
        DiscreteMeasure::Atom a;
        a.p[0] = std::stod(r[0]);
        if (n > 1) a.p[1] = std::stod(r[1]);
        a.w = std::stod(r[n]);
        atoms.push_back(a);
    }
    return make_measure(n, std::move(atoms));
}

namespace {

double halton(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

}  // namespace

DiscreteMeasure uniform_measure(const LatticePolytope& P, int M) {
    if (M < 1) throw Error("uniform_measure: M must be >= 1");
    std::vector<Vec> pts;
    Vec lo = P.lo(), hi = P.hi();
    if (P.n == 1) {
        for (int i = 0; i < M; ++i)
            pts.push_back({lo[0] + (hi[0] - lo[0]) * (2.0 * i + 1.0) / (2.0 * M), 0.0});
    } else {
        int g = static_cast<int>(std::llround(std::sqrt(double(M))));
        if (P.is_box() && g * g == M) {
            for (int i = 0; i < g; ++i)
                for (int j = 0; j < g; ++j)
                    pts.push_back({lo[0] + (hi[0] - lo[0]) * (2.0 * i + 1.0) / (2.0 * g),
                                   lo[1] + (hi[1] - lo[1]) * (2.0 * j + 1.0) / (2.0 * g)});
        } else {
            std::uint64_t i = 1;
            while (pts.size() < static_cast<size_t>(M)) {
                Vec q{lo[0] + (hi[0] - lo[0]) * halton(i, 2), lo[1] + (hi[1] - lo[1]) * halton(i, 3)};
                if (P.contains(q, 1e-12)) pts.push_back(q);
                ++i;
                if (i > 1000ull * static_cast<std::uint64_t>(M) + 100000ull)
                    throw BudgetError("uniform_measure: Halton rejection budget exceeded");
            }
        }
    }
    return uniform_atoms(P.n, pts);
}

}  // namespace torfek
