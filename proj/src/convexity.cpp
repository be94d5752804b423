#include "torfek/convexity.hpp"

#include <algorithm>
#include <cmath>

#include "torfek/errors.hpp"
#include "torfek/transport.hpp"

namespace torfek {

namespace {

// Conjugate of the samples (xs[i], fs[i]) at sorted slopes ps: out[q] =
// max_i ps[q]*xs[i] - fs[i]. Linear time: lower convex hull + monotone sweep.
// argmax[q] receives the attaining sample index.
void llt_1d(const std::vector<double>& xs, const std::vector<double>& fs,
            const std::vector<double>& ps, std::vector<double>& out, std::vector<int>& argmax) {
    size_t n = xs.size();
    std::vector<int> hull;
    hull.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        // keep only vertices of the lower convex hull of the graph
        while (hull.size() >= 2) {
            size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            double cross = (xs[b] - xs[a]) * (fs[i] - fs[a]) - (fs[b] - fs[a]) * (xs[i] - xs[a]);
            if (cross <= 0) hull.pop_back();
            else break;
        }
        hull.push_back(static_cast<int>(i));
    }
    out.resize(ps.size());
    argmax.resize(ps.size());
    size_t j = 0;
    for (size_t q = 0; q < ps.size(); ++q) {
        double p = ps[q];
        while (j + 1 < hull.size() &&
               p * xs[hull[j + 1]] - fs[hull[j + 1]] >= p * xs[hull[j]] - fs[hull[j]])
            ++j;
        out[q] = p * xs[hull[j]] - fs[hull[j]];
        argmax[q] = hull[j];
    }
}

std::vector<double> linspace(double lo, double hi, int m) {
    std::vector<double> v(m);
    for (int i = 0; i < m; ++i) v[i] = lo + (hi - lo) * i / (m - 1.0);
    return v;
}

}  // namespace

GridFunction legendre_transform(const GridFunction& f, const LatticePolytope& Q, int res) {
    if (f.n != Q.n) throw Error("legendre_transform: dimension mismatch");
    for (double v : f.values)
        if (!std::isfinite(v)) throw Error("legendre_transform: input not finite");
    Vec qlo = Q.lo(), qhi = Q.hi();
    GridFunction out;
    out.n = f.n;
    out.box_lo = qlo;
    out.box_hi = qhi;
    double interior_margin;
    if (f.n == 1) {
        out.res = {res, 1};
        auto ps = linspace(qlo[0], qhi[0], res);
        std::vector<double> xs(f.res[0]);
        for (int i = 0; i < f.res[0]; ++i) xs[i] = f.node(i)[0];
        std::vector<double> vals;
        std::vector<int> arg;
        llt_1d(xs, f.values, ps, vals, arg);
        interior_margin = 0.51 * (ps.size() > 1 ? ps[1] - ps[0] : 0.0);
        for (size_t q = 0; q < ps.size(); ++q) {
            if ((arg[q] == 0 || arg[q] == f.res[0] - 1) &&
                Q.strictly_inside({ps[q], 0}, interior_margin))
                throw Error("legendre_transform: argmax on the box boundary for an interior slope; "
                            "enlarge the evaluation box");
        }
        out.values = vals;
        return out;
    }
    // n == 2, separable: stage 1 conjugates each x0-row in x1, stage 2 each p1-column in x0.
    out.res = {res, res};
    auto p0s = linspace(qlo[0], qhi[0], res);
    auto p1s = linspace(qlo[1], qhi[1], res);
    std::vector<double> x0s(f.res[0]), x1s(f.res[1]);
    for (int i = 0; i < f.res[0]; ++i) x0s[i] = f.node(i, 0)[0];
    for (int j = 0; j < f.res[1]; ++j) x1s[j] = f.node(0, j)[1];
    // stage1[i][q1] = max_j p1*x1[j] - f(i,j); flag when argmax at x1 boundary
    std::vector<std::vector<double>> stage1(f.res[0]);
    std::vector<std::vector<char>> flag1(f.res[0]);
    for (int i = 0; i < f.res[0]; ++i) {
        std::vector<double> row(f.res[1]);
        for (int j = 0; j < f.res[1]; ++j) row[j] = f.at(i, j);
        std::vector<double> vals;
        std::vector<int> arg;
        llt_1d(x1s, row, p1s, vals, arg);
        stage1[i] = vals;
        flag1[i].resize(res);
        for (int q = 0; q < res; ++q) flag1[i][q] = (arg[q] == 0 || arg[q] == f.res[1] - 1);
    }
    out.values.assign(static_cast<size_t>(res) * res, 0.0);
    double m0 = 0.51 * (res > 1 ? p0s[1] - p0s[0] : 0.0);
    double m1 = 0.51 * (res > 1 ? p1s[1] - p1s[0] : 0.0);
    interior_margin = std::max(m0, m1);
    for (int q1 = 0; q1 < res; ++q1) {
        std::vector<double> col(f.res[0]);
        for (int i = 0; i < f.res[0]; ++i) col[i] = -stage1[i][q1];
        std::vector<double> vals;
        std::vector<int> arg;
        llt_1d(x0s, col, p0s, vals, arg);
        for (int q0 = 0; q0 < res; ++q0) {
            bool boundary = (arg[q0] == 0 || arg[q0] == f.res[0] - 1) || flag1[arg[q0]][q1];
            if (boundary && Q.strictly_inside({p0s[q0], p1s[q1]}, interior_margin))
                throw Error("legendre_transform: argmax on the box boundary for an interior slope; "
                            "enlarge the evaluation box");
            out.values[static_cast<size_t>(q0) * res + q1] = vals[q0];
        }
    }
    return out;
}

namespace {

GridFunction sample_weight(const ToricWeight& phi, Vec lo, Vec hi, int res) {
    int n = phi.polytope().n;
    return GridFunction::sample(n, lo, hi, {res, n > 1 ? res : 1},
                                [&](const Vec& x) { return phi.value(x); }, phi.polytope());
}

// normalized midpoint quadrature nodes of P (mask-filtered in 2-D)
std::vector<Vec> quadrature_nodes(const LatticePolytope& P, int res) {
    std::vector<Vec> nodes;
    Vec lo = P.lo(), hi = P.hi();
    if (P.n == 1) {
        for (int i = 0; i < res; ++i)
            nodes.push_back({lo[0] + (hi[0] - lo[0]) * (2.0 * i + 1) / (2.0 * res), 0});
    } else {
        for (int i = 0; i < res; ++i)
            for (int j = 0; j < res; ++j) {
                Vec p{lo[0] + (hi[0] - lo[0]) * (2.0 * i + 1) / (2.0 * res),
                      lo[1] + (hi[1] - lo[1]) * (2.0 * j + 1) / (2.0 * res)};
                if (P.contains(p, 1e-12)) nodes.push_back(p);
            }
    }
    return nodes;
}

}  // namespace

GridFunction project(const ToricWeight& phi, const LatticePolytope& P, int res, Vec box_lo,
                     Vec box_hi, int res_x) {
    if (phi.polytope().n != P.n) throw Error("project: dimension mismatch");
    GridFunction sampled = sample_weight(phi, box_lo, box_hi, res_x);
    GridFunction conj = legendre_transform(sampled, P, res);
    // second conjugate back onto the x-box, restricted to slopes in P
    int n = P.n;
    GridFunction out;
    out.n = n;
    out.box_lo = box_lo;
    out.box_hi = box_hi;
    out.res = {res_x, n > 1 ? res_x : 1};
    out.asymptote = P;
    if (n == 1) {
        std::vector<double> ps(conj.res[0]);
        for (int q = 0; q < conj.res[0]; ++q) ps[q] = conj.node(q)[0];
        auto xs = linspace(box_lo[0], box_hi[0], res_x);
        std::vector<double> vals;
        std::vector<int> arg;
        llt_1d(ps, conj.values, xs, vals, arg);
        out.values = vals;
    } else {
        // dense double sup over the P-grid (res^2 nodes), masked to P
        std::vector<Vec> pnodes;
        std::vector<double> gvals;
        for (int q0 = 0; q0 < conj.res[0]; ++q0)
            for (int q1 = 0; q1 < conj.res[1]; ++q1) {
                Vec p = conj.node(q0, q1);
                if (P.contains(p, 1e-9)) {
                    pnodes.push_back(p);
                    gvals.push_back(conj.at(q0, q1));
                }
            }
        out.values.resize(static_cast<size_t>(res_x) * res_x);
        for (int i = 0; i < res_x; ++i)
            for (int j = 0; j < res_x; ++j) {
                Vec x = out.node(i, j);
                double best = -1e300;
                for (size_t t = 0; t < pnodes.size(); ++t)
                    best = std::max(best, dot(2, x, pnodes[t]) - gvals[t]);
                out.at(i, j) = best;
            }
    }
    return out;
}

DiscreteMeasure equilibrium_measure(const ToricWeight& phi, const LatticePolytope& P, int M,
                                    Vec box_lo, Vec box_hi, int res_x) {
    if (M < 1) throw Error("equilibrium_measure: M must be >= 1");
    int n = P.n;
    GridFunction sampled = sample_weight(phi, box_lo, box_hi, res_x);
    DiscreteMeasure quad = uniform_measure(P, M);
    std::vector<DiscreteMeasure::Atom> atoms;
    int ry = n > 1 ? res_x : 1;
    for (auto& node : quad.atoms) {
        const Vec p = node.p;
        double best = -1e300;
        for (int i = 0; i < res_x; ++i)
            for (int j = 0; j < ry; ++j) {
                Vec x = sampled.node(i, j);
                best = std::max(best, dot(n, x, p) - sampled.at(i, j));
            }
        double tol = 1e-9 * (1.0 + std::fabs(best));
        Vec mn{1e300, 1e300}, mx{-1e300, -1e300};
        for (int i = 0; i < res_x; ++i)
            for (int j = 0; j < ry; ++j) {
                Vec x = sampled.node(i, j);
                if (dot(n, x, p) - sampled.at(i, j) >= best - tol) {
                    for (int t = 0; t < n; ++t) {
                        mn[t] = std::min(mn[t], x[t]);
                        mx[t] = std::max(mx[t], x[t]);
                    }
                }
            }
        // ties occur on the measure-zero kink set; the midpoint is deterministic
        Vec x{0.5 * (mn[0] + mx[0]), n > 1 ? 0.5 * (mn[1] + mx[1]) : 0.0};
        atoms.push_back({x, node.w});
    }
    return make_measure(n, std::move(atoms));
}

double equilibrium_energy(const ToricWeight& phi, const LatticePolytope& P, int res, Vec box_lo,
                          Vec box_hi, int res_x) {
    GridFunction sampled = sample_weight(phi, box_lo, box_hi, res_x);
    GridFunction conj = legendre_transform(sampled, P, res);
    auto nodes = quadrature_nodes(P, res);
    double s = 0;
    for (auto& p : nodes) s += conj.eval(p);
    return -s / static_cast<double>(nodes.size());
}

namespace {

// E^eq of a grid iterate: conjugate of the samples evaluated exactly at the
// midpoint quadrature nodes. The argmax histogram is the supergradient.
double grid_energy(const GridFunction& psi, const LatticePolytope& P, int res_p,
                   std::vector<int>* hist = nullptr) {
    auto nodes = quadrature_nodes(P, res_p);
    int n = psi.n;
    int ry = n > 1 ? psi.res[1] : 1;
    double s = 0;
    if (hist) hist->assign(psi.values.size(), 0);
    for (auto& p : nodes) {
        double best = -1e300;
        int bi = 0, bj = 0;
        for (int i = 0; i < psi.res[0]; ++i)
            for (int j = 0; j < ry; ++j) {
                double v = dot(n, psi.node(i, j), p) - psi.at(i, j);
                if (v > best) { best = v; bi = i; bj = j; }
            }
        s += best;
        if (hist) ++(*hist)[static_cast<size_t>(bi) * psi.res[1] + bj];
    }
    return -s / static_cast<double>(nodes.size());
}

}  // namespace

CoupledResult coupled_energy(const ToricWeight& phi,
                             const std::vector<std::pair<LatticePolytope, int>>& bundles,
                             const CoupledOptions& opts) {
    if (bundles.empty()) throw Error("coupled_energy: no bundles");
    int n = phi.polytope().n;
    size_t m = bundles.size();
    // phi's polytope must be the Minkowski sum of the bundle polytopes
    {
        LatticePolytope S = bundles[0].first;
        for (size_t j = 1; j < m; ++j) S = minkowski_sum(S, bundles[j].first);
        bool same = S.n == phi.polytope().n && S.vertices.size() == phi.polytope().vertices.size();
        if (same) {
            auto a = S.vertices, b = phi.polytope().vertices;
            auto lex = [](const std::array<Rat, 2>& u, const std::array<Rat, 2>& v) {
                if (u[0] != v[0]) return u[0] < v[0];
                return u[1] < v[1];
            };
            std::sort(a.begin(), a.end(), lex);
            std::sort(b.begin(), b.end(), lex);
            for (size_t t = 0; t < a.size(); ++t)
                if (a[t][0] != b[t][0] || a[t][1] != b[t][1]) same = false;
        }
        if (!same)
            throw Error("coupled_energy: phi's polytope is not the Minkowski sum of the bundles");
    }
    std::array<int, 2> res{opts.res_x, n > 1 ? opts.res_x : 1};
    GridFunction phig = GridFunction::sample(n, opts.box_lo, opts.box_hi, res,
                                             [&](const Vec& x) { return phi.value(x); });
    // init: psi_j = h_{P_j} + (phi - sum h)/m, correct growth per bundle
    std::vector<GridFunction> psi;
    for (size_t j = 0; j < m; ++j) {
        const LatticePolytope& Pj = bundles[j].first;
        psi.push_back(GridFunction::sample(
            n, opts.box_lo, opts.box_hi, res,
            [&](const Vec& x) {
                double sh = 0;
                for (auto& [P, r] : bundles) sh += P.support(x);
                return Pj.support(x) + (phi.value(x) - sh) / static_cast<double>(m);
            },
            Pj));
    }

    auto eval_f = [&](const std::vector<GridFunction>& ps, std::vector<std::vector<int>>* hists,
                      size_t* sup_node) {
        double e = 0;
        for (size_t j = 0; j < m; ++j) {
            std::vector<int> h;
            e += grid_energy(ps[j], bundles[j].first, bundles[j].second, hists ? &h : nullptr);
            if (hists) hists->push_back(std::move(h));
        }
        double sup = -1e300;
        size_t argn = 0;
        for (size_t t = 0; t < phig.values.size(); ++t) {
            double v = -phig.values[t];
            for (size_t j = 0; j < m; ++j) v += ps[j].values[t];
            if (v > sup) { sup = v; argn = t; }
        }
        if (sup_node) *sup_node = argn;
        return e - sup;
    };

    CoupledResult out;
    double f = eval_f(psi, nullptr, nullptr);
    out.trace.push_back(f);
    double eta_scale = 1.0;
    double window_base = f;
    int window_count = 0;
    bool converged = false;
    int iter = 1;
    for (; iter <= opts.max_iter; ++iter) {
        std::vector<std::vector<int>> hists;
        size_t sup_node = 0;
        eval_f(psi, &hists, &sup_node);
        double eta = eta_scale * opts.eta0 / std::sqrt(static_cast<double>(iter));
        std::vector<GridFunction> trial = psi;
        for (size_t j = 0; j < m; ++j) {
            auto nc = static_cast<double>(
                quadrature_nodes(bundles[j].first, bundles[j].second).size());
            for (size_t t = 0; t < trial[j].values.size(); ++t)
                trial[j].values[t] += eta * hists[j][t] / nc;
            trial[j].values[sup_node] -= eta;
        }
        double ftrial = eval_f(trial, nullptr, nullptr);
        if (ftrial >= f) {
            psi = std::move(trial);
            f = ftrial;
            out.trace.push_back(f);
        } else {
            eta_scale *= 0.5;  // damping on rejection
        }
        if (++window_count >= opts.stop_window) {
            if (f - window_base <= opts.stop_gain) { converged = true; break; }
            window_base = f;
            window_count = 0;
        }
    }
    if (!converged)
        throw Error("coupled_energy: no convergence within the iteration budget (best f=" +
                    std::to_string(f) + ")");

    // normalize: shift psi_1 so sup(sum psi - phi) = 0
    double sup = -1e300;
    for (size_t t = 0; t < phig.values.size(); ++t) {
        double v = -phig.values[t];
        for (size_t j = 0; j < m; ++j) v += psi[j].values[t];
        sup = std::max(sup, v);
    }
    for (auto& v : psi[0].values) v -= sup;
    f = eval_f(psi, nullptr, nullptr);

    CoupledPotentials pots;
    pots.psi = psi;
    std::vector<DiscreteMeasure> pushed;
    for (size_t j = 0; j < m; ++j) {
        ToricWeight w = ToricWeight::gridinterp(bundles[j].first, psi[j]);
        pushed.push_back(equilibrium_measure(w, bundles[j].first, opts.measure_points, opts.box_lo,
                                             opts.box_hi, opts.res_x));
    }
    pots.mu = pushed[0];
    double w1max = 0;
    for (size_t a = 0; a < m; ++a)
        for (size_t b = a + 1; b < m; ++b) w1max = std::max(w1max, wasserstein1(pushed[a], pushed[b]));
    pots.residuals.pairwise_w1 = w1max;
    double viol = -1e300, gap = 0;
    for (size_t t = 0; t < phig.values.size(); ++t) {
        double v = -phig.values[t];
        for (size_t j = 0; j < m; ++j) v += psi[j].values[t];
        viol = std::max(viol, v);
    }
    pots.residuals.sup_violation = viol;
    for (auto& atom : pots.mu.atoms) {
        double v = -phi.value(atom.p);
        for (size_t j = 0; j < m; ++j) v += psi[j].eval(atom.p);
        gap = std::max(gap, std::fabs(v));
    }
    pots.residuals.support_gap = gap;
    out.F = f;
    out.potentials = std::move(pots);
    out.iterations = iter;
    return out;
}

CoupledPotentials potentials_from_target_measure(const DiscreteMeasure& mu,
                                                 const std::vector<LatticePolytope>& intervals,
                                                 Vec box_lo, Vec box_hi, int res_x) {
    if (mu.atoms.empty()) throw Error("potentials_from_target_measure: empty measure");
    if (mu.n != 1) throw Error("potentials_from_target_measure: 1-D only");
    if (!std::isfinite(mu.first_moment()))
        throw Error("potentials_from_target_measure: needs finite first moment");
    CoupledPotentials out;
    for (auto& P : intervals) {
        if (P.n != 1) throw Error("potentials_from_target_measure: intervals must be 1-D");
        double a = P.lo()[0], b = P.hi()[0];
        // psi' is the step function a + F_mu(x)(b-a); integrate it exactly
        GridFunction g;
        g.n = 1;
        g.box_lo = box_lo;
        g.box_hi = box_hi;
        g.res = {res_x, 1};
        g.values.resize(res_x);
        g.asymptote = P;
        double h = (box_hi[0] - box_lo[0]) / (res_x - 1.0);
        double acc = 0;
        size_t ai = 0;
        double F = 0;
        // advance atom pointer below the box start
        while (ai < mu.atoms.size() && mu.atoms[ai].p[0] <= box_lo[0]) F += mu.atoms[ai++].w;
        g.values[0] = 0;
        for (int i = 1; i < res_x; ++i) {
            double t0 = box_lo[0] + h * (i - 1), t1 = box_lo[0] + h * i;
            double seg = 0, prev = t0;
            while (ai < mu.atoms.size() && mu.atoms[ai].p[0] <= t1) {
                seg += (mu.atoms[ai].p[0] - prev) * (a + F * (b - a));
                prev = mu.atoms[ai].p[0];
                F += mu.atoms[ai].w;
                ++ai;
            }
            seg += (t1 - prev) * (a + F * (b - a));
            acc += seg;
            g.values[i] = acc;
        }
        double anchor = g.eval({0, 0});
        for (auto& v : g.values) v -= anchor;
        out.psi.push_back(std::move(g));
    }
    out.mu = mu;
    out.residuals = {};  // sum psi is the designated phi: exact equality
    return out;
}

}  // namespace torfek
