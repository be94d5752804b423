#include "torfek/weight.hpp"

#include <algorithm>
#include <cmath>

#include "torfek/errors.hpp"

namespace torfek {

struct ToricWeight::Impl {
    enum class Family { Support, LogSumExp, QuadBlend, GridInterp, Scaled, Sum, Shift } family;
    LatticePolytope P;

    // logsumexp
    double sharpness = 1.0;
    std::vector<std::pair<Vec, double>> terms;  // (point, log coeff)

    // quadblend
    Vec quad{0, 0};
    Vec lin{0, 0};
    double support_coef = 0.0;

    // gridinterp
    GridFunction grid;

    // scaled / shift / sum
    double factor = 1.0;
    double shift = 0.0;
    std::vector<std::shared_ptr<const Impl>> children;

    double value(const Vec& x) const {
        switch (family) {
            case Family::Support:
                return P.support(x);
            case Family::LogSumExp: {
                double m = -1e300;
                for (auto& [p, lc] : terms) m = std::max(m, lc + 2.0 * sharpness * dot(P.n, p, x));
                double s = 0;
                for (auto& [p, lc] : terms) s += std::exp(lc + 2.0 * sharpness * dot(P.n, p, x) - m);
                return (m + std::log(s)) / (2.0 * sharpness);
            }
            case Family::QuadBlend: {
                double v = support_coef * P.support(x);
                for (int t = 0; t < P.n; ++t) v += 0.5 * quad[t] * x[t] * x[t] + lin[t] * x[t];
                return v;
            }
            case Family::GridInterp:
                return grid.eval(x);
            case Family::Scaled:
                return factor * children[0]->value(x);
            case Family::Shift:
                return children[0]->value(x) + shift;
            case Family::Sum: {
                double v = 0;
                for (auto& c : children) v += c->value(x);
                return v;
            }
        }
        return 0;
    }

    Vec grad(const Vec& x) const {
        switch (family) {
            case Family::Support:
                return P.support_grad(x);
            case Family::LogSumExp: {
                double m = -1e300;
                for (auto& [p, lc] : terms) m = std::max(m, lc + 2.0 * sharpness * dot(P.n, p, x));
                double s = 0;
                Vec g{0, 0};
                for (auto& [p, lc] : terms) {
                    double w = std::exp(lc + 2.0 * sharpness * dot(P.n, p, x) - m);
                    s += w;
                    g[0] += w * p[0];
                    g[1] += w * p[1];
                }
                return {g[0] / s, g[1] / s};
            }
            case Family::QuadBlend: {
                Vec g = P.support_grad(x);
                g[0] = support_coef * g[0] + quad[0] * x[0] + lin[0];
                g[1] = support_coef * g[1] + quad[1] * x[1] + lin[1];
                return g;
            }
            case Family::GridInterp: {
                Vec g{0, 0};
                for (int t = 0; t < P.n; ++t) {
                    double h = 0.5 * grid.spacing(t);
                    Vec a = x, b = x;
                    a[t] -= h;
                    b[t] += h;
                    g[t] = (grid.eval(b) - grid.eval(a)) / (2.0 * h);
                }
                return g;
            }
            case Family::Scaled: {
                Vec g = children[0]->grad(x);
                return {factor * g[0], factor * g[1]};
            }
            case Family::Shift:
                return children[0]->grad(x);
            case Family::Sum: {
                Vec g{0, 0};
                for (auto& c : children) {
                    Vec h = c->grad(x);
                    g[0] += h[0];
                    g[1] += h[1];
                }
                return g;
            }
        }
        return {0, 0};
    }
};

double ToricWeight::value(const Vec& x) const { return impl_->value(x); }
Vec ToricWeight::grad(const Vec& x) const { return impl_->grad(x); }
const LatticePolytope& ToricWeight::polytope() const { return impl_->P; }

std::string ToricWeight::family() const {
    switch (impl_->family) {
        case Impl::Family::Support: return "support";
        case Impl::Family::LogSumExp: return "logsumexp";
        case Impl::Family::QuadBlend: return "quadblend";
        case Impl::Family::GridInterp: return "gridinterp";
        case Impl::Family::Scaled: return "scaled";
        case Impl::Family::Shift: return "shift";
        case Impl::Family::Sum: return "sum";
    }
    return "?";
}

double ToricWeight::growth_bound(Vec lo, Vec hi, int res) const {
    double m = 0;
    int ry = impl_->P.n > 1 ? res : 1;
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < ry; ++j) {
            Vec x{lo[0] + (hi[0] - lo[0]) * i / (res - 1.0), 0};
            if (impl_->P.n > 1) x[1] = lo[1] + (hi[1] - lo[1]) * j / (ry - 1.0);
            double v = value(x);
            if (!std::isfinite(v)) throw Error("weight: non-finite value on test grid");
            m = std::max(m, std::fabs(v - impl_->P.support(x)));
        }
    return m;
}

ToricWeight ToricWeight::support(const LatticePolytope& P) {
    auto impl = std::make_shared<Impl>();
    impl->family = Impl::Family::Support;
    impl->P = P;
    return ToricWeight(impl);
}

ToricWeight ToricWeight::logsumexp(const LatticePolytope& P, double sharpness,
                                   std::vector<std::pair<IVec, double>> coeffs) {
    if (sharpness <= 0) throw Error("logsumexp weight: sharpness must be positive");
    auto impl = std::make_shared<Impl>();
    impl->family = Impl::Family::LogSumExp;
    impl->P = P;
    impl->sharpness = sharpness;
    if (coeffs.empty())
        for (auto& p : lattice_points(P, 1)) coeffs.push_back({p, 1.0});
    for (auto& [p, a] : coeffs) {
        if (a <= 0) throw Error("logsumexp weight: coefficients must be positive");
        impl->terms.push_back({{double(p[0]), double(p[1])}, std::log(a)});
    }
    return ToricWeight(impl);
}

ToricWeight ToricWeight::quadblend(const LatticePolytope& P, Vec quad, Vec lin, double support_coef) {
    auto impl = std::make_shared<Impl>();
    impl->family = Impl::Family::QuadBlend;
    impl->P = P;
    impl->quad = quad;
    impl->lin = lin;
    impl->support_coef = support_coef;
    return ToricWeight(impl);
}

ToricWeight ToricWeight::gridinterp(const LatticePolytope& P, GridFunction g) {
    auto impl = std::make_shared<Impl>();
    impl->family = Impl::Family::GridInterp;
    impl->P = P;
    if (!g.asymptote) g.asymptote = P;
    impl->grid = std::move(g);
    return ToricWeight(impl);
}

ToricWeight scale_weight(const ToricWeight& w, Rat c) {
    if (!(Rat(0) < c)) throw Error("scale_weight: scale must be positive");
    if (c == Rat(1)) return w;
    auto impl = std::make_shared<ToricWeight::Impl>();
    impl->family = ToricWeight::Impl::Family::Scaled;
    impl->P = w.impl_->P.scaled(Rat(1) / c);
    impl->factor = 1.0 / c.to_double();
    impl->children = {w.impl_};
    return ToricWeight(impl);
}

ToricWeight sum_weights(const std::vector<ToricWeight>& ws) {
    if (ws.empty()) throw Error("sum_weights: empty");
    if (ws.size() == 1) return ws[0];
    auto impl = std::make_shared<ToricWeight::Impl>();
    impl->family = ToricWeight::Impl::Family::Sum;
    LatticePolytope P = ws[0].polytope();
    for (size_t i = 1; i < ws.size(); ++i) P = minkowski_sum(P, ws[i].polytope());
    impl->P = P;
    for (auto& w : ws) impl->children.push_back(w.impl_);
    return ToricWeight(impl);
}

ToricWeight shift_weight(const ToricWeight& w, double c) {
    auto impl = std::make_shared<ToricWeight::Impl>();
    impl->family = ToricWeight::Impl::Family::Shift;
    impl->P = w.impl_->P;
    impl->shift = c;
    impl->children = {w.impl_};
    return ToricWeight(impl);
}

}  // namespace torfek
