#include "torfek/vandermonde.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "torfek/errors.hpp"
#include "torfek/io.hpp"
#include "torfek/linalg.hpp"

namespace torfek {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925287;
}  // namespace

void Configuration::wrap_angles() {
    for (auto& pt : pts)
        for (int t = 0; t < n; ++t) {
            pt.y[t] = std::fmod(pt.y[t], kTwoPi);
            if (pt.y[t] < 0) pt.y[t] += kTwoPi;
        }
}

void Configuration::validate() const {
    for (auto& pt : pts)
        if (!std::isfinite(pt.x[0]) || !std::isfinite(pt.x[1]) || !std::isfinite(pt.y[0]) ||
            !std::isfinite(pt.y[1]))
            throw Error("configuration: non-finite coordinate");
}

std::string Configuration::to_csv() const {
    std::ostringstream out;
    out << (n == 1 ? "x,y\n" : "x0,x1,y0,y1\n");
    for (auto& pt : pts) {
        out << fmt17(pt.x[0]);
        if (n > 1) out << "," << fmt17(pt.x[1]);
        out << "," << fmt17(pt.y[0]);
        if (n > 1) out << "," << fmt17(pt.y[1]);
        out << "\n";
    }
    return out.str();
}

Configuration Configuration::from_csv(const std::string& text) {
    auto rows = parse_csv(text);
    if (rows.empty()) throw ConfigError("configuration csv: empty");
    int n = rows[0].size() == 2 ? 1 : 2;
    Configuration c;
    c.n = n;
    for (size_t i = 1; i < rows.size(); ++i) {
        Point pt;
        pt.x[0] = std::stod(rows[i][0]);
        if (n > 1) pt.x[1] = std::stod(rows[i][1]);
        pt.y[0] = std::stod(rows[i][n]);
        if (n > 1) pt.y[1] = std::stod(rows[i][n + 1]);
        c.pts.push_back(pt);
    }
    c.validate();
    return c;
}

BundleSpec BundleSpec::make(const LatticePolytope& P, const ToricWeight& weight) {
    BundleSpec b;
    b.P_ = P;
    b.weight_ = weight;
    auto norm = normalize_volume(P);
    b.c_ = norm.c;
    b.P_norm_ = norm.polytope;
    b.weight_norm_ = scale_weight(weight, norm.c);
    return b;
}

const LatticeBasis& BundleSpec::basis(int k) const {
    std::lock_guard<std::mutex> lock(*mtx_);
    auto it = cache_.find(k);
    if (it == cache_.end())
        it = cache_.emplace(k, make_basis(P_, k, Rat(1) / c_)).first;
    return it->second;
}

double log_vd(const Configuration& config, const LatticeBasis& B, const ToricWeight& phi, int k,
              const std::optional<std::vector<double>>& row_scalings) {
    config.validate();
    const int N = B.N;
    if (static_cast<int>(config.pts.size()) < N)
        throw Error("log_vd: configuration has fewer points than the basis size");
    if (row_scalings && static_cast<int>(row_scalings->size()) < N)
        throw Error("log_vd: row scaling vector too short");
    const int n = config.n;
    std::vector<cplx> M(static_cast<size_t>(N) * N);
    double scale_sum = 0;
    for (int i = 0; i < N; ++i) {
        const auto& pt = config.pts[i];
        double r = row_scalings ? (*row_scalings)[i] : static_cast<double>(B.d) * B.base.support(pt.x);
        scale_sum += r;
        for (int l = 0; l < N; ++l) {
            const auto& p = B.points[l];
            double re = pt.x[0] * p[0] + (n > 1 ? pt.x[1] * p[1] : 0.0) - r;
            double im = pt.y[0] * p[0] + (n > 1 ? pt.y[1] * p[1] : 0.0);
            M[static_cast<size_t>(i) * N + l] = std::exp(cplx(re, im));
        }
    }
    auto lu = ComplexLU::factor(std::move(M), N);
    if (lu.singular) return kNegInf;
    double weight_sum = 0;
    for (int i = 0; i < N; ++i) weight_sum += phi.value(config.pts[i].x);
    double out = 2.0 * (scale_sum + lu.log_abs_det) - 2.0 * k * weight_sum;
    if (std::isnan(out)) throw Error("log_vd: NaN result");
    return out;
}

std::vector<PointGrad> grad_log_vd(const Configuration& config, const LatticeBasis& B,
                                   const ToricWeight& phi, int k) {
    config.validate();
    const int N = B.N;
    if (static_cast<int>(config.pts.size()) < N)
        throw Error("grad_log_vd: configuration has fewer points than the basis size");
    const int n = config.n;
    std::vector<cplx> M(static_cast<size_t>(N) * N);
    for (int i = 0; i < N; ++i) {
        const auto& pt = config.pts[i];
        double r = static_cast<double>(B.d) * B.base.support(pt.x);
        for (int l = 0; l < N; ++l) {
            const auto& p = B.points[l];
            double re = pt.x[0] * p[0] + (n > 1 ? pt.x[1] * p[1] : 0.0) - r;
            double im = pt.y[0] * p[0] + (n > 1 ? pt.y[1] * p[1] : 0.0);
            M[static_cast<size_t>(i) * N + l] = std::exp(cplx(re, im));
        }
    }
    auto lu = ComplexLU::factor(M, N);
    if (lu.singular) throw Error("grad_log_vd: singular matrix");
    auto inv = lu.inverse();
    std::vector<PointGrad> out(config.pts.size());
    for (int i = 0; i < N; ++i) {
        cplx s0(0, 0), s1(0, 0);
        for (int l = 0; l < N; ++l) {
            cplx t = inv[static_cast<size_t>(l) * N + i] * M[static_cast<size_t>(i) * N + l];
            s0 += t * static_cast<double>(B.points[l][0]);
            if (n > 1) s1 += t * static_cast<double>(B.points[l][1]);
        }
        Vec wg = phi.grad(config.pts[i].x);
        out[i].dx[0] = 2.0 * s0.real() - 2.0 * k * wg[0];
        out[i].dy[0] = -2.0 * s0.imag();
        if (n > 1) {
            out[i].dx[1] = 2.0 * s1.real() - 2.0 * k * wg[1];
            out[i].dy[1] = -2.0 * s1.imag();
        }
    }
    return out;
}

int product_num_points(const std::vector<BundleSpec>& bundles, int k) {
    int nhat = 0;
    for (auto& b : bundles) nhat = std::max(nhat, b.basis(k).N);
    return nhat;
}

double product_objective(const Configuration& config, const std::vector<BundleSpec>& bundles, int k) {
    if (bundles.empty()) throw Error("product_objective: no bundles");
    int nhat = product_num_points(bundles, k);
    if (static_cast<int>(config.pts.size()) < nhat)
        throw Error("product_objective: configuration needs N̂ points");
    double s = 0;
    for (auto& b : bundles) {
        double v = log_vd(config, b.basis(k), b.weight_norm(), k);
        if (v == kNegInf) return kNegInf;
        s += b.scale_double() * v;
    }
    return s / (static_cast<double>(k) * nhat);
}

std::vector<PointGrad> grad_product_objective(const Configuration& config,
                                              const std::vector<BundleSpec>& bundles, int k) {
    int nhat = product_num_points(bundles, k);
    std::vector<PointGrad> total(config.pts.size());
    double inv = 1.0 / (static_cast<double>(k) * nhat);
    for (auto& b : bundles) {
        auto g = grad_log_vd(config, b.basis(k), b.weight_norm(), k);
        double cj = b.scale_double();
        for (size_t i = 0; i < g.size(); ++i)
            for (int t = 0; t < 2; ++t) {
                total[i].dx[t] += inv * cj * g[i].dx[t];
                total[i].dy[t] += inv * cj * g[i].dy[t];
            }
    }
    return total;
}

}  // namespace torfek
