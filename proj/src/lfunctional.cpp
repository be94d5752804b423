#include "torfek/lfunctional.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "torfek/errors.hpp"
#include "torfek/fekete.hpp"
#include "torfek/linalg.hpp"
#include "torfek/rng.hpp"
#include "torfek/transport.hpp"

namespace torfek {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925287;
constexpr std::uint64_t kTupleBudget = 10000000;  // prod_j N_j! cap

double factorial_product(const std::vector<LatticeBasis>& bases) {
    double t = 1;
    for (auto& b : bases)
        for (int i = 2; i <= b.N; ++i) t *= i;
    return t;
}

int parity(const std::vector<int>& perm) {
    int inv = 0;
    for (size_t i = 0; i < perm.size(); ++i)
        for (size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) ++inv;
    return inv % 2 == 0 ? 1 : -1;
}

double log_sum_exp(const std::vector<double>& v) {
    double m = kNegInf;
    for (double t : v) m = std::max(m, t);
    if (m == kNegInf) return kNegInf;
    double s = 0;
    for (double t : v)
        if (t != kNegInf) s += std::exp(t - m);
    return m + std::log(s);
}

}  // namespace

ExpansionTable expansion(const std::vector<LatticeBasis>& bases, int N) {
    if (bases.empty()) throw Error("expansion: no bases");
    for (auto& b : bases)
        if (b.N > N) throw Error("expansion: N must be max_j N_j");
    double tuples = factorial_product(bases);
    if (tuples > static_cast<double>(kTupleBudget))
        throw BudgetError("expansion: permutation budget prod_j N_j! <= 1e7 exceeded (instance has " +
                          std::to_string(tuples) + ")");
    const int n = bases[0].base.n;
    const size_t m = bases.size();

    // per-level permutations iterated in lexicographic order; parity recomputed
    // for the advanced level only
    std::vector<std::vector<int>> perm(m);
    std::vector<int> sign(m, 1);
    for (size_t j = 0; j < m; ++j) {
        perm[j].resize(bases[j].N);
        for (int i = 0; i < bases[j].N; ++i) perm[j][i] = i;
    }

    struct Acc {
        std::int64_t sum = 0;
        std::uint64_t count = 0;
    };
    std::unordered_map<std::string, Acc> table;
    table.reserve(1024);

    std::vector<std::int32_t> a(static_cast<size_t>(N) * n);
    std::string key(a.size() * sizeof(std::int32_t), '\0');
    bool done = false;
    while (!done) {
        std::fill(a.begin(), a.end(), 0);
        int total_sign = 1;
        for (size_t j = 0; j < m; ++j) {
            total_sign *= sign[j];
            for (int i = 0; i < bases[j].N; ++i) {
                const auto& p = bases[j].points[perm[j][i]];
                a[static_cast<size_t>(i) * n + 0] += static_cast<std::int32_t>(p[0]);
                if (n > 1) a[static_cast<size_t>(i) * n + 1] += static_cast<std::int32_t>(p[1]);
            }
        }
        std::memcpy(key.data(), a.data(), key.size());
        auto& acc = table[key];
        acc.sum += total_sign;
        acc.count += 1;
        // odometer advance, last level fastest
        done = true;
        for (size_t j = m; j-- > 0;) {
            if (std::next_permutation(perm[j].begin(), perm[j].end())) {
                sign[j] = parity(perm[j]);
                done = false;
                break;
            }
            for (int i = 0; i < bases[j].N; ++i) perm[j][i] = i;
            sign[j] = 1;
        }
    }

    ExpansionTable out;
    out.n = n;
    out.N = N;
    out.total_tuples = static_cast<std::uint64_t>(tuples + 0.5);
    for (auto& [k, acc] : table) {
        ExpansionTable::Entry e;
        e.a.resize(static_cast<size_t>(N) * n);
        std::memcpy(e.a.data(), k.data(), k.size());
        e.signed_sum = acc.sum;
        e.count = acc.count;
        out.entries.push_back(std::move(e));
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const auto& x, const auto& y) { return x.a < y.a; });
    return out;
}

namespace {

// exact-by-bandwidth periodic trapezoid for the fiber integral
double fiber_quadrature(const std::vector<Vec>& x, const std::vector<LatticeBasis>& bases, int mult) {
    const int n = bases[0].base.n;
    const int N = static_cast<int>(x.size());
    std::array<int, 2> band{0, 0};
    for (auto& b : bases) {
        std::array<std::int64_t, 2> mn{INT64_MAX, INT64_MAX}, mx{INT64_MIN, INT64_MIN};
        for (auto& p : b.points)
            for (int t = 0; t < n; ++t) {
                mn[t] = std::min(mn[t], p[t]);
                mx[t] = std::max(mx[t], p[t]);
            }
        for (int t = 0; t < n; ++t) band[t] += static_cast<int>(mx[t] - mn[t]);
    }
    std::array<int, 2> M{1, 1};
    for (int t = 0; t < n; ++t) M[t] = mult * (band[t] + 2);
    // axes: N points x n angle coordinates
    int axes = N * n;
    std::vector<int> radix(axes);
    for (int i = 0; i < N; ++i)
        for (int t = 0; t < n; ++t) radix[i * n + t] = M[t];
    double cells = 1;
    for (int r : radix) cells *= r;
    if (cells > 5e7) throw BudgetError("fiber_integral_check: quadrature budget exceeded");

    std::vector<int> idx(axes, 0);
    Configuration cfg;
    cfg.n = n;
    cfg.pts.resize(N);
    for (int i = 0; i < N; ++i) cfg.pts[i].x = x[i];
    double total = 0;
    bool done = false;
    while (!done) {
        for (int i = 0; i < N; ++i)
            for (int t = 0; t < n; ++t)
                cfg.pts[i].y[t] = kTwoPi * idx[i * n + t] / radix[i * n + t];
        double val = 1;
        for (auto& b : bases) {
            std::vector<cplx> Mx(static_cast<size_t>(b.N) * b.N);
            for (int i = 0; i < b.N; ++i)
                for (int l = 0; l < b.N; ++l) {
                    const auto& p = b.points[l];
                    double re = cfg.pts[i].x[0] * p[0] + (n > 1 ? cfg.pts[i].x[1] * p[1] : 0.0);
                    double im = cfg.pts[i].y[0] * p[0] + (n > 1 ? cfg.pts[i].y[1] * p[1] : 0.0);
                    Mx[static_cast<size_t>(i) * b.N + l] = std::exp(cplx(re, im));
                }
            auto lu = ComplexLU::factor(std::move(Mx), b.N);
            if (lu.singular) { val = 0; break; }
            val *= std::exp(2.0 * lu.log_abs_det);
        }
        total += val;
        done = true;
        for (int t = axes - 1; t >= 0; --t) {
            if (++idx[t] < radix[t]) { done = false; break; }
            idx[t] = 0;
        }
    }
    double measure = 1;
    for (int t = 0; t < axes; ++t) measure *= kTwoPi / radix[t];
    return total * measure;
}

}  // namespace

FiberReport fiber_integral_check(const std::vector<Vec>& x, const std::vector<LatticeBasis>& bases) {
    const int n = bases[0].base.n;
    const int N = static_cast<int>(x.size());
    if (N * n > 4) throw BudgetError("fiber_integral_check: quadrature dimension capped at N*n <= 4");
    for (auto& b : bases)
        if (b.N > N) throw Error("fiber_integral_check: x must have max_j N_j points");
    auto table = expansion(bases, N);
    double rhs = 0;
    for (auto& e : table.entries) {
        if (e.signed_sum == 0) continue;
        double ex = 0;
        for (int i = 0; i < N; ++i)
            for (int t = 0; t < n; ++t) ex += x[i][t] * e.a[static_cast<size_t>(i) * n + t];
        rhs += static_cast<double>(e.C()) * std::exp(2.0 * ex);
    }
    rhs *= std::pow(kTwoPi, n * N);
    FiberReport rep;
    rep.lhs = fiber_quadrature(x, bases, 1);
    double lhs2 = fiber_quadrature(x, bases, 2);
    rep.rhs = rhs;
    double scale = std::max({std::fabs(rhs), std::fabs(rep.lhs), 1e-300});
    rep.rel_err = std::fabs(rep.lhs - rhs) / scale;
    rep.quad_drift = std::fabs(rep.lhs - lhs2) / scale;
    if (rep.quad_drift > 1e-8)
        throw Error("fiber_integral_check: quadrature did not converge (drift " +
                    std::to_string(rep.quad_drift) + ")");
    return rep;
}

MinaReport mina_check(const std::vector<Vec>& x, const std::vector<LatticeBasis>& bases, int k) {
    const int n = bases[0].base.n;
    const int N = static_cast<int>(x.size());
    for (auto& b : bases)
        if (b.N > N) throw Error("mina_check: x must have max_j N_j points");
    auto table = expansion(bases, N);
    double lhs = std::numeric_limits<double>::infinity();
    for (auto& e : table.entries) {
        double s = 0;
        for (int i = 0; i < N; ++i)
            for (int t = 0; t < n; ++t) s += x[i][t] * e.a[static_cast<size_t>(i) * n + t];
        lhs = std::min(lhs, -s);
    }
    double rhs = 0;
    for (auto& b : bases) {
        std::vector<Vec> xs(x.begin(), x.begin() + b.N);
        std::vector<Vec> ps;
        for (auto& p : b.points)
            ps.push_back({static_cast<double>(p[0]) / k, n > 1 ? static_cast<double>(p[1]) / k : 0.0});
        rhs += static_cast<double>(k) * b.N * assignment(xs, ps, n).cost;
    }
    MinaReport rep;
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.diff = std::fabs(lhs - rhs);
    return rep;
}

ReferenceFamily reference_from_string(const std::string& s) {
    if (s == "gaussian") return ReferenceFamily::Gaussian;
    if (s == "logistic") return ReferenceFamily::Logistic;
    throw ConfigError("unknown reference family: " + s + " (expected gaussian|logistic)");
}

std::string reference_name(ReferenceFamily f) {
    return f == ReferenceFamily::Gaussian ? "gaussian" : "logistic";
}

namespace {

double sample_reference(ReferenceFamily f, RandomStream& rng) {
    return f == ReferenceFamily::Gaussian ? rng.gaussian() : rng.logistic();
}

double reference_log_density(ReferenceFamily f, double x) {
    if (f == ReferenceFamily::Gaussian)
        return -0.5 * x * x - 0.9189385332046727;  // log(1/sqrt(2pi))
    // logistic(0,1/2): 2 e^{2x} / (1+e^{2x})^2
    double t = -std::fabs(2.0 * x);
    return std::log(2.0) + t - 2.0 * std::log1p(std::exp(t));
}

// log of sum_a C_a e^{2 sum <x_i,a_i>} for one sample
double log_fiber_sum(const ExpansionTable& table, const std::vector<Vec>& x) {
    std::vector<double> logs;
    logs.reserve(table.entries.size());
    const int n = table.n;
    for (auto& e : table.entries) {
        if (e.signed_sum == 0) continue;
        double ex = 0;
        for (int i = 0; i < table.N; ++i)
            for (int t = 0; t < n; ++t) ex += x[i][t] * e.a[static_cast<size_t>(i) * n + t];
        logs.push_back(std::log(static_cast<double>(e.C())) + 2.0 * ex);
    }
    return log_sum_exp(logs);
}

double onb_correction_term(const std::vector<BundleSpec>& bundles, int k, ReferenceFamily ref, int N) {
    if (bundles[0].polytope().n != 1) return 0.0;
    double total = 0;
    const double B = 30.0;
    const int Q = 16384;
    for (auto& b : bundles) {
        const auto& basis = b.basis(k);
        for (auto& p : basis.points) {
            double s = 0;
            for (int i = 0; i <= Q; ++i) {
                double xx = -B + 2.0 * B * i / Q;
                double lg = 2.0 * p[0] * xx -
                            2.0 * basis.d * basis.base.support({xx, 0}) +
                            reference_log_density(ref, xx);
                double w = (i == 0 || i == Q) ? 0.5 : 1.0;
                s += w * std::exp(lg);
            }
            s *= 2.0 * B / Q;
            total += std::log(s);
        }
    }
    return total / (static_cast<double>(k) * N);
}

}  // namespace

LkReport lk_estimate(const std::vector<BundleSpec>& bundles, int k, ReferenceFamily reference,
                     std::uint64_t samples, std::uint64_t seed, int workers) {
    if (bundles.empty()) throw Error("lk_estimate: no bundles");
    for (auto& b : bundles)
        if (!(b.scale() == Rat(1)))
            throw Error("lk_estimate: bundles must be volume-normalized (c_j = 1); polytope volume " +
                        b.polytope().volume().str());
    const int n = bundles[0].polytope().n;
    const size_t m = bundles.size();
    std::vector<const LatticeBasis*> bases;
    int N = 0;
    for (auto& b : bundles) {
        bases.push_back(&b.basis(k));
        N = std::max(N, bases.back()->N);
    }
    ExpansionTable table;
    if (m >= 2) {
        std::vector<LatticeBasis> bs;
        for (auto* b : bases) bs.push_back(*b);
        table = expansion(bs, N);
    } else if (N > 24) {
        throw BudgetError("lk_estimate: m=1 permanent budget is N <= 24");
    }

    const int batches = 16;
    std::uint64_t per_batch = (samples + batches - 1) / batches;
    RandomStream master(seed);

    auto sample_logG = [&](RandomStream& rng) {
        std::vector<Vec> x(N, Vec{0, 0});
        for (int i = 0; i < N; ++i)
            for (int t = 0; t < n; ++t) x[i][t] = sample_reference(reference, rng);
        double logdet_part;
        if (m == 1) {
            std::vector<std::vector<double>> logE(N, std::vector<double>(N));
            for (int i = 0; i < N; ++i)
                for (int l = 0; l < N; ++l) {
                    const auto& p = bases[0]->points[l];
                    logE[i][l] = 2.0 * (x[i][0] * p[0] + (n > 1 ? x[i][1] * p[1] : 0.0));
                }
            logdet_part = log_permanent(logE);
        } else {
            logdet_part = log_fiber_sum(table, x);
        }
        double logW = 0;
        for (size_t j = 0; j < m; ++j)
            for (int i = 0; i < bases[j]->N; ++i)
                logW -= 2.0 * k * bundles[j].weight().value(x[i]);
        return logdet_part + logW;
    };

    std::vector<std::vector<double>> batch_logs(batches);
    for (int b = 0; b < batches; ++b) {
        RandomStream rng = master.derive(b);
        batch_logs[b].reserve(per_batch);
        for (std::uint64_t s = 0; s < per_batch; ++s) batch_logs[b].push_back(sample_logG(rng));
    }
    (void)workers;

    std::vector<double> all;
    std::vector<double> batch_est;
    for (auto& bl : batch_logs) {
        double lm = log_sum_exp(bl);
        if (lm == kNegInf) throw Error("lk_estimate: zero effective sample size in a batch");
        batch_est.push_back(-(lm - std::log(double(bl.size()))) / (double(k) * N));
        all.insert(all.end(), bl.begin(), bl.end());
    }
    double lall = log_sum_exp(all);
    LkReport rep;
    rep.value = -(lall - std::log(double(all.size()))) / (double(k) * N);
    double mean = 0;
    for (double e : batch_est) mean += e;
    mean /= batches;
    double var = 0;
    for (double e : batch_est) var += (e - mean) * (e - mean);
    var /= (batches - 1);
    rep.stderr_ = std::sqrt(var / batches);
    rep.k = k;
    rep.N = N;
    rep.samples = per_batch * batches;
    rep.seed = seed;
    rep.reference = reference_name(reference);
    rep.onb_correction = onb_correction_term(bundles, k, reference, N);
    return rep;
}

LowerBoundReport lower_bound_report(const std::vector<BundleSpec>& bundles, int k,
                                    const std::vector<Vec>& xs, double lk_value) {
    const int n = bundles[0].polytope().n;
    LowerBoundReport rep;
    rep.lk = lk_value;
    int N = 0;
    for (auto& b : bundles) N = std::max(N, b.basis(k).N);
    if (static_cast<int>(xs.size()) < N) throw Error("lower_bound_report: need N points");
    double rhs = 0;
    for (auto& b : bundles) {
        const auto& basis = b.basis(k);
        std::vector<Vec> x(xs.begin(), xs.begin() + basis.N);
        std::vector<Vec> ps;
        for (auto& p : basis.points)
            ps.push_back({static_cast<double>(p[0]) / k, n > 1 ? static_cast<double>(p[1]) / k : 0.0});
        double c = assignment(x, ps, n).cost;
        rep.costs.push_back(c);
        rhs += 2.0 * (static_cast<double>(basis.N) / N) * c;
    }
    double wsum = 0;
    for (int i = 0; i < N; ++i)
        for (auto& b : bundles) wsum += b.weight().value(xs[i]);
    rep.weight_term = 2.0 * wsum / N;
    rep.rhs = rhs + rep.weight_term;
    rep.slack = rep.rhs - rep.lk;
    return rep;
}

L2SupGapReport l2_sup_gap(const std::vector<BundleSpec>& bundles, int k, const Configuration& config,
                          std::uint64_t samples, std::uint64_t seed, int restarts, int workers) {
    L2SupGapReport rep;
    rep.lk = lk_estimate(bundles, k, ReferenceFamily::Logistic, samples, seed, workers);
    MaximizeOptions opts;
    opts.extra_start = config;
    FeketeRun run = maximize_product(bundles, k, restarts, seed, opts);
    rep.best_objective = run.objective();
    rep.gap = rep.lk.value + rep.best_objective;
    return rep;
}

}  // namespace torfek
