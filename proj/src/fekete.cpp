#include "torfek/fekete.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

#include "torfek/errors.hpp"
#include "torfek/rng.hpp"
#include "torfek/transport.hpp"

namespace torfek {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925287;

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> threads;
    int nw = std::min(workers, count);
    for (int w = 0; w < nw; ++w)
        threads.emplace_back([&] {
            int i;
            while ((i = next.fetch_add(1)) < count) body(i);
        });
    for (auto& t : threads) t.join();
}

bool config_lex_less(const Configuration& a, const Configuration& b) {
    for (size_t i = 0; i < a.pts.size(); ++i) {
        for (int t = 0; t < 2; ++t) {
            if (a.pts[i].x[t] != b.pts[i].x[t]) return a.pts[i].x[t] < b.pts[i].x[t];
            if (a.pts[i].y[t] != b.pts[i].y[t]) return a.pts[i].y[t] < b.pts[i].y[t];
        }
    }
    return false;
}

struct AscentResult {
    Configuration config;
    std::vector<double> trace;
};

AscentResult ascend(Configuration config, const std::vector<BundleSpec>& bundles, int k,
                    const MaximizeOptions& opts) {
    const int n = config.n;
    double f = product_objective(config, bundles, k);
    AscentResult out;
    if (f == kNegInf) {
        out.config = config;
        return out;
    }
    out.trace.push_back(f);
    double eta = 0.1;
    for (int it = 0; it < opts.iterations && eta > 1e-13; ++it) {
        auto g = grad_product_objective(config, bundles, k);
        double norm = 0;
        for (auto& pg : g)
            for (int t = 0; t < n; ++t) norm += pg.dx[t] * pg.dx[t] + pg.dy[t] * pg.dy[t];
        norm = std::sqrt(norm);
        if (norm < 1e-12) break;
        bool accepted = false;
        for (int h = 0; h < 30 && !accepted; ++h) {
            Configuration trial = config;
            double step = eta / norm;
            for (size_t i = 0; i < trial.pts.size(); ++i)
                for (int t = 0; t < n; ++t) {
                    trial.pts[i].x[t] =
                        std::clamp(trial.pts[i].x[t] + step * g[i].dx[t], opts.box_lo[t], opts.box_hi[t]);
                    trial.pts[i].y[t] += step * g[i].dy[t];
                }
            trial.wrap_angles();
            double ftrial = product_objective(trial, bundles, k);
            if (ftrial > f) {
                config = std::move(trial);
                f = ftrial;
                out.trace.push_back(f);
                eta = std::min(eta * 1.3, 1.0);
                accepted = true;
            } else {
                eta *= 0.5;
            }
        }
        if (!accepted) break;
    }
    out.config = config;
    return out;
}

// cyclic coordinate refinement; robust at support-function kinks where the
// gradient chatters
AscentResult polish(Configuration config, const std::vector<BundleSpec>& bundles, int k,
                    const MaximizeOptions& opts, std::vector<double> trace) {
    const int n = config.n;
    double f = product_objective(config, bundles, k);
    double delta = 0.05;
    for (int round = 0; round < opts.polish_rounds; ++round) {
        for (size_t i = 0; i < config.pts.size(); ++i)
            for (int axis = 0; axis < 2 * n; ++axis) {
                int t = axis % n;
                bool is_y = axis >= n;
                for (int probe = 0; probe < 14; ++probe) {
                    double step = delta / (1 << probe);
                    bool moved = false;
                    for (double dir : {+1.0, -1.0}) {
                        Configuration trial = config;
                        double& coord = is_y ? trial.pts[i].y[t] : trial.pts[i].x[t];
                        coord += dir * step;
                        if (!is_y) coord = std::clamp(coord, opts.box_lo[t], opts.box_hi[t]);
                        trial.wrap_angles();
                        double ftrial = product_objective(trial, bundles, k);
                        if (ftrial > f) {
                            config = std::move(trial);
                            f = ftrial;
                            trace.push_back(f);
                            moved = true;
                            break;
                        }
                    }
                    if (moved) break;
                }
            }
        delta *= 0.25;
    }
    return {config, std::move(trace)};
}

}  // namespace

FeketeRun maximize_product(const std::vector<BundleSpec>& bundles, int k, int restarts,
                           std::uint64_t seed, const MaximizeOptions& opts) {
    if (bundles.empty()) throw Error("maximize_product: no bundles");
    if (restarts < 1) throw Error("maximize_product: restarts must be >= 1");
    auto t0 = std::chrono::steady_clock::now();
    const int n = bundles[0].polytope().n;
    const int nhat = product_num_points(bundles, k);
    RandomStream master(seed);

    DiscreteMeasure init;
    if (opts.init_measure) {
        init = *opts.init_measure;
    } else {
        // sample starts from the first bundle's equilibrium measure
        init = equilibrium_measure(bundles[0].weight_norm(), bundles[0].polytope_norm(), 256,
                                   opts.box_lo, opts.box_hi, 256);
    }
    std::vector<double> cdf;
    double acc = 0;
    for (auto& a : init.atoms) cdf.push_back(acc += a.w);

    int total_starts = restarts + (opts.extra_start ? 1 : 0);
    std::vector<AscentResult> results(total_starts);
    parallel_for(total_starts, opts.workers, [&](int r) {
        Configuration start;
        start.n = n;
        if (opts.extra_start && r == restarts) {
            start = *opts.extra_start;
            if (static_cast<int>(start.pts.size()) < nhat)
                start.pts.resize(nhat);
        } else {
            RandomStream rng = master.derive(static_cast<std::uint64_t>(r));
            for (int attempt = 0; attempt < 50; ++attempt) {
                start.pts.assign(nhat, {});
                for (int i = 0; i < nhat; ++i) {
                    double u = rng.uniform();
                    size_t idx = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
                    idx = std::min(idx, init.atoms.size() - 1);
                    for (int t = 0; t < n; ++t) {
                        start.pts[i].x[t] = std::clamp(
                            init.atoms[idx].p[t] + 0.05 * (rng.uniform() - 0.5), opts.box_lo[t],
                            opts.box_hi[t]);
                        start.pts[i].y[t] = rng.uniform(0, kTwoPi);
                    }
                }
                if (product_objective(start, bundles, k) != kNegInf) break;
            }
        }
        start.wrap_angles();
        results[r] = ascend(std::move(start), bundles, k, opts);
    });

    int best = -1;
    for (int r = 0; r < total_starts; ++r) {
        if (results[r].trace.empty()) continue;
        if (best < 0) { best = r; continue; }
        double fr = results[r].trace.back(), fb = results[best].trace.back();
        if (fr > fb || (fr == fb && config_lex_less(results[r].config, results[best].config)))
            best = r;
    }
    if (best < 0) throw Error("maximize_product: all starts collapsed to the singular set");

    AscentResult refined =
        polish(results[best].config, bundles, k, opts, std::move(results[best].trace));

    FeketeRun run;
    run.k = k;
    run.best = refined.config;
    run.trace = std::move(refined.trace);
    run.seed = seed;
    run.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

double asymptotic_deficit(const FeketeRun& run, const BundleSpec& bundle, const GridFunction& psi,
                          const DeficitParams& params) {
    const int nhat = static_cast<int>(run.best.pts.size());
    ToricWeight w = ToricWeight::gridinterp(bundle.polytope_norm(), psi);
    double lv = log_vd(run.best, bundle.basis(run.k), w, run.k);
    if (lv == kNegInf) return std::numeric_limits<double>::infinity();
    double energy = equilibrium_energy(w, bundle.polytope_norm(), params.res_p, params.box_lo,
                                       params.box_hi, params.res_x);
    return -lv / (static_cast<double>(run.k) * nhat) - 2.0 * energy;
}

EquidistributionReport equidistribution_report(const std::vector<FeketeRun>& runs,
                                               const DiscreteMeasure& target) {
    EquidistributionReport rep;
    for (auto& run : runs) {
        std::vector<Vec> xs;
        for (auto& pt : run.best.pts) xs.push_back(pt.x);
        DiscreteMeasure emp = uniform_atoms(target.n, xs);
        rep.ks.push_back(run.k);
        rep.w1.push_back(wasserstein1(emp, target));
    }
    rep.decreasing = true;
    for (size_t i = 1; i < rep.w1.size(); ++i)
        if (rep.w1[i] > rep.w1[i - 1] + 1e-12) rep.decreasing = false;
    rep.final_w1 = rep.w1.empty() ? 0 : rep.w1.back();
    return rep;
}

CertifyReport mutual_fekete_certify(const std::vector<BundleSpec>& bundles,
                                    const std::vector<GridFunction>& potentials,
                                    const std::vector<int>& ks, double tol, int restarts,
                                    std::uint64_t seed, const MaximizeOptions& opts,
                                    const DeficitParams& dparams) {
    if (potentials.size() != bundles.size())
        throw Error("mutual_fekete_certify: one potential per bundle required");
    if (ks.empty()) throw Error("mutual_fekete_certify: empty k schedule");
    CertifyReport rep;
    rep.tol = tol;
    rep.ks = ks;
    ToricWeight w0 = ToricWeight::gridinterp(bundles[0].polytope_norm(), potentials[0]);
    rep.target = equilibrium_measure(w0, bundles[0].polytope_norm(), 512, dparams.box_lo,
                                     dparams.box_hi, dparams.res_x);

    MaximizeOptions mo = opts;
    mo.init_measure = rep.target;
    for (size_t t = 0; t < ks.size(); ++t) {
        FeketeRun run = maximize_product(bundles, ks[t], restarts, seed + t, mo);
        std::vector<double> defs;
        for (size_t j = 0; j < bundles.size(); ++j)
            defs.push_back(asymptotic_deficit(run, bundles[j], potentials[j], dparams));
        run.deficits = defs;
        std::vector<Vec> xs;
        for (auto& pt : run.best.pts) xs.push_back(pt.x);
        run.w1_to_target = wasserstein1(uniform_atoms(rep.target.n, xs), rep.target);
        rep.w1.push_back(run.w1_to_target);
        rep.deficits.push_back(defs);
        rep.runs.push_back(std::move(run));
    }

    rep.deficits_decreasing = true;
    rep.max_final_deficit = 0;
    for (size_t j = 0; j < bundles.size(); ++j) {
        for (size_t t = 1; t < ks.size(); ++t)
            if (std::fabs(rep.deficits[t][j]) > std::fabs(rep.deficits[t - 1][j]) + 1e-9)
                rep.deficits_decreasing = false;
        rep.max_final_deficit =
            std::max(rep.max_final_deficit, std::fabs(rep.deficits.back()[j]));
    }
    rep.verdict = rep.deficits_decreasing && rep.max_final_deficit <= tol;
    return rep;
}

}  // namespace torfek
