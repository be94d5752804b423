#pragma once
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "torfek/convexity.hpp"
#include "torfek/measure.hpp"
#include "torfek/vandermonde.hpp"

namespace torfek {

struct FeketeRun {
    int k = 0;
    Configuration best;
    std::vector<double> trace;  // accepted objective values, nondecreasing
    std::vector<double> deficits;
    double w1_to_target = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    double wall_ms = 0;

    double objective() const {
        return trace.empty() ? -std::numeric_limits<double>::infinity() : trace.back();
    }
};

struct MaximizeOptions {
    Vec box_lo{-8, -8};
    Vec box_hi{8, 8};
    int iterations = 500;
    int polish_rounds = 2;
    std::optional<Configuration> extra_start;
    std::optional<DiscreteMeasure> init_measure;  // x starts sampled from here
    int workers = 1;
};

// Multistart normalized-gradient ascent on the Vandermonde product objective.
// Deterministic given seed; reduction picks the max objective (lexicographic
// configuration on ties), independent of worker count.
FeketeRun maximize_product(const std::vector<BundleSpec>& bundles, int k, int restarts,
                           std::uint64_t seed, const MaximizeOptions& opts = {});

struct DeficitParams {
    Vec box_lo{-8, -8};
    Vec box_hi{8, 8};
    int res_x = 512;
    int res_p = 513;
};

// deficit_j = -(1/kN̂) log |D̂_j(P)|^2_psi - 2 E^eq(psi); +inf when the
// determinant is singular at the configuration. psi is the potential of the
// volume-normalized bundle as a grid function.
double asymptotic_deficit(const FeketeRun& run, const BundleSpec& bundle, const GridFunction& psi,
                          const DeficitParams& params = {});

struct EquidistributionReport {
    std::vector<int> ks;
    std::vector<double> w1;
    bool decreasing = false;
    double final_w1 = 0;
};
EquidistributionReport equidistribution_report(const std::vector<FeketeRun>& runs,
                                               const DiscreteMeasure& target);

struct CertifyReport {
    bool verdict = false;
    std::vector<int> ks;
    std::vector<FeketeRun> runs;
    std::vector<std::vector<double>> deficits;  // [k index][bundle]
    std::vector<double> w1;                     // per k
    double tol = 0.1;
    DiscreteMeasure target;
    bool deficits_decreasing = false;
    double max_final_deficit = 0;
};

// Runs maximize_product per k; verdict: every per-bundle |deficit| sequence is
// nonincreasing with final value <= tol. |deficit| because small-k deficits sit
// below zero and rise to it.
CertifyReport mutual_fekete_certify(const std::vector<BundleSpec>& bundles,
                                    const std::vector<GridFunction>& potentials,
                                    const std::vector<int>& ks, double tol, int restarts,
                                    std::uint64_t seed, const MaximizeOptions& opts = {},
                                    const DeficitParams& dparams = {});

}  // namespace torfek
