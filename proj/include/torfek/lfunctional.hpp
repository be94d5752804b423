#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "torfek/polytope.hpp"
#include "torfek/vandermonde.hpp"

namespace torfek {

// Determinant expansion collected by the fiber-integrated exponent vector a:
// S_a = permutation tuples with sum_j p^j_{sigma_j(i)} = a_i (p=0 padding for
// i > N_j), C_a = (signed sum over S_a)^2.
struct ExpansionTable {
    int n = 1;
    int N = 0;
    struct Entry {
        std::vector<std::int32_t> a;  // N*n components, point-major
        std::int64_t signed_sum = 0;
        std::uint64_t count = 0;  // |S_a|
        std::int64_t C() const { return signed_sum * signed_sum; }
    };
    std::vector<Entry> entries;       // lexicographically sorted by a
    std::uint64_t total_tuples = 0;   // prod_j N_j!
};

// Budget: prod_j N_j! <= 1e7 (errors naming the bound).
ExpansionTable expansion(const std::vector<LatticeBasis>& bases, int N);

// Compares quadrature of ∫ prod_j |det_j(x+iy)|^2 dy over ([0,2pi]^n)^N with
// (2pi)^{nN} sum_a C_a e^{2 sum <x_i,a_i>} (weights factored out identically).
struct FiberReport {
    double lhs = 0, rhs = 0;
    double rel_err = 0;
    double quad_drift = 0;  // relative change when doubling the rule
};
FiberReport fiber_integral_check(const std::vector<Vec>& x, const std::vector<LatticeBasis>& bases);

// min over nonempty S_a of -sum <x_i,a_i>  ==  sum_j k N_j C(delta(x), delta(p^j/k))
struct MinaReport {
    double lhs = 0, rhs = 0;
    double diff = 0;
};
MinaReport mina_check(const std::vector<Vec>& x, const std::vector<LatticeBasis>& bases, int k);

enum class ReferenceFamily { Gaussian, Logistic };
ReferenceFamily reference_from_string(const std::string& s);
std::string reference_name(ReferenceFamily f);

// Monte-Carlo estimate of the L-functional at level k: exact y-integration
// (permanent for m=1, expansion table for m>=2), then importance sampling over
// x ~ reference^{⊗N}. Deterministic given (seed, samples).
struct LkReport {
    double value = 0;
    double stderr_ = 0;
    int k = 0;
    int N = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::string reference;
    double onb_correction = 0;  // o_k(1) orthonormalization term (n=1), <= 0
};
LkReport lk_estimate(const std::vector<BundleSpec>& bundles, int k, ReferenceFamily reference,
                     std::uint64_t samples, std::uint64_t seed, int workers = 1);

// Upper-bound check of the L-functional by discrete transport costs at a point
// configuration x (slack -> o_k(1)).
struct LowerBoundReport {
    double lk = 0;
    double rhs = 0;
    double slack = 0;  // rhs - lk
    std::vector<double> costs;
    double weight_term = 0;
};
LowerBoundReport lower_bound_report(const std::vector<BundleSpec>& bundles, int k,
                                    const std::vector<Vec>& xs, double lk_value);

// Gap between the L_k estimate (mean) and the best product objective (max).
struct L2SupGapReport {
    LkReport lk;
    double best_objective = 0;
    double gap = 0;  // lk value + best objective, >= 0 up to MC error
};
L2SupGapReport l2_sup_gap(const std::vector<BundleSpec>& bundles, int k, const Configuration& config,
                          std::uint64_t samples, std::uint64_t seed, int restarts = 4,
                          int workers = 1);

}  // namespace torfek
