#pragma once
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "torfek/polytope.hpp"
#include "torfek/weight.hpp"

namespace torfek {

// N points in log-torus coordinates (x_i, y_i) in R^n x [0,2pi)^n.
struct Configuration {
    int n = 1;
    struct Point {
        Vec x{0, 0};
        Vec y{0, 0};
    };
    std::vector<Point> pts;

    void wrap_angles();
    void validate() const;
    std::string to_csv() const;
    static Configuration from_csv(const std::string& text);
};

// A Hermitian toric bundle: integral polytope P, weight phi, volume scale c,
// plus the derived volume-normalized pair and a per-level basis cache.
class BundleSpec {
  public:
    static BundleSpec make(const LatticePolytope& P, const ToricWeight& weight);

    const LatticePolytope& polytope() const { return P_; }
    const ToricWeight& weight() const { return weight_; }
    Rat scale() const { return c_; }
    const LatticePolytope& polytope_norm() const { return P_norm_; }
    const ToricWeight& weight_norm() const { return weight_norm_; }

    // basis of the normalized bundle at level k: floor(k/c) P ∩ Z^n
    const LatticeBasis& basis(int k) const;

    // override the scale (argmax-invariance tests); keeps the same basis
    void set_scale_factor(double f) { scale_factor_ = f; }
    double scale_double() const { return c_.to_double() * scale_factor_; }

  private:
    LatticePolytope P_;
    ToricWeight weight_ = ToricWeight::support(LatticePolytope::interval(Rat(0), Rat(1)));
    Rat c_{1};
    double scale_factor_ = 1.0;
    LatticePolytope P_norm_;
    ToricWeight weight_norm_ = weight_;
    mutable std::map<int, LatticeBasis> cache_;
    mutable std::shared_ptr<std::mutex> mtx_ = std::make_shared<std::mutex>();
};

// log |D|^2_phi = 2 (sum_i r_i + log|det M|) - 2k sum_i phi(x_i), with
// M_il = exp(<x_i + i y_i, p_l> - r_i) and default row scaling r_i = d h_P(x_i).
// Returns -inf for numerically singular M (collision escape contract).
double log_vd(const Configuration& config, const LatticeBasis& B, const ToricWeight& phi, int k,
              const std::optional<std::vector<double>>& row_scalings = std::nullopt);

struct PointGrad {
    Vec dx{0, 0};
    Vec dy{0, 0};
};
std::vector<PointGrad> grad_log_vd(const Configuration& config, const LatticeBasis& B,
                                   const ToricWeight& phi, int k);

// (1/(k N̂)) sum_j c_j log |D̂_j|^2 ; -inf if any factor is singular.
double product_objective(const Configuration& config, const std::vector<BundleSpec>& bundles, int k);
std::vector<PointGrad> grad_product_objective(const Configuration& config,
                                              const std::vector<BundleSpec>& bundles, int k);
int product_num_points(const std::vector<BundleSpec>& bundles, int k);  // N̂

}  // namespace torfek
