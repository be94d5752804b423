#pragma once
#include <complex>
#include <vector>

namespace torfek {

using cplx = std::complex<double>;

// Dense complex LU with partial pivoting. log|det| accumulates from pivot
// magnitudes so scaled Vandermonde factors never overflow.
struct ComplexLU {
    int n = 0;
    std::vector<cplx> lu;       // row-major factors
    std::vector<int> piv;
    double log_abs_det = 0;     // -inf when numerically singular
    bool singular = false;

    static ComplexLU factor(std::vector<cplx> a, int n);
    std::vector<cplx> inverse() const;  // throws on singular
};

// log of the permanent of the nonnegative matrix exp(logE[i][j]); row maxima
// are factored out so entries stay in [0,1]. Returns -inf for a zero permanent.
double log_permanent(const std::vector<std::vector<double>>& logE);

}  // namespace torfek
