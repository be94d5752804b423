#include "torfek/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torfek/errors.hpp"

namespace torfek {

ComplexLU ComplexLU::factor(std::vector<cplx> a, int n) {
    ComplexLU f;
    f.n = n;
    f.piv.resize(n);
    double logdet = 0;
    for (int col = 0; col < n; ++col) {
        int pr = col;
        double best = std::abs(a[static_cast<size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double m = std::abs(a[static_cast<size_t>(r) * n + col]);
            if (m > best) { best = m; pr = r; }
        }
        f.piv[col] = pr;
        if (best == 0.0 || !std::isfinite(best)) {
            f.singular = true;
            f.log_abs_det = -std::numeric_limits<double>::infinity();
            f.lu = std::move(a);
            return f;
        }
        if (pr != col)
            for (int j = 0; j < n; ++j) std::swap(a[static_cast<size_t>(pr) * n + j], a[static_cast<size_t>(col) * n + j]);
        cplx pivot = a[static_cast<size_t>(col) * n + col];
        logdet += std::log(std::abs(pivot));
        for (int r = col + 1; r < n; ++r) {
            cplx m = a[static_cast<size_t>(r) * n + col] / pivot;
            a[static_cast<size_t>(r) * n + col] = m;
            for (int j = col + 1; j < n; ++j)
                a[static_cast<size_t>(r) * n + j] -= m * a[static_cast<size_t>(col) * n + j];
        }
    }
    f.log_abs_det = logdet;
    f.lu = std::move(a);
    if (!std::isfinite(logdet)) {
        f.singular = true;
        f.log_abs_det = -std::numeric_limits<double>::infinity();
    }
    return f;
}

std::vector<cplx> ComplexLU::inverse() const {
    if (singular) throw Error("linalg: inverse of singular matrix");
    std::vector<cplx> inv(static_cast<size_t>(n) * n, cplx(0, 0));
    for (int col = 0; col < n; ++col) {
        std::vector<cplx> e(n, cplx(0, 0));
        e[col] = 1;
        for (int i = 0; i < n; ++i)
            if (piv[i] != i) std::swap(e[i], e[piv[i]]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) e[i] -= lu[static_cast<size_t>(i) * n + j] * e[j];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) e[i] -= lu[static_cast<size_t>(i) * n + j] * e[j];
            e[i] /= lu[static_cast<size_t>(i) * n + i];
        }
        for (int i = 0; i < n; ++i) inv[static_cast<size_t>(i) * n + col] = e[i];
    }
    return inv;
}

double log_permanent(const std::vector<std::vector<double>>& logE) {
    int n = static_cast<int>(logE.size());
    if (n == 0) return 0.0;
    if (n > 24) throw BudgetError("log_permanent: Ryser budget is n <= 24");
    std::vector<double> rowmax(n, -std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rowmax[i] = std::max(rowmax[i], logE[i][j]);
    double offset = 0;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(rowmax[i])) return -std::numeric_limits<double>::infinity();
        offset += rowmax[i];
    }
    // scaled entries in [0,1]; per <= n! fits double for n <= 24
    std::vector<double> e(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) e[static_cast<size_t>(i) * n + j] = std::exp(logE[i][j] - rowmax[i]);

    // Ryser with Gray code over column subsets: per = (-1)^n sum_S (-1)^{|S|} prod_i sum_{j in S} e_ij
    std::vector<double> sums(n, 0.0);
    double total = 0;
    std::uint64_t gray = 0;
    std::uint64_t limit = 1ull << n;
    int popcount = 0;
    for (std::uint64_t t = 1; t < limit; ++t) {
        std::uint64_t next = t ^ (t >> 1);
        std::uint64_t diff = gray ^ next;
        int j = 0;
        while (!((diff >> j) & 1)) ++j;
        bool added = (next >> j) & 1;
        for (int i = 0; i < n; ++i)
            sums[i] += (added ? 1.0 : -1.0) * e[static_cast<size_t>(i) * n + j];
        popcount += added ? 1 : -1;
        gray = next;
        double prod = 1;
        for (int i = 0; i < n; ++i) prod *= sums[i];
        total += ((n - popcount) % 2 == 0 ? 1.0 : -1.0) * prod;
    }
    if (total <= 0) return -std::numeric_limits<double>::infinity();
    return offset + std::log(total);
}

}  // namespace torfek
