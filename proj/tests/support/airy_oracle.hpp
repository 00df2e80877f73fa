#pragma once

// Zeros of Ai' from the Maclaurin series and bisection. Independent of the
// library's discretizations; used only as a test oracle.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

inline constexpr long double kAiryC1 = 0.355028053887817239260L;   // Ai(0)
inline constexpr long double kAiryC2 = 0.258819403792806798405L;   // -Ai'(0)

/// Ai'(x) = c1 f'(x) - c2 g'(x) with f, g the two Maclaurin solutions of y'' = x y.
inline long double airy_ai_prime(long double x) {
    const long double x3 = x * x * x;
    long double a = 1.0L;   // coefficient of x^{3k} in f
    long double b = 1.0L;   // coefficient of x^{3k+1} in g
    long double xp = 1.0L;  // x^{3k}
    long double fp = 0.0L;
    long double gp = 1.0L;
    for (int k = 1; k < 200; ++k) {
        a /= static_cast<long double>((3 * k - 1) * (3 * k));
        b /= static_cast<long double>((3 * k) * (3 * k + 1));
        const long double x_prev = xp;   // x^{3k-3}
        xp *= x3;
        const long double tf = 3.0L * k * a * x_prev * x * x;   // 3k a_k x^{3k-1}
        const long double tg = (3.0L * k + 1.0L) * b * xp;     // (3k+1) b_k x^{3k}
        fp += tf;
        gp += tg;
        if (std::fabs(tf) + std::fabs(tg) < 1e-22L * (std::fabs(fp) + std::fabs(gp)) && k > 5) break;
    }
    return kAiryC1 * fp - kAiryC2 * gp;
}

/// First `count` zeros a'_k < 0 of Ai', in decreasing order.
inline std::vector<double> airy_prime_zeros(int count) {
    std::vector<double> zeros;
    const long double step = 0.01L;
    long double hi = 0.0L;
    long double f_hi = airy_ai_prime(hi);
    while (static_cast<int>(zeros.size()) < count) {
        const long double lo = hi - step;
        const long double f_lo = airy_ai_prime(lo);
        if (lo < -12.0L) throw std::runtime_error("airy_prime_zeros: scan range exhausted");
        if ((f_lo < 0) != (f_hi < 0)) {
            long double a = lo, b = hi, fa = f_lo;
            for (int it = 0; it < 200 && b - a > 1e-18L; ++it) {
                const long double m = 0.5L * (a + b);
                const long double fm = airy_ai_prime(m);
                if ((fm < 0) == (fa < 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            zeros.push_back(static_cast<double>(0.5L * (a + b)));
        }
        hi = lo;
        f_hi = f_lo;
    }
    return zeros;
}

/// ν_k = 2^{2/3} |a'_k|, eigenvalues of the Neumann problem for D² + 2τ.
inline std::vector<double> airy_comparison_nu(int count) {
    std::vector<double> nu;
    for (double z : airy_prime_zeros(count)) nu.push_back(std::cbrt(4.0) * std::fabs(z));
    return nu;
}

}  // namespace oracle
