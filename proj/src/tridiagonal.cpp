#include "degennes/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "degennes/error.hpp"

namespace degennes {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double pivot_floor(const SymmetricTridiagonal& t) {
    double emax = 1.0;
    for (Eigen::Index i = 0; i < t.off.size(); ++i) emax = std::max(emax, t.off[i] * t.off[i]);
    return std::numeric_limits<double>::min() * emax;
}

std::pair<double, double> gershgorin(const SymmetricTridiagonal& t) {
    const Eigen::Index n = t.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.off[i - 1]);
        if (i + 1 < n) r += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    const double pad = kEps * std::max(std::abs(lo), std::abs(hi)) * static_cast<double>(n) + 1e-300;
    return {lo - pad, hi + pad};
}

Eigen::Index sturm_count_with(const SymmetricTridiagonal& t, double x, double pivmin) {
    const Eigen::Index n = t.size();
    Eigen::Index count = 0;
    double q = t.diag[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (Eigen::Index i = 1; i < n; ++i) {
        q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

}  // namespace

Eigen::MatrixXd SymmetricTridiagonal::dense() const {
    const Eigen::Index n = size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m.diagonal() = diag;
    if (n > 1) {
        m.diagonal(1) = off;
        m.diagonal(-1) = off;
    }
    return m;
}

Eigen::VectorXd SymmetricTridiagonal::apply(const Eigen::VectorXd& x) const {
    const Eigen::Index n = size();
    Eigen::VectorXd y = diag.cwiseProduct(x);
    if (n > 1) {
        y.head(n - 1) += off.cwiseProduct(x.tail(n - 1));
        y.tail(n - 1) += off.cwiseProduct(x.head(n - 1));
    }
    return y;
}

double SymmetricTridiagonal::norm_inf() const {
    const Eigen::Index n = size();
    double best = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double r = std::abs(diag[i]);
        if (i > 0) r += std::abs(off[i - 1]);
        if (i + 1 < n) r += std::abs(off[i]);
        best = std::max(best, r);
    }
    return best;
}

Eigen::Index sturm_count(const SymmetricTridiagonal& t, double x) {
    return sturm_count_with(t, x, pivot_floor(t));
}

Eigen::VectorXd lowest_eigenvalues(const SymmetricTridiagonal& t, Eigen::Index k) {
    const Eigen::Index n = t.size();
    if (n == 0 || k <= 0 || k > n) throw ConfigError("lowest_eigenvalues: invalid k for tridiagonal of size " + std::to_string(n));
    const double pivmin = pivot_floor(t);
    const auto [glo, ghi] = gershgorin(t);

    Eigen::VectorXd values(k);
    double lower = glo;
    for (Eigen::Index j = 0; j < k; ++j) {
        double a = lower;
        double b = ghi;
        for (int it = 0; it < 400; ++it) {
            const double tol = 2.0 * kEps * std::max(std::abs(a), std::abs(b)) + 4.0 * pivmin;
            if (b - a <= tol) break;
            const double mid = 0.5 * (a + b);
            if (sturm_count_with(t, mid, pivmin) > j) {
                b = mid;
            } else {
                a = mid;
            }
        }
        values[j] = 0.5 * (a + b);
        lower = a;
    }
    return values;
}

Eigen::VectorXd inverse_iteration(const SymmetricTridiagonal& t, double lambda) {
    const Eigen::Index n = t.size();
    if (n == 1) return Eigen::VectorXd::Ones(1);

    // Partially pivoted LU of T - λ, stored as in LAPACK's xGTTRF.
    std::vector<double> dl(t.off.data(), t.off.data() + n - 1);
    std::vector<double> du(dl);
    std::vector<double> du2(static_cast<std::size_t>(std::max<Eigen::Index>(n - 2, 0)), 0.0);
    std::vector<double> d(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) d[i] = t.diag[i] - lambda;
    std::vector<bool> swapped(static_cast<std::size_t>(n - 1), false);
    const double tiny = kEps * std::max(t.norm_inf(), 1.0);

    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) d[i] = tiny;
            const double fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            const double temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = true;
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;

    auto solve = [&](Eigen::VectorXd& b) {
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            if (!swapped[i]) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                const double temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            }
        }
        b[n - 1] /= d[n - 1];
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for (Eigen::Index i = n - 3; i >= 0; --i) {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
    };

    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    // Deterministic, non-symmetric start so no eigenvector is orthogonal to it.
    for (Eigen::Index i = 0; i < n; ++i) v[i] += 0.5 * std::sin(0.37 * static_cast<double>(i) + 0.1);
    v.normalize();
    for (int it = 0; it < 4; ++it) {
        solve(v);
        const double nrm = v.norm();
        if (!std::isfinite(nrm) || nrm == 0.0) throw SolverError("inverse iteration broke down");
        v /= nrm;
    }
    return v;
}

}  // namespace degennes
