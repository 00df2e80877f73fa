#include "degennes/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "degennes/error.hpp"

namespace degennes {

LobattoRule lobatto_rule(int degree) {
    if (degree < 2) throw ConfigError("lobatto_rule: degree must be at least 2");
    const int n = degree;
    const Eigen::Index np = n + 1;

    // Newton iteration on (1 - x²) P_n'(x) from Chebyshev–Lobatto guesses.
    Eigen::VectorXd x(np);
    for (Eigen::Index i = 0; i < np; ++i) x[i] = -std::cos(std::numbers::pi * static_cast<double>(i) / n);
    Eigen::MatrixXd p(np, np);
    Eigen::VectorXd prev = Eigen::VectorXd::Constant(np, 2.0);
    for (int it = 0; it < 100 && (x - prev).cwiseAbs().maxCoeff() > 1e-16; ++it) {
        prev = x;
        p.col(0).setOnes();
        p.col(1) = x;
        for (int k = 2; k <= n; ++k) {
            p.col(k) = ((2.0 * k - 1.0) * x.cwiseProduct(p.col(k - 1)) - (k - 1.0) * p.col(k - 2)) / k;
        }
        x = prev - (x.cwiseProduct(p.col(n)) - p.col(n - 1)).cwiseQuotient((n + 1.0) * p.col(n));
    }
    x[0] = -1.0;
    x[n] = 1.0;

    // Legendre values at the converged nodes.
    Eigen::VectorXd pn(np);
    for (Eigen::Index i = 0; i < np; ++i) {
        double p0 = 1.0;
        double p1 = x[i];
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x[i] * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        pn[i] = p1;
    }

    LobattoRule rule;
    rule.nodes = x;
    rule.weights = (2.0 / (n * (n + 1.0))) * pn.cwiseProduct(pn).cwiseInverse();
    rule.diff.resize(np, np);
    for (Eigen::Index i = 0; i < np; ++i) {
        for (Eigen::Index j = 0; j < np; ++j) {
            rule.diff(i, j) = (i == j) ? 0.0 : pn[i] / (pn[j] * (x[i] - x[j]));
        }
    }
    rule.diff(0, 0) = -0.25 * n * (n + 1.0);
    rule.diff(n, n) = 0.25 * n * (n + 1.0);
    return rule;
}

}  // namespace degennes
