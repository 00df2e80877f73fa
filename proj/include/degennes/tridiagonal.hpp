#pragma once

#include <Eigen/Dense>

namespace degennes {

/// Real symmetric tridiagonal matrix: diagonal d (size n) and
/// off-diagonal e (size n-1).
struct SymmetricTridiagonal {
    Eigen::VectorXd diag;
    Eigen::VectorXd off;

    [[nodiscard]] Eigen::Index size() const { return diag.size(); }
    [[nodiscard]] Eigen::MatrixXd dense() const;
    /// y = T x
    [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    [[nodiscard]] double norm_inf() const;
};

/// Number of eigenvalues strictly below x (Sturm sequence of the LDLᵀ pivots).
Eigen::Index sturm_count(const SymmetricTridiagonal& t, double x);

/// The k smallest eigenvalues by bisection on the Sturm count.
Eigen::VectorXd lowest_eigenvalues(const SymmetricTridiagonal& t, Eigen::Index k);

/// Unit eigenvector for an accurately known simple eigenvalue, by inverse
/// iteration with a partially pivoted tridiagonal LU.
Eigen::VectorXd inverse_iteration(const SymmetricTridiagonal& t, double lambda);

}  // namespace degennes
