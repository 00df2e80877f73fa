#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "degennes/tridiagonal.hpp"

namespace degennes {

using cdouble = std::complex<double>;

enum class Family { DeGennes, AiryComparison, Montgomery };

/// Operator family and its (possibly complex) parameter ξ.
///
/// DeGennes:        -∂²_t + (t - ξ)²            on t ≥ 0, Neumann at 0.
/// AiryComparison:  -∂²_t + 2t                  on t ≥ 0, Neumann at 0 (ξ unused).
/// Montgomery(n):   -∂²_t + (ξ - t^{n+1}/(n+1))² on the full line.
struct OperatorSpec {
    Family family = Family::DeGennes;
    int montgomery_n = 0;
    cdouble xi{0.0, 0.0};

    static OperatorSpec de_gennes(cdouble xi) { return {Family::DeGennes, 0, xi}; }
    static OperatorSpec airy_comparison() { return {Family::AiryComparison, 0, {0.0, 0.0}}; }
    static OperatorSpec montgomery(int n, cdouble xi) { return {Family::Montgomery, n, xi}; }

    [[nodiscard]] bool half_line() const { return family != Family::Montgomery; }
    [[nodiscard]] OperatorSpec with_xi(cdouble new_xi) const {
        OperatorSpec s = *this;
        s.xi = new_xi;
        return s;
    }
    /// Same family at the real parameter Re ξ.
    [[nodiscard]] OperatorSpec real_part() const { return with_xi({xi.real(), 0.0}); }

    void validate() const;
};

std::string to_string(Family family);

enum class Scheme { FiniteDifference2, Collocation };

std::string to_string(Scheme scheme);

/// Truncated grid. `truncation == 0` selects the family default (see
/// default_truncation). The far end carries a Dirichlet condition.
struct Discretization {
    Scheme scheme = Scheme::Collocation;
    double truncation = 0.0;
    int n_points = 64;

    static Discretization finite_difference(int n, double truncation = 0.0) {
        return {Scheme::FiniteDifference2, truncation, n};
    }
    static Discretization collocation(int n = 64, double truncation = 0.0) {
        return {Scheme::Collocation, truncation, n};
    }

    void validate() const;
};

/// T = max(15, |Re ξ| + 12) for de Gennes, 15 for the Airy comparison
/// operator, 8 + ((n+1) max(Re ξ, 0))^{1/(n+1)} (half-width) for Montgomery.
double default_truncation(const OperatorSpec& spec);

/// Resolved truncation length for a spec/discretization pair.
double resolved_truncation(const OperatorSpec& spec, const Discretization& disc);

/// Discrete quadratic form of a one-dimensional Schrödinger operator.
///
/// The form matrix is A = K + diag(m ∘ V) with a real symmetric stiffness K
/// and the diagonal Gram weights m; the operator acts as m⁻¹A. For complex ξ
/// only V is complex, so A is complex symmetric. Unknowns exclude the
/// Dirichlet end points; the Neumann end at t = 0 is kept as an unknown and
/// carries no boundary term.
struct AssembledOperator {
    OperatorSpec spec;
    Discretization disc;
    double truncation = 0.0;
    double kinetic = 1.0;

    Eigen::VectorXd nodes;
    Eigen::VectorXd mass;
    Eigen::VectorXcd potential;
    /// Multiplier p(t) - Re ξ with p(t) = t (de Gennes) or t^{n+1}/(n+1).
    Eigen::VectorXd coupling;

    /// Dense stiffness (collocation); empty when `band` is used.
    Eigen::MatrixXd stiffness;
    /// Tridiagonal stiffness (finite differences).
    SymmetricTridiagonal band;

    [[nodiscard]] Eigen::Index size() const { return nodes.size(); }
    [[nodiscard]] bool is_banded() const { return stiffness.size() == 0; }
    [[nodiscard]] bool is_real() const;
};

AssembledOperator assemble(const OperatorSpec& spec, const Discretization& disc);

/// Half-line Neumann operator -kinetic·∂² + V(t) on [0, T] for potentials
/// that are not one of the named families (used by the dilation check).
AssembledOperator assemble_half_line(double kinetic, const std::function<double(double)>& potential,
                                     const Discretization& disc, double truncation);

/// Largest size for which dense matrices of a banded operator are built.
inline constexpr Eigen::Index kDenseLimit = 6000;

namespace detail {
void require_dense(const AssembledOperator& op);
}

/// Form matrix A = K + diag(m ∘ V). Scalar = double requires a real potential.
template <typename Scalar = cdouble>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> form_matrix(const AssembledOperator& op);

/// Gram matrix diag(m).
Eigen::MatrixXd mass_matrix(const AssembledOperator& op);

/// diag(m ∘ (p(t) - Re ξ)), the first-order term of the split
/// A(ξ) = A(Re ξ) - 2i·Im ξ·M_w - (Im ξ)²·mass.
Eigen::MatrixXd coupling_matrix(const AssembledOperator& op);

/// H = m^{-1/2} A m^{-1/2}. Its Euclidean geometry is the discrete L² geometry,
/// so vectors handled by the spectral code live in this basis.
template <typename Scalar = cdouble>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> symmetric_matrix(const AssembledOperator& op);

/// H for banded real operators, without densifying.
SymmetricTridiagonal symmetric_tridiagonal(const AssembledOperator& op);

/// Nodal values ψ(t_i) of a vector given in the mass-weighted basis.
template <typename Derived>
auto nodal_values(const AssembledOperator& op, const Eigen::MatrixBase<Derived>& weighted) {
    return (weighted.array() / op.mass.array().sqrt().template cast<typename Derived::Scalar>())
        .matrix()
        .eval();
}

/// Smallest eigenvalue of the Hermitian part of the discrete de Gennes
/// operator, i.e. of 𝔏_{Re ξ} - (Im ξ)².
double real_part_form_min(const OperatorSpec& spec, const Discretization& disc);

struct DilationCheck {
    double direct = 0.0;
    double rescaled = 0.0;
    [[nodiscard]] double difference() const { return direct - rescaled; }
};

/// μ_k(-α) computed directly and as α²·λ_k(α⁻⁴D²_τ + (τ+1)²) on the
/// rescaled half-line τ = t/α, both with `disc` (truncation divided by α for
/// the rescaled problem). k is 1-based.
DilationCheck dilation_check(double alpha, int k, const Discretization& disc);

}  // namespace degennes
