#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "degennes/operator.hpp"

namespace degennes {

enum class Ordering { ByRealPart, ByProjectionMatch };

/// Retention guard for eigenpairs. Pairs whose residual exceeds
/// max(residual_tol, 100 ε ‖H‖∞) or whose discrete L² mass on the last
/// `tail_points` unknowns exceeds `tail_mass_tol` are discarded as
/// truncation-polluted.
struct EigenOptions {
    double residual_tol = 1e-8;
    int tail_points = 5;
    double tail_mass_tol = 1e-6;
    int extra = 2;
};

/// Eigenpairs of the discrete operator. Vectors are unit columns in the
/// mass-weighted basis (Euclidean product = discrete L² product).
struct SpectrumResult {
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd eigenvectors;
    Eigen::VectorXd residual_norms;
    Ordering ordering = Ordering::ByRealPart;

    [[nodiscard]] Eigen::Index count() const { return eigenvalues.size(); }
};

SpectrumResult eigs(const AssembledOperator& op, int k_max, const EigenOptions& options = {});

/// The k lowest eigenvalues of a real operator, without the retention guard.
Eigen::VectorXd lowest_real_eigenvalues(const AssembledOperator& op, int k);

/// Real, unit ground state of a real operator with the sign fixed by a
/// positive discrete mean, plus its eigenvalue and the next one.
struct GroundState {
    double mu1 = 0.0;
    double mu2 = 0.0;
    Eigen::VectorXd vector;
};
GroundState ground_state(const AssembledOperator& op);

/// dλ/dξ = ⟨v, ∂_ξA v⟩ / ⟨v, v⟩ for a simple eigenpair (bilinear pairing,
/// weighted basis). ∂_ξ V = -2 (p(t) - ξ).
cdouble parameter_derivative(const AssembledOperator& op, const Eigen::VectorXcd& weighted);

/// μ_k(ξ), k = 1..k_max, for real ξ.
Eigen::VectorXd band_values(const OperatorSpec& spec, const Discretization& disc, int k_max);

struct BandTable {
    std::vector<double> xi_grid;
    Eigen::MatrixXd mu;      // rows: grid points, cols: k = 1..k_max
    Eigen::VectorXd gaps;    // gaps[j] = min over grid of μ_{j+2} - μ_{j+1}
    double theta0 = 0.0;
    double xi0 = 0.0;
    bool theta0_refined = false;
};

/// Spectra over a sorted real grid. Θ₀/ξ₀ are refined by find_theta0 when
/// the grid minimum of μ₁ is interior (de Gennes only); otherwise the grid
/// minimum is reported with theta0_refined = false.
BandTable band_table(const OperatorSpec& family, const std::vector<double>& xi_grid, int k_max,
                     const Discretization& disc);

struct Theta0Result {
    double xi0 = 0.0;
    double theta0 = 0.0;
    double derivative = 0.0;   // dμ/dξ at ξ₀
    int evaluations = 0;
};

/// Minimizer of the de Gennes function on [lo, hi]: golden-section
/// bracketing followed by a safeguarded secant on the Hellmann–Feynman
/// derivative, to |Δξ| ≤ tol.
Theta0Result find_theta0(const Discretization& disc, double lo = 0.0, double hi = 2.0, double tol = 1e-8);

/// Resolution floor below which eigenvalue deviations are noise.
inline constexpr double kDeviationFloor = 1e-12;

struct AsymptoticRow {
    double parameter = 0.0;   // ξ (plus side) or α (minus side)
    double mu = 0.0;
    double value = 0.0;       // μ_k - (2k-1) or (μ_k(-α) - α²)/α^{2/3}
    double reference = 0.0;   // 2k-1 or ν_k
};

struct AsymptoticTable {
    int k = 1;
    std::vector<AsymptoticRow> rows;
    bool monotone = false;
    std::vector<std::string> warnings;
};

/// Deviations μ_k(ξ) - (2k-1) for increasing positive ξ. `monotone` holds
/// when |deviation| strictly decreases, except between entries that both lie
/// below kDeviationFloor.
AsymptoticTable asymptotics_plus(int k, const std::vector<double>& xi_list, const Discretization& disc);

/// r_k(α) = (μ_k(-α) - α²)/α^{2/3} against ν_k of the Airy comparison
/// operator. `monotone` holds when |r_k - ν_k| strictly decreases.
AsymptoticTable asymptotics_minus(int k, const std::vector<double>& alpha_list, const Discretization& disc);

/// ν_k, k = 1..k_max, eigenvalues of the Neumann realization of D² + 2τ.
Eigen::VectorXd airy_comparison_eigenvalues(int k_max, const Discretization& disc);

}  // namespace degennes
