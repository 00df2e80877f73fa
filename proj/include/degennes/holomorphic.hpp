#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "degennes/operator.hpp"
#include "degennes/spectrum.hpp"

namespace degennes {

/// Circle Γ of `nodes` trapezoid points, center μ(Re ξ), radius in (r0, 2 r0).
struct ContourSpec {
    double center = 0.0;
    double radius = 0.0;
    int nodes = 32;
    double r0 = 0.0;

    /// Radius (3/2) r0.
    static ContourSpec around(double center, double r0, int nodes = 32);
    void validate() const;
    [[nodiscard]] cdouble node(int j) const;
};

/// How sweeps size the contour: from the gap at Re ξ (Local) or from a
/// single r0 valid for the whole band table (Global).
enum class ContourMode { Local, Global };

/// Tolerances and knobs of the extension machinery in one place.
struct HolomorphicOptions {
    int contour_nodes = 32;
    ContourMode mode = ContourMode::Local;
    double global_r0 = 0.0;
    double rank_tolerance = 0.1;
    double overlap_fraction = 0.5;
    double consistency_tol = 1e-8;
    double near_singular_tol = 1e-13;
};

struct RieszProjection {
    Eigen::MatrixXcd matrix;
    cdouble trace;
    double idempotency_defect = 0.0;   // ‖P² - P‖₂
    Eigen::VectorXd psi0;              // weighted basis, unit
    Eigen::VectorXcd projected;        // P ψ₀
    cdouble overlap;                   // ∫ (P ψ₀)², bilinear
    ContourSpec contour;
    int rank = 0;                      // round(Re trace)
};

enum class ExtensionMethod { ProjectionQuotient, DirectEigenvalue };

struct ExtensionResult {
    cdouble xi;
    cdouble F;
    cdouble F_direct;
    double mu_at_re = 0.0;
    double lower_bound_slack = 0.0;   // Re F - μ(Re ξ) + (Im ξ)²
    cdouble rank_diag;                // trace of P_ξ
    double idempotency_defect = 0.0;
    cdouble overlap;
    double residual = 0.0;            // ‖(H - F) Pψ₀‖ / ‖Pψ₀‖
    /// ‖P_ξ - P_{Re ξ}‖₂ on the same contour; NaN unless computed (sweeps).
    double projection_shift = std::numeric_limits<double>::quiet_NaN();
    ContourSpec contour;
    ExtensionMethod method = ExtensionMethod::ProjectionQuotient;
};

/// Largest 2-norm singular value.
double spectral_norm(const Eigen::MatrixXcd& m);

/// r0 = min(c₁/4, 1) from the band table's first gap.
double estimate_r0(const BandTable& band);

/// ‖(H - z)⁻¹‖₂ on the discrete L² space.
double resolvent_norm(const AssembledOperator& op, cdouble z, double near_singular_tol = 1e-13);

/// ‖(p(t) - Re ξ)(H - z)⁻¹‖₂.
double weighted_resolvent_norm(const AssembledOperator& op, cdouble z, double near_singular_tol = 1e-13);

/// ‖(H_ξ - z)⁻¹ - (H_{Re ξ} - z)⁻¹‖₂.
double resolvent_difference(const OperatorSpec& spec, cdouble z, const Discretization& disc,
                            double near_singular_tol = 1e-13);

/// Contour centered at μ₁(Re ξ) with r0 = (μ₂ - μ₁)(Re ξ)/4.
ContourSpec certify_contour(const OperatorSpec& spec, const Discretization& disc, int nodes = 32);

/// P_ξ = (1/2πi) ∮_Γ (z - H_ξ)⁻¹ dz by the M-point trapezoid rule.
RieszProjection riesz_projection(const OperatorSpec& spec, const ContourSpec& contour, const Discretization& disc,
                                 const HolomorphicOptions& options = {});

/// F(ξ) = ∫ H(Pψ₀)·Pψ₀ / ∫ (Pψ₀)², checked against the eigenvalue of H_ξ
/// nearest the contour center.
ExtensionResult extend_mu(const OperatorSpec& spec, const Discretization& disc, const ContourSpec& contour,
                          const HolomorphicOptions& options = {});

/// Same, with the contour chosen by options.mode.
ExtensionResult extend_mu(const OperatorSpec& spec, const Discretization& disc,
                          const HolomorphicOptions& options = {});

/// |D_y F - i D_x F| with fourth-order centered differences of spacing h.
double cauchy_riemann_residual(const OperatorSpec& spec, double h, const Discretization& disc,
                               const HolomorphicOptions& options = {});

struct SweepConfig {
    double re_from = -2.0;
    double re_to = 4.0;
    double re_step = 0.1;
    double half_width = 0.25;
    double im_step = 0.05;
    double max_half_width = 0.3;
    /// Θ₀ for the coercivity flag; computed with find_theta0 when zero.
    double theta0 = 0.0;
    /// Bound on the fourth-order Cauchy–Riemann residual at the grid spacing.
    /// Branch jumps give O(1) residuals; smooth F at spacing 0.1 stays near 1e-4.
    double cauchy_riemann_tol = 1e-3;
};

enum class PointStatus { Ok, RankFailure, StripExceeded, Inconsistent, Singular, SolverFailure };

std::string to_string(PointStatus status);

struct SweepPoint {
    ExtensionResult result;
    PointStatus status = PointStatus::Ok;
    std::string message;
    /// Θ₀ - (Im ξ)² > 0, the coercivity margin behind bijectivity of 𝔏_ξ.
    bool coercive = true;
};

struct SweepSummary {
    /// Largest |Im ξ| level at which every point succeeded; -1 when the real axis fails.
    double certified_half_width = 0.0;
    double worst_slack = 0.0;
    double max_trace_defect = 0.0;
    double max_idempotency = 0.0;
    double min_overlap = 0.0;
    double max_residual = 0.0;
    double max_quotient_direct = 0.0;
    double max_reflection = 0.0;
    double max_axis_imag = 0.0;
    double max_projection_shift = 0.0;
    double max_cauchy_riemann = 0.0;
    bool cauchy_riemann_ok = true;
    std::size_t failures = 0;
    std::size_t noncoercive = 0;
};

struct StripSweep {
    std::vector<double> re_values;
    std::vector<double> im_values;
    std::vector<SweepPoint> points;   // row-major: re index outer, im index inner
    SweepSummary summary;
    double theta0 = 0.0;

    [[nodiscard]] const SweepPoint& at(std::size_t re_index, std::size_t im_index) const {
        return points[re_index * im_values.size() + im_index];
    }
};

/// extend_mu over the rectangle [re_from, re_to] × [-ε, ε] for one family.
/// Per-point failures are recorded, not thrown.
StripSweep strip_sweep(const OperatorSpec& family, const SweepConfig& config, const Discretization& disc,
                       const HolomorphicOptions& options = {});

/// Equispaced inclusive grid; the count is rounded to the nearest integer.
std::vector<double> uniform_grid(double from, double to, double step);

}  // namespace degennes
