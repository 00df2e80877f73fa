#include "degennes/operator.hpp"

#include <algorithm>
#include <cmath>

#include "degennes/error.hpp"
#include "degennes/quadrature.hpp"
#include "degennes/spectrum.hpp"

namespace degennes {

namespace {

// Clustering of the algebraic map t = T u / (1 + β(1 - u)) toward t = 0.
constexpr double kMapStretch = 1.0;

struct Grid {
    Eigen::VectorXd nodes;
    Eigen::VectorXd mass;
    Eigen::MatrixXd stiffness;
    SymmetricTridiagonal band;
};

Grid fd_half_line(int n, double length) {
    const double h = length / n;
    Grid g;
    g.nodes = Eigen::VectorXd::LinSpaced(n, 0.0, h * (n - 1));
    g.mass = Eigen::VectorXd::Constant(n, h);
    g.mass[0] = 0.5 * h;
    g.band.diag = Eigen::VectorXd::Constant(n, 2.0 / h);
    g.band.diag[0] = 1.0 / h;
    g.band.off = Eigen::VectorXd::Constant(n - 1, -1.0 / h);
    return g;
}

Grid fd_full_line(int n, double half_width) {
    const double h = 2.0 * half_width / (n + 1);
    Grid g;
    g.nodes = Eigen::VectorXd::LinSpaced(n, -half_width + h, -half_width + h * n);
    g.mass = Eigen::VectorXd::Constant(n, h);
    g.band.diag = Eigen::VectorXd::Constant(n, 2.0 / h);
    g.band.off = Eigen::VectorXd::Constant(n - 1, -1.0 / h);
    return g;
}

// Nodal Galerkin with Lobatto quadrature: K = Dᵀ diag(w/t') D, m = w t'.
// `drop_first` removes the node at s = -1 (Dirichlet there); the node at s = 1
// is always removed.
Grid collocation(const Eigen::VectorXd& t, const Eigen::VectorXd& dt_ds, const LobattoRule& rule,
                 bool drop_first) {
    const Eigen::Index np = rule.nodes.size();
    const Eigen::MatrixXd full =
        rule.diff.transpose() * rule.weights.cwiseQuotient(dt_ds).asDiagonal() * rule.diff;
    const Eigen::Index first = drop_first ? 1 : 0;
    const Eigen::Index count = np - 1 - first;
    Grid g;
    g.nodes = t.segment(first, count);
    g.mass = rule.weights.cwiseProduct(dt_ds).segment(first, count);
    g.stiffness = full.block(first, first, count, count);
    // Exact symmetry; the triple product is symmetric only up to rounding.
    g.stiffness = (0.5 * (g.stiffness + g.stiffness.transpose())).eval();
    return g;
}

Grid colloc_half_line(int n, double length) {
    const LobattoRule rule = lobatto_rule(n);
    const Eigen::ArrayXd u = 0.5 * (rule.nodes.array() + 1.0);
    const Eigen::ArrayXd denom = 1.0 + kMapStretch * (1.0 - u);
    const Eigen::VectorXd t = (length * u / denom).matrix();
    const Eigen::VectorXd dt_ds = (0.5 * length * (1.0 + kMapStretch) / denom.square()).matrix();
    return collocation(t, dt_ds, rule, false);
}

Grid colloc_full_line(int n, double half_width) {
    const LobattoRule rule = lobatto_rule(n + 1);
    const Eigen::VectorXd t = half_width * rule.nodes;
    const Eigen::VectorXd dt_ds = Eigen::VectorXd::Constant(rule.nodes.size(), half_width);
    return collocation(t, dt_ds, rule, true);
}

Grid make_grid(const Discretization& disc, bool half_line, double truncation) {
    if (disc.scheme == Scheme::FiniteDifference2) {
        return half_line ? fd_half_line(disc.n_points, truncation) : fd_full_line(disc.n_points, truncation);
    }
    return half_line ? colloc_half_line(disc.n_points, truncation)
                     : colloc_full_line(disc.n_points, truncation);
}

AssembledOperator from_grid(Grid grid, const OperatorSpec& spec, const Discretization& disc, double truncation,
                            double kinetic) {
    AssembledOperator op;
    op.spec = spec;
    op.disc = disc;
    op.truncation = truncation;
    op.kinetic = kinetic;
    op.nodes = std::move(grid.nodes);
    op.mass = std::move(grid.mass);
    op.stiffness = kinetic * grid.stiffness;
    op.band.diag = kinetic * grid.band.diag;
    op.band.off = kinetic * grid.band.off;
    return op;
}

}  // namespace

std::string to_string(Family family) {
    switch (family) {
        case Family::DeGennes: return "de_gennes";
        case Family::AiryComparison: return "airy_comparison";
        case Family::Montgomery: return "montgomery";
    }
    return "unknown";
}

std::string to_string(Scheme scheme) {
    return scheme == Scheme::FiniteDifference2 ? "fd" : "colloc";
}

void OperatorSpec::validate() const {
    if (family == Family::Montgomery && montgomery_n < 1) {
        throw DomainError("Montgomery operator requires n >= 1, got " + std::to_string(montgomery_n));
    }
    if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag())) throw DomainError("xi must be finite");
}

void Discretization::validate() const {
    if (n_points < 8) throw ConfigError("n_points must be at least 8, got " + std::to_string(n_points));
    if (!std::isfinite(truncation) || truncation < 0.0) {
        throw ConfigError("truncation must be positive (or 0 for the default)");
    }
    if (scheme == Scheme::Collocation && n_points > 1000) {
        throw ConfigError("collocation degree above 1000 is ill-conditioned");
    }
}

bool AssembledOperator::is_real() const { return potential.imag().cwiseAbs().maxCoeff() == 0.0; }

double default_truncation(const OperatorSpec& spec) {
    switch (spec.family) {
        case Family::DeGennes: return std::max(15.0, std::abs(spec.xi.real()) + 12.0);
        case Family::AiryComparison: return 15.0;
        case Family::Montgomery: {
            const double n1 = spec.montgomery_n + 1.0;
            return 8.0 + std::pow(n1 * std::max(spec.xi.real(), 0.0), 1.0 / n1);
        }
    }
    return 15.0;
}

double resolved_truncation(const OperatorSpec& spec, const Discretization& disc) {
    return disc.truncation > 0.0 ? disc.truncation : default_truncation(spec);
}

AssembledOperator assemble(const OperatorSpec& spec, const Discretization& disc) {
    spec.validate();
    disc.validate();
    const double length = resolved_truncation(spec, disc);
    AssembledOperator op = from_grid(make_grid(disc, spec.half_line(), length), spec, disc, length, 1.0);

    const Eigen::Index n = op.size();
    op.potential.resize(n);
    op.coupling.resize(n);
    const cdouble xi = spec.xi;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = op.nodes[i];
        switch (spec.family) {
            case Family::DeGennes: {
                const cdouble d = t - xi;
                op.potential[i] = d * d;
                op.coupling[i] = t - xi.real();
                break;
            }
            case Family::AiryComparison:
                op.potential[i] = 2.0 * t;
                op.coupling[i] = 0.0;
                break;
            case Family::Montgomery: {
                const double n1 = spec.montgomery_n + 1.0;
                const double p = std::pow(t, n1) / n1;
                const cdouble d = p - xi;
                op.potential[i] = d * d;
                op.coupling[i] = p - xi.real();
                break;
            }
        }
    }
    return op;
}

AssembledOperator assemble_half_line(double kinetic, const std::function<double(double)>& potential,
                                     const Discretization& disc, double truncation) {
    disc.validate();
    if (!(kinetic > 0.0)) throw ConfigError("kinetic coefficient must be positive");
    if (!(truncation > 0.0)) throw ConfigError("truncation must be positive");
    AssembledOperator op = from_grid(make_grid(disc, true, truncation), OperatorSpec::de_gennes(0.0), disc,
                                     truncation, kinetic);
    op.potential = op.nodes.unaryExpr(potential).cast<cdouble>();
    op.coupling = Eigen::VectorXd::Zero(op.size());
    return op;
}

namespace detail {
void require_dense(const AssembledOperator& op) {
    if (op.is_banded() && op.size() > kDenseLimit) {
        throw ConfigError("dense matrix requested for " + std::to_string(op.size()) +
                          " unknowns; limit is " + std::to_string(kDenseLimit));
    }
}
}  // namespace detail

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> form_matrix(const AssembledOperator& op) {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    detail::require_dense(op);
    Matrix a = op.is_banded() ? op.band.dense().cast<Scalar>().eval() : op.stiffness.cast<Scalar>().eval();
    if constexpr (std::is_same_v<Scalar, double>) {
        if (!op.is_real()) throw DomainError("real form matrix requested for complex parameter");
        a.diagonal() += op.mass.cwiseProduct(op.potential.real());
    } else {
        a.diagonal() += op.mass.cast<Scalar>().cwiseProduct(op.potential.template cast<Scalar>());
    }
    return a;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> symmetric_matrix(const AssembledOperator& op) {
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a = form_matrix<Scalar>(op);
    const Eigen::VectorXd s = op.mass.cwiseSqrt().cwiseInverse();
    return s.cast<Scalar>().asDiagonal() * a * s.cast<Scalar>().asDiagonal();
}

template Eigen::MatrixXd form_matrix<double>(const AssembledOperator&);
template Eigen::MatrixXcd form_matrix<cdouble>(const AssembledOperator&);
template Eigen::MatrixXd symmetric_matrix<double>(const AssembledOperator&);
template Eigen::MatrixXcd symmetric_matrix<cdouble>(const AssembledOperator&);

Eigen::MatrixXd mass_matrix(const AssembledOperator& op) {
    detail::require_dense(op);
    return op.mass.asDiagonal();
}

Eigen::MatrixXd coupling_matrix(const AssembledOperator& op) {
    detail::require_dense(op);
    return op.mass.cwiseProduct(op.coupling).asDiagonal();
}

SymmetricTridiagonal symmetric_tridiagonal(const AssembledOperator& op) {
    if (!op.is_banded()) throw ConfigError("symmetric_tridiagonal: operator is not banded");
    if (!op.is_real()) throw DomainError("symmetric_tridiagonal: complex parameter");
    SymmetricTridiagonal t;
    t.diag = op.band.diag.cwiseQuotient(op.mass) + op.potential.real();
    const Eigen::Index n = op.size();
    t.off = op.band.off.cwiseQuotient(op.mass.head(n - 1).cwiseProduct(op.mass.tail(n - 1)).cwiseSqrt());
    return t;
}

double real_part_form_min(const OperatorSpec& spec, const Discretization& disc) {
    if (spec.family != Family::DeGennes) throw DomainError("real_part_form_min is defined for the de Gennes family");
    // Re (t - ξ)² = (t - Re ξ)² - (Im ξ)²: take the Hermitian part entrywise.
    AssembledOperator op = assemble(spec, disc);
    op.potential = op.potential.real().cast<cdouble>();
    return lowest_real_eigenvalues(op, 1)[0];
}

DilationCheck dilation_check(double alpha, int k, const Discretization& disc) {
    if (!(alpha >= 1.0)) throw DomainError("dilation_check requires alpha >= 1");
    if (k < 1) throw ConfigError("dilation_check: k is 1-based");
    const OperatorSpec spec = OperatorSpec::de_gennes(-alpha);
    const double length = resolved_truncation(spec, disc);

    DilationCheck out;
    Discretization direct = disc;
    direct.truncation = length;
    out.direct = lowest_real_eigenvalues(assemble(spec, direct), k)[k - 1];

    const double a4 = std::pow(alpha, -4.0);
    const auto scaled = assemble_half_line(
        a4, [](double tau) { return (tau + 1.0) * (tau + 1.0); }, disc, length / alpha);
    out.rescaled = alpha * alpha * lowest_real_eigenvalues(scaled, k)[k - 1];
    return out;
}

}  // namespace degennes
