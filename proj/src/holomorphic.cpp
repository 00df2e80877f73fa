#include "degennes/holomorphic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "degennes/error.hpp"
#include "degennes/parallel.hpp"

namespace degennes {

namespace {

Eigen::MatrixXcd shifted(const Eigen::MatrixXcd& h, cdouble z) {
    Eigen::MatrixXcd m = h;
    m.diagonal().array() -= z;
    return m;
}

Eigen::MatrixXcd inverse_checked(const Eigen::MatrixXcd& m, double tol, const char* what) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > tol)) {
        std::ostringstream msg;
        msg << what << ": matrix is numerically singular (rcond " << rcond << ")";
        throw NearSingularError(msg.str());
    }
    return lu.inverse();
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues();
}

RieszProjection project(const Eigen::MatrixXcd& h, const ContourSpec& contour, const Eigen::VectorXd& psi0,
                        const HolomorphicOptions& options) {
    contour.validate();
    const Eigen::Index n = h.rows();
    RieszProjection out;
    out.contour = contour;
    out.matrix = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < contour.nodes; ++j) {
        const cdouble z = contour.node(j);
        const cdouble weight = (z - contour.center) / static_cast<double>(contour.nodes);
        try {
            out.matrix += weight * inverse_checked(shifted(-h, -z), options.near_singular_tol, "contour node");
        } catch (const NearSingularError& e) {
            std::ostringstream msg;
            msg << "quadrature node " << j << " at z = " << z << " hits the spectrum: " << e.what();
            throw ContourError(msg.str());
        }
    }
    out.trace = out.matrix.trace();
    out.idempotency_defect = spectral_norm(out.matrix * out.matrix - out.matrix);
    out.psi0 = psi0;
    out.projected = out.matrix * psi0.cast<cdouble>();
    out.overlap = (out.projected.array().square()).sum();

    const double re = out.trace.real();
    out.rank = static_cast<int>(std::lround(re));
    if (std::abs(out.trace - cdouble(out.rank, 0.0)) > options.rank_tolerance) {
        std::ostringstream msg;
        msg << "rank ambiguity: trace of the projection is " << out.trace;
        throw RankError(msg.str());
    }
    return out;
}

ExtensionResult extend_with(const OperatorSpec& spec, const AssembledOperator& op, const GroundState& gs,
                            const ContourSpec& contour, const HolomorphicOptions& options,
                            const Eigen::MatrixXcd* real_projection = nullptr) {
    const Eigen::MatrixXcd h = symmetric_matrix<cdouble>(op);
    const RieszProjection proj = project(h, contour, gs.vector, options);
    if (proj.rank != 1) {
        std::ostringstream msg;
        msg << "projection has rank " << proj.rank << " (trace " << proj.trace << ")";
        throw RankError(msg.str());
    }
    const double reference = options.overlap_fraction * gs.vector.squaredNorm();
    if (std::abs(proj.overlap) < reference) {
        std::ostringstream msg;
        msg << "bilinear overlap " << std::abs(proj.overlap) << " below " << reference
            << ": strip half-width exceeded at xi = " << spec.xi;
        throw StripExceededError(msg.str());
    }

    ExtensionResult r;
    r.xi = spec.xi;
    r.contour = contour;
    r.rank_diag = proj.trace;
    r.idempotency_defect = proj.idempotency_defect;
    r.overlap = proj.overlap;
    if (real_projection != nullptr) r.projection_shift = spectral_norm(proj.matrix - *real_projection);
    const Eigen::VectorXcd& v = proj.projected;
    const Eigen::VectorXcd hv = h * v;
    r.F = (hv.array() * v.array()).sum() / proj.overlap;
    r.residual = (hv - r.F * v).norm() / v.norm();
    r.mu_at_re = gs.mu1;
    r.lower_bound_slack = r.F.real() - gs.mu1 + spec.xi.imag() * spec.xi.imag();

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h, false);
    if (solver.info() != Eigen::Success) throw SolverError("complex eigensolver failed in extend_mu");
    const Eigen::VectorXcd& all = solver.eigenvalues();
    Eigen::Index best = 0;
    (all.array() - cdouble(contour.center, 0.0)).abs().minCoeff(&best);
    r.F_direct = all[best];
    if (std::abs(r.F - r.F_direct) > options.consistency_tol * std::max(1.0, std::abs(r.F))) {
        std::ostringstream msg;
        msg << "quotient " << r.F << " and direct eigenvalue " << r.F_direct << " disagree";
        throw ConsistencyError(msg.str());
    }
    return r;
}

ContourSpec contour_for(const GroundState& gs, const HolomorphicOptions& options) {
    if (options.mode == ContourMode::Global) {
        if (!(options.global_r0 > 0.0)) throw CertificationError("global contour mode requires a positive r0");
        return ContourSpec::around(gs.mu1, options.global_r0, options.contour_nodes);
    }
    const double r0 = 0.25 * (gs.mu2 - gs.mu1);
    if (!(r0 > 0.0)) throw CertificationError("non-positive local gap; cannot certify a contour");
    return ContourSpec::around(gs.mu1, r0, options.contour_nodes);
}

}  // namespace

ContourSpec ContourSpec::around(double center, double r0, int nodes) {
    ContourSpec c{center, 1.5 * r0, nodes, r0};
    c.validate();
    return c;
}

void ContourSpec::validate() const {
    if (!(r0 > 0.0)) throw CertificationError("contour r0 must be positive");
    if (!(radius > r0 && radius < 2.0 * r0)) throw ConfigError("contour radius must lie in (r0, 2 r0)");
    if (nodes < 8 || nodes % 2 != 0) throw ConfigError("contour needs an even number (>= 8) of nodes");
}

cdouble ContourSpec::node(int j) const {
    const double theta = 2.0 * std::numbers::pi * (j + 0.5) / nodes;
    return center + radius * std::polar(1.0, theta);
}

double spectral_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    return singular_values(m)[0];
}

double estimate_r0(const BandTable& band) {
    if (band.mu.cols() < 2) throw CertificationError("estimate_r0 needs at least two bands");
    const double gap = band.gaps[0];
    if (!(gap > 0.0)) throw CertificationError("first spectral gap is not positive; cannot certify r0");
    return std::min(0.25 * gap, 1.0);
}

double resolvent_norm(const AssembledOperator& op, cdouble z, double near_singular_tol) {
    const Eigen::VectorXd s = singular_values(shifted(symmetric_matrix<cdouble>(op), z));
    const double smin = s[s.size() - 1];
    if (!(smin > near_singular_tol * std::max(1.0, s[0]))) {
        std::ostringstream msg;
        msg << "z = " << z << " lies on the discrete spectrum (smallest singular value " << smin << ")";
        throw NearSingularError(msg.str());
    }
    return 1.0 / smin;
}

double weighted_resolvent_norm(const AssembledOperator& op, cdouble z, double near_singular_tol) {
    const Eigen::MatrixXcd inv =
        inverse_checked(shifted(symmetric_matrix<cdouble>(op), z), near_singular_tol, "weighted resolvent");
    return spectral_norm(op.coupling.cast<cdouble>().asDiagonal() * inv);
}

double resolvent_difference(const OperatorSpec& spec, cdouble z, const Discretization& disc,
                            double near_singular_tol) {
    const Eigen::MatrixXcd full = symmetric_matrix<cdouble>(assemble(spec, disc));
    const Eigen::MatrixXcd base = symmetric_matrix<cdouble>(assemble(spec.real_part(), disc));
    const Eigen::MatrixXcd a = inverse_checked(shifted(full, z), near_singular_tol, "resolvent at xi");
    const Eigen::MatrixXcd b = inverse_checked(shifted(base, z), near_singular_tol, "resolvent at Re xi");
    return spectral_norm(a - b);
}

ContourSpec certify_contour(const OperatorSpec& spec, const Discretization& disc, int nodes) {
    HolomorphicOptions options;
    options.contour_nodes = nodes;
    return contour_for(ground_state(assemble(spec.real_part(), disc)), options);
}

RieszProjection riesz_projection(const OperatorSpec& spec, const ContourSpec& contour, const Discretization& disc,
                                 const HolomorphicOptions& options) {
    const GroundState gs = ground_state(assemble(spec.real_part(), disc));
    return project(symmetric_matrix<cdouble>(assemble(spec, disc)), contour, gs.vector, options);
}

ExtensionResult extend_mu(const OperatorSpec& spec, const Discretization& disc, const ContourSpec& contour,
                          const HolomorphicOptions& options) {
    const GroundState gs = ground_state(assemble(spec.real_part(), disc));
    return extend_with(spec, assemble(spec, disc), gs, contour, options);
}

ExtensionResult extend_mu(const OperatorSpec& spec, const Discretization& disc, const HolomorphicOptions& options) {
    const GroundState gs = ground_state(assemble(spec.real_part(), disc));
    return extend_with(spec, assemble(spec, disc), gs, contour_for(gs, options), options);
}

double cauchy_riemann_residual(const OperatorSpec& spec, double h, const Discretization& disc,
                               const HolomorphicOptions& options) {
    if (!(h > 0.0)) throw ConfigError("cauchy_riemann_residual: spacing must be positive");
    auto F = [&](cdouble shift) { return extend_mu(spec.with_xi(spec.xi + shift), disc, options).F; };
    auto derivative = [&](cdouble unit) {
        return (-F(2.0 * h * unit) + 8.0 * F(h * unit) - 8.0 * F(-h * unit) + F(-2.0 * h * unit)) / (12.0 * h);
    };
    const cdouble dx = derivative({1.0, 0.0});
    const cdouble dy = derivative({0.0, 1.0});
    return std::abs(dy - cdouble(0.0, 1.0) * dx);
}

std::string to_string(PointStatus status) {
    switch (status) {
        case PointStatus::Ok: return "ok";
        case PointStatus::RankFailure: return "rank_failure";
        case PointStatus::StripExceeded: return "strip_exceeded";
        case PointStatus::Inconsistent: return "inconsistent";
        case PointStatus::Singular: return "singular";
        case PointStatus::SolverFailure: return "solver_failure";
    }
    return "unknown";
}

std::vector<double> uniform_grid(double from, double to, double step) {
    if (!(step > 0.0) || !(to >= from)) throw ConfigError("uniform_grid: need from <= to and step > 0");
    const auto count = static_cast<std::size_t>(std::llround((to - from) / step)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        double v = from + static_cast<double>(i) * step;
        if (std::abs(v) < 1e-9 * step) v = 0.0;
        out[i] = v;
    }
    return out;
}

StripSweep strip_sweep(const OperatorSpec& family, const SweepConfig& config, const Discretization& disc,
                       const HolomorphicOptions& options) {
    if (!(config.half_width >= 0.0) || config.half_width > config.max_half_width) {
        std::ostringstream msg;
        msg << "strip half-width " << config.half_width << " outside [0, " << config.max_half_width << "]";
        throw ConfigError(msg.str());
    }
    if (!(config.im_step > 0.0)) throw ConfigError("strip_sweep: im_step must be positive");

    StripSweep sweep;
    sweep.re_values = uniform_grid(config.re_from, config.re_to, config.re_step);
    const auto half = static_cast<long>(std::llround(config.half_width / config.im_step));
    for (long j = -half; j <= half; ++j) sweep.im_values.push_back(static_cast<double>(j) * config.im_step);
    sweep.theta0 = config.theta0;
    if (sweep.theta0 == 0.0) {
        sweep.theta0 = family.family == Family::DeGennes ? find_theta0(disc).theta0 : 0.0;
    }

    const std::size_t n_re = sweep.re_values.size();
    const std::size_t n_im = sweep.im_values.size();
    sweep.points.resize(n_re * n_im);

    // Reference states, contours and P_{Re ξ} depend on Re ξ only.
    std::vector<GroundState> states(n_re);
    std::vector<ContourSpec> contours(n_re);
    std::vector<Eigen::MatrixXcd> real_projections(n_re);
    std::vector<std::string> state_errors(n_re);
    parallel_for(n_re, [&](std::size_t i) {
        try {
            const AssembledOperator op = assemble(family.with_xi(sweep.re_values[i]), disc);
            states[i] = ground_state(op);
            contours[i] = contour_for(states[i], options);
            real_projections[i] = project(symmetric_matrix<cdouble>(op), contours[i], states[i].vector, options).matrix;
        } catch (const Error& e) {
            state_errors[i] = e.what();
        }
    });

    parallel_for(n_re * n_im, [&](std::size_t idx) {
        const std::size_t i = idx / n_im;
        const std::size_t j = idx % n_im;
        const cdouble xi(sweep.re_values[i], sweep.im_values[j]);
        SweepPoint& point = sweep.points[idx];
        point.result.xi = xi;
        point.coercive = sweep.theta0 - xi.imag() * xi.imag() > 0.0;
        if (!state_errors[i].empty()) {
            point.status = PointStatus::SolverFailure;
            point.message = state_errors[i];
            return;
        }
        try {
            const OperatorSpec spec = family.with_xi(xi);
            point.result =
                extend_with(spec, assemble(spec, disc), states[i], contours[i], options, &real_projections[i]);
        } catch (const StripExceededError& e) {
            point.status = PointStatus::StripExceeded;
            point.message = e.what();
        } catch (const ContourError& e) {
            point.status = PointStatus::RankFailure;
            point.message = e.what();
        } catch (const ConsistencyError& e) {
            point.status = PointStatus::Inconsistent;
            point.message = e.what();
        } catch (const NearSingularError& e) {
            point.status = PointStatus::Singular;
            point.message = e.what();
        } catch (const Error& e) {
            point.status = PointStatus::SolverFailure;
            point.message = e.what();
        }
    });

    SweepSummary& s = sweep.summary;
    s.worst_slack = std::numeric_limits<double>::infinity();
    s.min_overlap = std::numeric_limits<double>::infinity();
    const auto center = static_cast<std::size_t>(half);
    std::vector<bool> level_ok(static_cast<std::size_t>(half) + 1, true);
    for (std::size_t i = 0; i < n_re; ++i) {
        for (std::size_t j = 0; j < n_im; ++j) {
            const SweepPoint& p = sweep.at(i, j);
            const std::size_t level = j >= center ? j - center : center - j;
            if (!p.coercive) ++s.noncoercive;
            if (p.status != PointStatus::Ok) {
                ++s.failures;
                level_ok[level] = false;
                continue;
            }
            const ExtensionResult& r = p.result;
            s.worst_slack = std::min(s.worst_slack, r.lower_bound_slack);
            s.max_trace_defect = std::max(s.max_trace_defect, std::abs(r.rank_diag - 1.0));
            s.max_idempotency = std::max(s.max_idempotency, r.idempotency_defect);
            s.min_overlap = std::min(s.min_overlap, std::abs(r.overlap));
            s.max_residual = std::max(s.max_residual, r.residual);
            s.max_quotient_direct = std::max(s.max_quotient_direct, std::abs(r.F - r.F_direct));
            s.max_projection_shift = std::max(s.max_projection_shift, r.projection_shift);
            if (j == center) s.max_axis_imag = std::max(s.max_axis_imag, std::abs(r.F.imag()));
            const SweepPoint& mirror = sweep.at(i, n_im - 1 - j);
            if (mirror.status == PointStatus::Ok) {
                s.max_reflection = std::max(s.max_reflection, std::abs(mirror.result.F - std::conj(r.F)));
            }
        }
    }
    s.certified_half_width = -1.0;
    for (std::size_t level = 0; level < level_ok.size() && level_ok[level]; ++level) {
        s.certified_half_width = static_cast<double>(level) * config.im_step;
    }

    // Fourth-order Cauchy–Riemann residual on points with two neighbours each way.
    auto ok = [&](std::size_t i, std::size_t j) { return sweep.at(i, j).status == PointStatus::Ok; };
    auto F = [&](std::size_t i, std::size_t j) { return sweep.at(i, j).result.F; };
    for (std::size_t i = 2; i + 2 < n_re; ++i) {
        for (std::size_t j = 2; j + 2 < n_im; ++j) {
            if (!(ok(i - 2, j) && ok(i - 1, j) && ok(i + 1, j) && ok(i + 2, j) && ok(i, j - 2) && ok(i, j - 1) &&
                  ok(i, j + 1) && ok(i, j + 2))) {
                continue;
            }
            const double hx = sweep.re_values[i + 1] - sweep.re_values[i];
            const double hy = config.im_step;
            const cdouble dx = (-F(i + 2, j) + 8.0 * F(i + 1, j) - 8.0 * F(i - 1, j) + F(i - 2, j)) / (12.0 * hx);
            const cdouble dy = (-F(i, j + 2) + 8.0 * F(i, j + 1) - 8.0 * F(i, j - 1) + F(i, j - 2)) / (12.0 * hy);
            s.max_cauchy_riemann = std::max(s.max_cauchy_riemann, std::abs(dy - cdouble(0.0, 1.0) * dx));
        }
    }
    s.cauchy_riemann_ok = s.max_cauchy_riemann <= config.cauchy_riemann_tol;
    if (s.failures == sweep.points.size()) {
        s.worst_slack = 0.0;
        s.min_overlap = 0.0;
    }
    return sweep;
}

}  // namespace degennes
