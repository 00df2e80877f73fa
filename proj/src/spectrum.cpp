#include "degennes/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "degennes/error.hpp"
#include "degennes/parallel.hpp"

namespace degennes {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct RealPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    double norm_inf = 0.0;
};

RealPairs lowest_pairs(const AssembledOperator& op, Eigen::Index k, bool with_vectors) {
    if (!op.is_real()) throw DomainError("real eigensolver called for complex parameter");
    RealPairs out;
    if (op.is_banded()) {
        const SymmetricTridiagonal t = symmetric_tridiagonal(op);
        out.norm_inf = t.norm_inf();
        out.values = lowest_eigenvalues(t, k);
        if (with_vectors) {
            out.vectors.resize(op.size(), k);
            for (Eigen::Index j = 0; j < k; ++j) out.vectors.col(j) = inverse_iteration(t, out.values[j]);
        }
        return out;
    }
    const Eigen::MatrixXd h = symmetric_matrix<double>(op);
    out.norm_inf = h.cwiseAbs().rowwise().sum().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        h, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "self-adjoint eigensolver failed (n=" << h.rows() << ", ||H||_inf=" << out.norm_inf << ")";
        throw SolverError(msg.str());
    }
    out.values = solver.eigenvalues().head(k);
    if (with_vectors) out.vectors = solver.eigenvectors().leftCols(k);
    return out;
}

double tail_mass(const Eigen::VectorXcd& v, int tail_points) {
    const Eigen::Index m = std::min<Eigen::Index>(tail_points, v.size());
    return v.tail(m).squaredNorm() / v.squaredNorm();
}

double mean_sign(const AssembledOperator& op, const Eigen::VectorXd& weighted) {
    return op.mass.cwiseSqrt().dot(weighted) >= 0.0 ? 1.0 : -1.0;
}

}  // namespace

SpectrumResult eigs(const AssembledOperator& op, int k_max, const EigenOptions& options) {
    const Eigen::Index n = op.size();
    if (k_max < 1 || k_max > n / 4) {
        throw ConfigError("eigs: k_max must lie in [1, N/4] = [1, " + std::to_string(n / 4) + "], got " +
                          std::to_string(k_max));
    }
    const Eigen::Index want = std::min<Eigen::Index>(k_max + std::max(options.extra, 0), n);

    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd residuals(want);
    double norm_inf = 0.0;

    if (op.is_real()) {
        RealPairs pairs = lowest_pairs(op, want, true);
        norm_inf = pairs.norm_inf;
        values = pairs.values.cast<cdouble>();
        vectors = pairs.vectors.cast<cdouble>();
        if (op.is_banded()) {
            const SymmetricTridiagonal t = symmetric_tridiagonal(op);
            for (Eigen::Index j = 0; j < want; ++j) {
                const Eigen::VectorXd v = pairs.vectors.col(j);
                residuals[j] = (t.apply(v) - pairs.values[j] * v).norm() / v.norm();
            }
        } else {
            const Eigen::MatrixXd h = symmetric_matrix<double>(op);
            for (Eigen::Index j = 0; j < want; ++j) {
                const Eigen::VectorXd v = pairs.vectors.col(j);
                residuals[j] = (h * v - pairs.values[j] * v).norm() / v.norm();
            }
        }
    } else {
        const Eigen::MatrixXcd h = symmetric_matrix<cdouble>(op);
        norm_inf = h.cwiseAbs().rowwise().sum().maxCoeff();
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h, true);
        if (solver.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "complex eigensolver failed (n=" << n << ", ||H||_inf=" << norm_inf << ")";
            throw SolverError(msg.str());
        }
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        const Eigen::VectorXcd& all = solver.eigenvalues();
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return all[a].real() < all[b].real();
        });
        values.resize(want);
        vectors.resize(n, want);
        for (Eigen::Index j = 0; j < want; ++j) {
            values[j] = all[order[static_cast<std::size_t>(j)]];
            vectors.col(j) = solver.eigenvectors().col(order[static_cast<std::size_t>(j)]).normalized();
            residuals[j] = (h * vectors.col(j) - values[j] * vectors.col(j)).norm();
        }
    }

    const double residual_limit = std::max(options.residual_tol, 100.0 * kEps * norm_inf);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < want && static_cast<int>(keep.size()) < k_max; ++j) {
        if (residuals[j] > residual_limit) continue;
        if (tail_mass(vectors.col(j), options.tail_points) > options.tail_mass_tol) continue;
        keep.push_back(j);
    }
    if (static_cast<int>(keep.size()) < k_max) {
        std::ostringstream msg;
        msg << "only " << keep.size() << " of " << k_max << " eigenpairs passed the retention guard (n=" << n
            << ", ||H||_inf=" << norm_inf << ", residual limit " << residual_limit << ")";
        throw SolverError(msg.str());
    }

    SpectrumResult result;
    result.eigenvalues.resize(k_max);
    result.eigenvectors.resize(n, k_max);
    result.residual_norms.resize(k_max);
    for (int j = 0; j < k_max; ++j) {
        result.eigenvalues[j] = values[keep[static_cast<std::size_t>(j)]];
        result.eigenvectors.col(j) = vectors.col(keep[static_cast<std::size_t>(j)]);
        result.residual_norms[j] = residuals[keep[static_cast<std::size_t>(j)]];
    }
    return result;
}

Eigen::VectorXd lowest_real_eigenvalues(const AssembledOperator& op, int k) {
    if (k < 1 || k > op.size()) throw ConfigError("lowest_real_eigenvalues: invalid k");
    return lowest_pairs(op, k, false).values;
}

GroundState ground_state(const AssembledOperator& op) {
    const SpectrumResult spec = eigs(op, 2);
    GroundState gs;
    gs.mu1 = spec.eigenvalues[0].real();
    gs.mu2 = spec.eigenvalues[1].real();
    gs.vector = spec.eigenvectors.col(0).real().normalized();
    gs.vector *= mean_sign(op, gs.vector);
    return gs;
}

cdouble parameter_derivative(const AssembledOperator& op, const Eigen::VectorXcd& weighted) {
    if (op.spec.family == Family::AiryComparison) return 0.0;
    const Eigen::VectorXcd dv =
        -2.0 * (op.coupling.cast<cdouble>().array() - cdouble(0.0, op.spec.xi.imag())).matrix();
    const cdouble num = (weighted.array().square() * dv.array()).sum();
    const cdouble den = weighted.array().square().sum();
    return num / den;
}

Eigen::VectorXd band_values(const OperatorSpec& spec, const Discretization& disc, int k_max) {
    if (spec.xi.imag() != 0.0) throw DomainError("band_values requires real xi");
    return eigs(assemble(spec, disc), k_max).eigenvalues.real();
}

Theta0Result find_theta0(const Discretization& disc, double lo, double hi, double tol) {
    if (!(lo < hi)) throw BracketError("find_theta0: empty search interval");
    if (!(tol > 0.0)) throw ConfigError("find_theta0: tolerance must be positive");
    Theta0Result result;

    struct Sample {
        double mu;
        double slope;
    };
    auto sample = [&](double xi) {
        ++result.evaluations;
        const AssembledOperator op = assemble(OperatorSpec::de_gennes(xi), disc);
        const RealPairs pair = lowest_pairs(op, 1, true);
        const Eigen::VectorXcd v = pair.vectors.col(0).cast<cdouble>();
        return Sample{pair.values[0], parameter_derivative(op, v).real()};
    };

    const Sample at_lo = sample(lo);
    const Sample at_hi = sample(hi);
    if (!(at_lo.slope < 0.0 && at_hi.slope > 0.0)) {
        std::ostringstream msg;
        msg << "no interior minimum of mu in [" << lo << ", " << hi << "]: dmu/dxi = " << at_lo.slope << " at "
            << lo << ", " << at_hi.slope << " at " << hi;
        throw BracketError(msg.str());
    }

    // Golden section down to a coarse bracket.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = sample(c).mu;
    double fd = sample(d).mu;
    const double coarse = std::max(1e-3, tol);
    while (b - a > coarse) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sample(c).mu;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sample(d).mu;
        }
    }

    // Illinois regula falsi on dμ/dξ inside [a, b].
    Sample sa = sample(a);
    Sample sb = sample(b);
    if (!(sa.slope < 0.0 && sb.slope > 0.0)) {
        a = lo;
        b = hi;
        sa = at_lo;
        sb = at_hi;
    }
    double ga = sa.slope;
    double gb = sb.slope;
    double x = 0.5 * (a + b);
    Sample sx = sample(x);
    int side = 0;
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        x = (a * gb - b * ga) / (gb - ga);
        if (!(x > a && x < b)) x = 0.5 * (a + b);
        sx = sample(x);
        if (sx.slope == 0.0) {
            a = b = x;
            break;
        }
        if (sx.slope < 0.0) {
            a = x;
            ga = sx.slope;
            if (side == -1) gb *= 0.5;
            side = -1;
        } else {
            b = x;
            gb = sx.slope;
            if (side == 1) ga *= 0.5;
            side = 1;
        }
    }
    result.xi0 = x;
    result.theta0 = sx.mu;
    result.derivative = sx.slope;
    return result;
}

BandTable band_table(const OperatorSpec& family, const std::vector<double>& xi_grid, int k_max,
                     const Discretization& disc) {
    if (xi_grid.empty()) throw ConfigError("band_table: empty grid");
    if (!std::is_sorted(xi_grid.begin(), xi_grid.end())) throw ConfigError("band_table: grid must be sorted");
    if (k_max < 1) throw ConfigError("band_table: k_max must be positive");

    BandTable table;
    table.xi_grid = xi_grid;
    table.mu.resize(static_cast<Eigen::Index>(xi_grid.size()), k_max);
    parallel_for(xi_grid.size(), [&](std::size_t i) {
        try {
            table.mu.row(static_cast<Eigen::Index>(i)) =
                band_values(family.with_xi(xi_grid[i]), disc, k_max).transpose();
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "at xi = " << xi_grid[i] << ": " << e.what();
            throw SolverError(msg.str());
        }
    });

    table.gaps.resize(std::max(k_max - 1, 0));
    for (int j = 0; j + 1 < k_max; ++j) table.gaps[j] = (table.mu.col(j + 1) - table.mu.col(j)).minCoeff();

    Eigen::Index imin = 0;
    table.theta0 = table.mu.col(0).minCoeff(&imin);
    table.xi0 = xi_grid[static_cast<std::size_t>(imin)];
    const auto last = static_cast<Eigen::Index>(xi_grid.size()) - 1;
    if (family.family == Family::DeGennes && imin > 0 && imin < last) {
        const Theta0Result refined = find_theta0(disc, xi_grid[static_cast<std::size_t>(imin - 1)],
                                                 xi_grid[static_cast<std::size_t>(imin + 1)]);
        table.theta0 = refined.theta0;
        table.xi0 = refined.xi0;
        table.theta0_refined = true;
    }
    return table;
}

AsymptoticTable asymptotics_plus(int k, const std::vector<double>& xi_list, const Discretization& disc) {
    if (k < 1) throw ConfigError("asymptotics_plus: k is 1-based");
    for (std::size_t i = 0; i < xi_list.size(); ++i) {
        if (xi_list[i] < 0.0 || (i > 0 && !(xi_list[i] > xi_list[i - 1]))) {
            throw ConfigError("asymptotics_plus: xi list must be increasing and non-negative");
        }
    }
    AsymptoticTable table;
    table.k = k;
    table.rows.resize(xi_list.size());
    parallel_for(xi_list.size(), [&](std::size_t i) {
        const double mu = band_values(OperatorSpec::de_gennes(xi_list[i]), disc, k)[k - 1];
        table.rows[i] = {xi_list[i], mu, mu - (2.0 * k - 1.0), 2.0 * k - 1.0};
    });
    table.monotone = true;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const double prev = std::abs(table.rows[i - 1].value);
        const double cur = std::abs(table.rows[i].value);
        const bool both_at_floor = prev <= kDeviationFloor && cur <= kDeviationFloor;
        if (!(cur < prev) && !both_at_floor) table.monotone = false;
    }
    return table;
}

Eigen::VectorXd airy_comparison_eigenvalues(int k_max, const Discretization& disc) {
    return eigs(assemble(OperatorSpec::airy_comparison(), disc), k_max).eigenvalues.real();
}

AsymptoticTable asymptotics_minus(int k, const std::vector<double>& alpha_list, const Discretization& disc) {
    if (k < 1) throw ConfigError("asymptotics_minus: k is 1-based");
    for (std::size_t i = 0; i < alpha_list.size(); ++i) {
        if (alpha_list[i] < 2.0 || (i > 0 && !(alpha_list[i] > alpha_list[i - 1]))) {
            throw ConfigError("asymptotics_minus: alpha list must be increasing and >= 2");
        }
    }
    Discretization airy_disc = disc;
    airy_disc.truncation = 0.0;
    const double nu = airy_comparison_eigenvalues(k, airy_disc)[k - 1];

    AsymptoticTable table;
    table.k = k;
    table.rows.resize(alpha_list.size());
    std::vector<std::string> warnings(alpha_list.size());
    parallel_for(alpha_list.size(), [&](std::size_t i) {
        const double alpha = alpha_list[i];
        const AssembledOperator op = assemble(OperatorSpec::de_gennes(-alpha), disc);
        const double mu = eigs(op, k).eigenvalues[k - 1].real();
        table.rows[i] = {alpha, mu, (mu - alpha * alpha) / std::pow(alpha, 2.0 / 3.0), nu};
        // The low states live within a few (2α)^{-1/3} of t = 0.
        const double scale = std::pow(2.0 * alpha, -1.0 / 3.0);
        if (op.nodes[1] - op.nodes[0] > 0.25 * scale) {
            std::ostringstream msg;
            msg << "alpha = " << alpha << ": grid spacing " << op.nodes[1] - op.nodes[0]
                << " near t = 0 does not resolve the boundary layer of width " << scale;
            warnings[i] = msg.str();
        }
    });
    for (auto& w : warnings) {
        if (!w.empty()) table.warnings.push_back(std::move(w));
    }
    table.monotone = true;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const double prev = std::abs(table.rows[i - 1].value - nu);
        const double cur = std::abs(table.rows[i].value - nu);
        if (!(cur < prev)) table.monotone = false;
    }
    return table;
}

}  // namespace degennes
