#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "degennes/error.hpp"
#include "degennes/holomorphic.hpp"
#include "degennes/operator.hpp"
#include "degennes/spectrum.hpp"

namespace degennes::cli {

std::string fmt(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", value);
    return buf;
}

void write_csv(const Table& table, std::ostream& os) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
        os << '\n';
    }
    for (const auto& [key, value] : table.summary) os << "# " << key << ',' << value << '\n';
}

void write_json(const Table& table, std::ostream& os) {
    nlohmann::ordered_json doc;
    doc["command"] = table.command;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [key, value] : table.metadata) meta[key] = value;
    doc["metadata"] = meta;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto& [key, value] : table.summary) summary[key] = value;
    doc["summary"] = summary;
    doc["columns"] = table.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < row.size() && c < table.columns.size(); ++c) r[table.columns[c]] = row[c];
        rows.push_back(r);
    }
    doc["rows"] = rows;
    os << doc.dump(2) << '\n';
}

namespace {

/// Flags shared by every subcommand.
struct Common {
    std::string scheme = "colloc";
    int n_points = 0;        // 0: scheme default
    double truncation = 0.0; // 0: family default
    int contour_nodes = 32;
    std::string format = "csv";
    std::string out;
    bool to_stdout = false;
};

struct BandArgs {
    double from = -2.0, to = 4.0, step = 0.05;
    int k = 3;
};

struct Theta0Args {
    double lo = 0.0, hi = 2.0, tol = 1e-8;
};

struct ExtendArgs {
    double re_from = -2.0, re_to = 4.0, re_step = 0.1;
    double eps = 0.25, im_step = 0.05, max_eps = 0.3;
    double theta0 = 0.0;
    std::string contour = "local";
};

struct CheckArgs {
    unsigned long long seed = 20240607ULL;
    int points = 20;
};

struct AsymptoticsArgs {
    std::string side = "plus";
    int k = 1;
    std::vector<double> values;
};

struct MontgomeryArgs {
    int n = 1;
    double from = -1.0, to = 1.0, step = 0.25;
    int k = 2;
    double im = 0.0;
};

// Default sizes: the tridiagonal FD path handles large N for real ξ; complex
// ξ needs dense matrices.
constexpr int kFdRealDefault = 40000;
constexpr int kFdComplexDefault = 1000;
constexpr int kCollocationDefault = 64;

Discretization make_disc(const Common& c, bool needs_dense) {
    Discretization d;
    if (c.scheme == "fd") {
        d = Discretization::finite_difference(c.n_points > 0 ? c.n_points
                                                             : (needs_dense ? kFdComplexDefault : kFdRealDefault),
                                              c.truncation);
        if (needs_dense && d.n_points > kDenseLimit) {
            std::ostringstream msg;
            msg << "--n-points " << d.n_points << " exceeds the dense limit " << kDenseLimit
                << " required for complex parameters";
            throw ConfigError(msg.str());
        }
    } else {
        d = Discretization::collocation(c.n_points > 0 ? c.n_points : kCollocationDefault, c.truncation);
    }
    if (c.truncation < 0.0) throw ConfigError("--truncation must be >= 0 (0 selects the default)");
    d.validate();
    return d;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

void validate_grid(double from, double to, double step, const std::string& name) {
    require(std::isfinite(from) && std::isfinite(to) && from <= to, name + ": need finite --from <= --to");
    require(step > 0.0, name + ": step must be positive");
}

void validate_nodes(int nodes) {
    require(nodes >= 8 && nodes % 2 == 0, "--contour-nodes must be even and >= 8");
}

std::vector<std::pair<std::string, std::string>> metadata(const Common& c, const Discretization& d) {
    return {{"scheme", to_string(d.scheme)},
            {"n_points", std::to_string(d.n_points)},
            {"truncation", d.truncation > 0.0 ? fmt(d.truncation) : "default"},
            {"contour_nodes", std::to_string(c.contour_nodes)}};
}

std::string flag(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------- band

int cmd_band(const Common& c, const BandArgs& a, Table& t) {
    validate_grid(a.from, a.to, a.step, "band");
    require(a.k >= 1, "--k must be >= 1");
    const Discretization disc = make_disc(c, false);

    const std::vector<double> grid = uniform_grid(a.from, a.to, a.step);
    const BandTable band = band_table(OperatorSpec::de_gennes(0.0), grid, a.k, disc);

    t.metadata = metadata(c, disc);
    t.columns.push_back("xi");
    for (int k = 1; k <= a.k; ++k) t.columns.push_back("mu_" + std::to_string(k));
    for (int k = 1; k < a.k; ++k) t.columns.push_back("gap_" + std::to_string(k));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<std::string> row{fmt(grid[i])};
        for (int k = 0; k < a.k; ++k) row.push_back(fmt(band.mu(static_cast<Eigen::Index>(i), k)));
        for (int k = 0; k + 1 < a.k; ++k) {
            const auto r = static_cast<Eigen::Index>(i);
            row.push_back(fmt(band.mu(r, k + 1) - band.mu(r, k)));
        }
        t.rows.push_back(std::move(row));
    }
    t.summary.emplace_back("theta0", fmt(band.theta0));
    t.summary.emplace_back("xi0", fmt(band.xi0));
    t.summary.emplace_back("theta0_refined", flag(band.theta0_refined));
    for (Eigen::Index j = 0; j < band.gaps.size(); ++j) {
        t.summary.emplace_back("c_" + std::to_string(j + 1), fmt(band.gaps[j]));
    }
    if (a.k >= 2) t.summary.emplace_back("r0", fmt(estimate_r0(band)));
    return kExitOk;
}

// ---------------------------------------------------------------- theta0

int cmd_theta0(const Common& c, const Theta0Args& a, Table& t) {
    require(a.lo < a.hi, "theta0: need --lo < --hi");
    require(a.tol > 0.0, "theta0: --tol must be positive");
    const Discretization disc = make_disc(c, false);
    const Discretization other = disc.scheme == Scheme::Collocation
                                     ? Discretization::finite_difference(kFdRealDefault, c.truncation)
                                     : Discretization::collocation(kCollocationDefault, c.truncation);

    const Theta0Result r = find_theta0(disc, a.lo, a.hi, a.tol);
    const Theta0Result s = find_theta0(other, a.lo, a.hi, a.tol);
    const double fh = std::abs(r.theta0 - r.xi0 * r.xi0);
    const double agreement = std::abs(r.theta0 - s.theta0);

    t.metadata = metadata(c, disc);
    t.metadata.emplace_back("cross_scheme", to_string(other.scheme));
    t.metadata.emplace_back("cross_n_points", std::to_string(other.n_points));
    t.metadata.emplace_back("tol", fmt(a.tol));
    t.columns = {"key", "value"};
    t.rows = {{"theta0", fmt(r.theta0)},
              {"xi0", fmt(r.xi0)},
              {"feynman_hellmann_residual", fmt(fh)},
              {"scheme_agreement", fmt(agreement)},
              {"derivative", fmt(r.derivative)},
              {"evaluations", std::to_string(r.evaluations)}};
    const bool ok = fh <= 1e-5 && agreement <= 1e-6;
    t.summary.emplace_back("status", ok ? "pass" : "fail");
    return ok ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------- extend

struct SweepLimits {
    double slack = -1e-8;
    double axis_imag = 1e-8;
    double reflection = 1e-10;
    double trace = 1e-6;
    double idempotency = 1e-6;
    double residual = 1e-8;
    double quotient = 1e-8;
};

void sweep_rows(const StripSweep& sweep, Table& t) {
    t.columns = {"xi_re", "xi_im", "F_re", "F_im", "slack", "trace_re", "residual", "coercive", "status"};
    for (std::size_t i = 0; i < sweep.re_values.size(); ++i) {
        for (std::size_t j = 0; j < sweep.im_values.size(); ++j) {
            const SweepPoint& p = sweep.at(i, j);
            const bool ok = p.status == PointStatus::Ok;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            t.rows.push_back({fmt(sweep.re_values[i]), fmt(sweep.im_values[j]), fmt(ok ? p.result.F.real() : nan),
                              fmt(ok ? p.result.F.imag() : nan), fmt(ok ? p.result.lower_bound_slack : nan),
                              fmt(ok ? p.result.rank_diag.real() : nan), fmt(ok ? p.result.residual : nan),
                              flag(p.coercive), to_string(p.status)});
        }
    }
}

bool sweep_summary(const StripSweep& sweep, const SweepLimits& lim, Table& t) {
    const SweepSummary& s = sweep.summary;
    const bool ok = s.failures == 0 && s.worst_slack >= lim.slack && s.max_axis_imag <= lim.axis_imag &&
                    s.max_reflection <= lim.reflection && s.max_trace_defect <= lim.trace &&
                    s.max_idempotency <= lim.idempotency && s.min_overlap >= 0.5 && s.max_residual <= lim.residual &&
                    s.max_quotient_direct <= lim.quotient && s.cauchy_riemann_ok;
    t.summary.emplace_back("certified_eps", fmt(s.certified_half_width));
    t.summary.emplace_back("worst_slack", fmt(s.worst_slack));
    t.summary.emplace_back("max_trace_defect", fmt(s.max_trace_defect));
    t.summary.emplace_back("max_idempotency", fmt(s.max_idempotency));
    t.summary.emplace_back("min_overlap", fmt(s.min_overlap));
    t.summary.emplace_back("max_residual", fmt(s.max_residual));
    t.summary.emplace_back("max_quotient_direct", fmt(s.max_quotient_direct));
    t.summary.emplace_back("max_reflection", fmt(s.max_reflection));
    t.summary.emplace_back("max_axis_imag", fmt(s.max_axis_imag));
    t.summary.emplace_back("max_projection_shift", fmt(s.max_projection_shift));
    t.summary.emplace_back("max_cauchy_riemann", fmt(s.max_cauchy_riemann));
    t.summary.emplace_back("theta0", fmt(sweep.theta0));
    t.summary.emplace_back("failures", std::to_string(s.failures));
    t.summary.emplace_back("noncoercive", std::to_string(s.noncoercive));
    t.summary.emplace_back("status", ok ? "pass" : "fail");
    return ok;
}

HolomorphicOptions holomorphic_options(const Common& c) {
    HolomorphicOptions o;
    o.contour_nodes = c.contour_nodes;
    return o;
}

int cmd_extend(const Common& c, const ExtendArgs& a, Table& t, std::ostream& err) {
    validate_grid(a.re_from, a.re_to, a.re_step, "extend");
    validate_nodes(c.contour_nodes);
    require(a.eps >= 0.0 && a.eps <= a.max_eps,
            "--eps must lie in [0, --max-eps] (" + fmt(a.max_eps) + ")");
    require(a.im_step > 0.0, "--im-step must be positive");
    require(a.theta0 >= 0.0, "--theta0 must be >= 0 (0 computes it)");
    const Discretization disc = make_disc(c, true);

    SweepConfig cfg;
    cfg.re_from = a.re_from;
    cfg.re_to = a.re_to;
    cfg.re_step = a.re_step;
    cfg.half_width = a.eps;
    cfg.im_step = a.im_step;
    cfg.max_half_width = a.max_eps;
    cfg.theta0 = a.theta0;

    HolomorphicOptions opts = holomorphic_options(c);
    const OperatorSpec family = OperatorSpec::de_gennes(0.0);
    if (a.contour == "global") {
        opts.mode = ContourMode::Global;
        opts.global_r0 = estimate_r0(band_table(family, uniform_grid(a.re_from, a.re_to, a.re_step), 2, disc));
    }
    const StripSweep sweep = strip_sweep(family, cfg, disc, opts);

    t.metadata = metadata(c, disc);
    t.metadata.emplace_back("contour", a.contour);
    if (opts.mode == ContourMode::Global) t.metadata.emplace_back("r0", fmt(opts.global_r0));
    t.metadata.emplace_back("cauchy_riemann_tol", fmt(cfg.cauchy_riemann_tol));
    sweep_rows(sweep, t);
    const bool ok = sweep_summary(sweep, SweepLimits{}, t);
    for (const SweepPoint& p : sweep.points) {
        if (p.status != PointStatus::Ok) err << "extend: xi = " << p.result.xi << ": " << p.message << '\n';
    }
    return ok ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------- check

struct CheckReport {
    Table& table;
    bool all_ok = true;

    void add(const std::string& name, double measured, const std::string& relation, double threshold, bool ok) {
        table.rows.push_back({name, fmt(measured), relation + fmt(threshold), ok ? "pass" : "fail"});
        all_ok = all_ok && ok;
    }
    void info(const std::string& name, double measured, const std::string& relation, double threshold) {
        table.rows.push_back({name, fmt(measured), relation + fmt(threshold), "info"});
    }
};

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

int cmd_check(const Common& c, const CheckArgs& a, Table& t) {
    validate_nodes(c.contour_nodes);
    require(a.points >= 1, "--points must be >= 1");
    const Discretization disc = make_disc(c, true);
    t.metadata = metadata(c, disc);
    t.metadata.emplace_back("seed", std::to_string(a.seed));
    t.metadata.emplace_back("points", std::to_string(a.points));
    t.columns = {"check", "measured", "threshold", "status"};
    CheckReport report{t};

    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const Theta0Result theta = find_theta0(disc);
    const BandTable band = band_table(OperatorSpec::de_gennes(0.0), uniform_grid(-2.0, 4.0, 0.1), 2, disc);
    const double r0 = estimate_r0(band);
    t.summary.emplace_back("theta0", fmt(theta.theta0));
    t.summary.emplace_back("r0", fmt(r0));

    // Resolvent bounds at random real ξ and z on Γ_ξ.
    {
        double l2_equality = 0.0, l2_bound = 0.0, h1_excess = -std::numeric_limits<double>::infinity();
        for (int p = 0; p < a.points; ++p) {
            const double xi = 4.0 * unit(rng);
            const double angle = 2.0 * std::numbers::pi * unit(rng);
            const AssembledOperator op = assemble(OperatorSpec::de_gennes(xi), disc);
            const Eigen::VectorXd spectrum = lowest_real_eigenvalues(op, 3);
            const cdouble z = spectrum[0] + 1.5 * r0 * std::polar(1.0, angle);
            const Eigen::VectorXd all = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                            symmetric_matrix<double>(op), Eigen::EigenvaluesOnly)
                                            .eigenvalues();
            double dist = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < all.size(); ++i) dist = std::min(dist, std::abs(z - all[i]));
            const double norm = resolvent_norm(op, z);
            l2_equality = std::max(l2_equality, std::abs(norm * dist - 1.0));
            l2_bound = std::max(l2_bound, norm * r0);
            h1_excess = std::max(h1_excess, weighted_resolvent_norm(op, z) - 1.0 / std::sqrt(r0));
        }
        report.add("resolvent_l2_equality", l2_equality, "<=", 1e-8, l2_equality <= 1e-8);
        report.add("resolvent_l2_bound", l2_bound, "<=", 1.0, l2_bound <= 1.0);
        report.add("resolvent_h1_bound_excess", h1_excess, "<=", 1e-8, h1_excess <= 1e-8);

        // Outside the sampled range the weighted bound fails; reported, not enforced.
        const double xi = -2.0;
        const AssembledOperator op = assemble(OperatorSpec::de_gennes(xi), disc);
        const cdouble z = lowest_real_eigenvalues(op, 1)[0] + cdouble(0.0, 1.5 * r0);
        report.info("resolvent_h1_at_xi_-2", weighted_resolvent_norm(op, z), "bound ", 1.0 / std::sqrt(r0));
    }

    // O(ε) scaling of the resolvent difference.
    {
        const double re = 0.76;
        const double mu = lowest_real_eigenvalues(assemble(OperatorSpec::de_gennes(re), disc), 1)[0];
        const cdouble z = mu + 1.5 * r0 * std::polar(1.0, std::numbers::pi / 3.0);
        std::vector<double> eps{0.02, 0.04, 0.08, 0.16}, diff;
        for (double e : eps) diff.push_back(resolvent_difference(OperatorSpec::de_gennes({re, e}), z, disc));
        const double slope = fitted_slope(eps, diff);
        report.add("resolvent_difference_slope", slope, "1+-", 0.2, std::abs(slope - 1.0) <= 0.2);
    }

    // Coercivity of the real part of the form.
    {
        double margin = std::numeric_limits<double>::infinity();
        for (int p = 0; p < a.points; ++p) {
            const cdouble xi(-2.0 + 6.0 * unit(rng), -0.25 + 0.5 * unit(rng));
            const double measured = real_part_form_min(OperatorSpec::de_gennes(xi), disc);
            margin = std::min(margin, measured - (theta.theta0 - xi.imag() * xi.imag()));
        }
        report.add("coercivity_margin", margin, ">=", -1e-6, margin >= -1e-6);
        report.info("coercivity_at_eps_0.9", theta.theta0 - 0.81, "sign ", 0.0);
    }

    // Gap certificate.
    {
        const BandTable wide = band_table(OperatorSpec::de_gennes(0.0), uniform_grid(-10.0, 10.0, 0.1), 2, disc);
        report.add("gap_min_on_[-10,10]", wide.gaps[0], ">=", 0.1, wide.gaps[0] >= 0.1);
    }

    // Large positive ξ.
    {
        const AsymptoticTable k1 = asymptotics_plus(1, {2.0, 4.0, 6.0, 8.0}, disc);
        const AsymptoticTable k2 = asymptotics_plus(2, {2.0, 4.0, 6.0, 8.0}, disc);
        const double d1 = std::abs(k1.rows[2].value);
        const double d2 = std::abs(k2.rows[3].value);
        report.add("mu1(6)-1", d1, "<=", 1e-6, d1 <= 1e-6);
        report.add("mu2(8)-3", d2, "<=", 1e-6, d2 <= 1e-6);
        report.add("plus_monotone_k1", k1.monotone ? 1.0 : 0.0, "==", 1.0, k1.monotone);
        report.add("plus_monotone_k2", k2.monotone ? 1.0 : 0.0, "==", 1.0, k2.monotone);
    }

    // Large negative ξ.
    {
        const AsymptoticTable m = asymptotics_minus(1, {10.0, 15.0, 20.0}, disc);
        const double nu1 = m.rows[0].reference;
        const double nu1_known = std::cbrt(4.0) * 1.018792971647471;
        report.add("nu1_vs_airy_zero", std::abs(nu1 - nu1_known), "<=", 1e-6, std::abs(nu1 - nu1_known) <= 1e-6);
        const double e10 = std::abs(m.rows[0].value - nu1);
        const double e15 = std::abs(m.rows[1].value - nu1);
        const double e20 = std::abs(m.rows[2].value - nu1);
        report.add("minus_error_alpha_15", e15, "<=", 0.05, e15 <= 0.05);
        report.add("minus_error_20_minus_10", e20 - e10, "<", 0.0, e20 < e10);
    }

    // Dilation identity.
    {
        double worst = 0.0;
        for (double alpha : {2.0, 5.0, 10.0}) worst = std::max(worst, std::abs(dilation_check(alpha, 1, disc).difference()));
        report.add("dilation_max_difference", worst, "<=", 1e-5, worst <= 1e-5);
    }

    // Montgomery n = 1 at ξ = 0.
    {
        const OperatorSpec spec = OperatorSpec::montgomery(1, 0.0);
        const Eigen::VectorXd colloc =
            lowest_real_eigenvalues(assemble(spec, Discretization::collocation(kCollocationDefault)), 2);
        const Eigen::VectorXd fd =
            lowest_real_eigenvalues(assemble(spec, Discretization::finite_difference(kFdRealDefault)), 2);
        report.add("montgomery1_lowest", colloc[0], ">", 0.0, colloc[0] > 0.0);
        report.add("montgomery1_gap", colloc[1] - colloc[0], ">", 1e-6, colloc[1] - colloc[0] > 1e-6);
        const double agree = std::abs(colloc[0] - fd[0]);
        report.add("montgomery1_scheme_agreement", agree, "<=", 1e-6, agree <= 1e-6);
    }

    std::size_t failed = 0;
    for (const auto& row : t.rows) failed += row[3] == "fail";
    t.summary.emplace_back("failed", std::to_string(failed));
    t.summary.emplace_back("status", report.all_ok ? "pass" : "fail");
    return report.all_ok ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------- asymptotics

int cmd_asymptotics(const Common& c, AsymptoticsArgs a, Table& t, std::ostream& err) {
    require(a.k >= 1, "--k must be >= 1");
    const bool plus = a.side == "plus";
    if (a.values.empty()) a.values = plus ? std::vector<double>{2.0, 4.0, 6.0, 8.0} : std::vector<double>{10.0, 15.0, 20.0};
    for (double v : a.values) require(v > 0.0 && std::isfinite(v), "asymptotics: --values must be positive");
    require(std::is_sorted(a.values.begin(), a.values.end()), "asymptotics: --values must be increasing");
    const Discretization disc = make_disc(c, false);

    const AsymptoticTable table = plus ? asymptotics_plus(a.k, a.values, disc) : asymptotics_minus(a.k, a.values, disc);
    t.metadata = metadata(c, disc);
    t.metadata.emplace_back("side", a.side);
    t.metadata.emplace_back("k", std::to_string(a.k));
    t.columns = {plus ? "xi" : "alpha", "mu", "value", "reference", "deviation"};
    for (const AsymptoticRow& r : table.rows) {
        t.rows.push_back({fmt(r.parameter), fmt(r.mu), fmt(r.value), fmt(r.reference), fmt(r.value - r.reference)});
    }
    for (const std::string& w : table.warnings) err << "asymptotics: " << w << '\n';
    t.summary.emplace_back("monotone", flag(table.monotone));
    t.summary.emplace_back("warnings", std::to_string(table.warnings.size()));
    return table.monotone ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------- montgomery

int cmd_montgomery(const Common& c, const MontgomeryArgs& a, Table& t) {
    require(a.n >= 1, "--n must be >= 1");
    require(a.k >= 1, "--k must be >= 1");
    validate_grid(a.from, a.to, a.step, "montgomery");
    const bool extend = a.im != 0.0;
    if (extend) validate_nodes(c.contour_nodes);
    const Discretization disc = make_disc(c, extend);

    const OperatorSpec family = OperatorSpec::montgomery(a.n, 0.0);
    family.validate();
    const std::vector<double> grid = uniform_grid(a.from, a.to, a.step);
    const BandTable band = band_table(family, grid, a.k, disc);

    std::vector<SweepPoint> ext(extend ? grid.size() : 0);
    if (extend) {
        const HolomorphicOptions opts = holomorphic_options(c);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            ext[i].result.xi = cdouble(grid[i], a.im);
            try {
                ext[i].result = extend_mu(family.with_xi(ext[i].result.xi), disc, opts);
            } catch (const StripExceededError& e) {
                ext[i].status = PointStatus::StripExceeded;
            } catch (const ContourError& e) {
                ext[i].status = PointStatus::RankFailure;
            } catch (const ConsistencyError& e) {
                ext[i].status = PointStatus::Inconsistent;
            } catch (const Error& e) {
                ext[i].status = PointStatus::SolverFailure;
            }
        }
    }

    t.metadata = metadata(c, disc);
    t.metadata.emplace_back("n", std::to_string(a.n));
    if (extend) t.metadata.emplace_back("im", fmt(a.im));
    t.columns.push_back("xi");
    for (int k = 1; k <= a.k; ++k) t.columns.push_back("mu_" + std::to_string(k));
    for (int k = 1; k < a.k; ++k) t.columns.push_back("gap_" + std::to_string(k));
    if (extend) {
        for (const char* col : {"F_re", "F_im", "trace_re", "residual", "status"}) t.columns.emplace_back(col);
    }
    std::size_t failures = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        std::vector<std::string> row{fmt(grid[i])};
        for (int k = 0; k < a.k; ++k) row.push_back(fmt(band.mu(r, k)));
        for (int k = 0; k + 1 < a.k; ++k) row.push_back(fmt(band.mu(r, k + 1) - band.mu(r, k)));
        if (extend) {
            const bool ok = ext[i].status == PointStatus::Ok;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.push_back(fmt(ok ? ext[i].result.F.real() : nan));
            row.push_back(fmt(ok ? ext[i].result.F.imag() : nan));
            row.push_back(fmt(ok ? ext[i].result.rank_diag.real() : nan));
            row.push_back(fmt(ok ? ext[i].result.residual : nan));
            row.push_back(to_string(ext[i].status));
            failures += !ok;
        }
        t.rows.push_back(std::move(row));
    }
    const double lowest = band.mu.col(0).minCoeff();
    t.summary.emplace_back("min_mu_1", fmt(lowest));
    for (Eigen::Index j = 0; j < band.gaps.size(); ++j) {
        t.summary.emplace_back("c_" + std::to_string(j + 1), fmt(band.gaps[j]));
    }
    if (extend) t.summary.emplace_back("failures", std::to_string(failures));
    return failures == 0 ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------- plumbing

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--scheme", c.scheme, "Discretization: fd or colloc")
        ->check(CLI::IsMember({"fd", "colloc"}))
        ->capture_default_str();
    sub->add_option("--n-points", c.n_points, "Grid size (0: scheme default)")->capture_default_str();
    sub->add_option("--truncation", c.truncation, "Truncation length T (0: family default)")->capture_default_str();
    sub->add_option("--contour-nodes", c.contour_nodes, "Trapezoid nodes on the contour")->capture_default_str();
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--out", c.out, "Output file (default: <command>.<format>)");
    sub->add_flag("--stdout", c.to_stdout, "Write the output to stdout instead of a file");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"de Gennes band functions and their holomorphic extension", "degennes"};
    app.set_config("--config", "", "Config file (key = value; flags take precedence)");
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    BandArgs band;
    Theta0Args theta0;
    ExtendArgs extend;
    CheckArgs check;
    AsymptoticsArgs asym;
    MontgomeryArgs mont;

    auto* s_band = app.add_subcommand("band", "Band functions mu_k on a real grid");
    add_common(s_band, common);
    s_band->add_option("--from", band.from)->capture_default_str();
    s_band->add_option("--to", band.to)->capture_default_str();
    s_band->add_option("--step", band.step)->capture_default_str();
    s_band->add_option("--k", band.k, "Number of bands")->capture_default_str();

    auto* s_theta = app.add_subcommand("theta0", "Minimum of the first band function");
    add_common(s_theta, common);
    s_theta->add_option("--lo", theta0.lo)->capture_default_str();
    s_theta->add_option("--hi", theta0.hi)->capture_default_str();
    s_theta->add_option("--tol", theta0.tol)->capture_default_str();

    auto* s_ext = app.add_subcommand("extend", "Holomorphic extension over a strip");
    add_common(s_ext, common);
    s_ext->add_option("--re-from", extend.re_from)->capture_default_str();
    s_ext->add_option("--re-to", extend.re_to)->capture_default_str();
    s_ext->add_option("--re-step", extend.re_step)->capture_default_str();
    s_ext->add_option("--eps", extend.eps, "Strip half-width")->capture_default_str();
    s_ext->add_option("--im-step", extend.im_step)->capture_default_str();
    s_ext->add_option("--max-eps", extend.max_eps, "Largest accepted half-width")->capture_default_str();
    s_ext->add_option("--theta0", extend.theta0, "Theta0 for the coercivity flag (0: compute)")->capture_default_str();
    s_ext->add_option("--contour", extend.contour, "Contour radius: local or global")
        ->check(CLI::IsMember({"local", "global"}))
        ->capture_default_str();

    auto* s_check = app.add_subcommand("check", "Verification suite");
    add_common(s_check, common);
    s_check->add_option("--seed", check.seed)->capture_default_str();
    s_check->add_option("--points", check.points, "Random samples per check")->capture_default_str();

    auto* s_asym = app.add_subcommand("asymptotics", "Large |xi| behaviour of mu_k");
    add_common(s_asym, common);
    s_asym->add_option("--side", asym.side)->check(CLI::IsMember({"plus", "minus"}))->capture_default_str();
    s_asym->add_option("--k", asym.k)->capture_default_str();
    s_asym->add_option("--values", asym.values, "xi (plus) or alpha (minus) values")->delimiter(',');

    auto* s_mont = app.add_subcommand("montgomery", "Montgomery family on the full line");
    add_common(s_mont, common);
    s_mont->add_option("--n", mont.n)->capture_default_str();
    s_mont->add_option("--from", mont.from)->capture_default_str();
    s_mont->add_option("--to", mont.to)->capture_default_str();
    s_mont->add_option("--step", mont.step)->capture_default_str();
    s_mont->add_option("--k", mont.k)->capture_default_str();
    s_mont->add_option("--im", mont.im, "Imaginary part for the extension (0: none)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    Table table;
    int code = kExitOk;
    try {
        if (s_band->parsed()) {
            table.command = "band";
            code = cmd_band(common, band, table);
        } else if (s_theta->parsed()) {
            table.command = "theta0";
            code = cmd_theta0(common, theta0, table);
        } else if (s_ext->parsed()) {
            table.command = "extend";
            code = cmd_extend(common, extend, table, err);
        } else if (s_check->parsed()) {
            table.command = "check";
            code = cmd_check(common, check, table);
        } else if (s_asym->parsed()) {
            table.command = "asymptotics";
            code = cmd_asymptotics(common, asym, table, err);
        } else {
            table.command = "montgomery";
            code = cmd_montgomery(common, mont, table);
        }
    } catch (const ConfigError& e) {
        err << "degennes: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "degennes: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "degennes " << table.command << ": " << e.what() << '\n';
        return kExitNumerical;
    }

    auto emit = [&](std::ostream& os) {
        if (common.format == "json") {
            write_json(table, os);
        } else {
            write_csv(table, os);
        }
    };
    if (common.to_stdout) {
        emit(out);
    } else {
        const std::string path = common.out.empty() ? table.command + "." + common.format : common.out;
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if (!file) {
            err << "degennes: cannot open " << path << " for writing\n";
            return kExitNumerical;
        }
        emit(file);
        if (!file) {
            err << "degennes: write to " << path << " failed\n";
            return kExitNumerical;
        }
    }
    if (code == kExitVerification) err << "degennes " << table.command << ": verification failed\n";
    return code;
}

}  // namespace degennes::cli
