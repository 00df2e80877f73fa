#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "airy_oracle.hpp"
#include "degennes/error.hpp"
#include "degennes/spectrum.hpp"

using namespace degennes;

namespace {

// Minimum of the first band function, frozen from the collocation and
// N = 40000 finite-difference searches (they agree to ~1e-8).
constexpr double kTheta0 = 0.590106125;
constexpr double kXi0 = 0.768183653;

}  // namespace

TEST_CASE("Airy comparison eigenvalues match the Ai' zeros") {
    const std::vector<double> nu = oracle::airy_comparison_nu(3);
    CHECK(nu[0] == doctest::Approx(1.61723303).epsilon(1e-8));
    const Eigen::VectorXd computed = airy_comparison_eigenvalues(3, Discretization::collocation(64));
    for (int k = 0; k < 3; ++k) CHECK(std::abs(computed[k] - nu[k]) < 1e-8);
    const Eigen::VectorXd fd = airy_comparison_eigenvalues(2, Discretization::finite_difference(40000));
    for (int k = 0; k < 2; ++k) CHECK(std::abs(fd[k] - nu[k]) < 1e-6);
}

TEST_CASE("eigs on real and complex parameters") {
    const Discretization disc = Discretization::collocation(64);
    const SpectrumResult real = eigs(assemble(OperatorSpec::de_gennes(0.0), disc), 3);
    REQUIRE(real.count() >= 3);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(real.eigenvalues[k] - cdouble(4.0 * k + 1.0, 0.0)) < 1e-10);
    CHECK(real.residual_norms.maxCoeff() < 1e-8);

    const cdouble xi(0.5, 0.15);
    const SpectrumResult a = eigs(assemble(OperatorSpec::de_gennes(xi), disc), 3);
    const SpectrumResult b = eigs(assemble(OperatorSpec::de_gennes(std::conj(xi)), disc), 3);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(a.eigenvalues[k] - std::conj(b.eigenvalues[k])) < 1e-10);

    CHECK_THROWS_AS(eigs(assemble(OperatorSpec::de_gennes(0.0), Discretization::collocation(16)), 5), ConfigError);

    const SpectrumResult fd = eigs(assemble(OperatorSpec::de_gennes(0.0), Discretization::finite_difference(40000)), 3);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(fd.eigenvalues[k].real() - (4.0 * k + 1.0)) < 1e-6);
}

TEST_CASE("ground state is normalized with a positive mean") {
    const GroundState gs = ground_state(assemble(OperatorSpec::de_gennes(0.4), Discretization::collocation(64)));
    CHECK(gs.vector.norm() == doctest::Approx(1.0));
    CHECK(gs.vector.sum() > 0.0);
    CHECK(gs.mu2 > gs.mu1);
}

TEST_CASE("Hellmann-Feynman derivative matches finite differences") {
    const Discretization disc = Discretization::collocation(64);
    const double xi = 0.3, h = 1e-4;
    const AssembledOperator op = assemble(OperatorSpec::de_gennes(xi), disc);
    const double d = parameter_derivative(op, ground_state(op).vector.cast<cdouble>()).real();
    const auto mu = [&](double x) { return band_values(OperatorSpec::de_gennes(x), disc, 1)[0]; };
    CHECK(d == doctest::Approx((mu(xi + h) - mu(xi - h)) / (2.0 * h)).epsilon(1e-7));
}

TEST_CASE("theta0 search") {
    const Theta0Result c = find_theta0(Discretization::collocation(64));
    CHECK(c.theta0 == doctest::Approx(kTheta0).epsilon(1e-8));
    CHECK(c.xi0 == doctest::Approx(kXi0).epsilon(1e-8));
    CHECK(std::abs(c.theta0 - c.xi0 * c.xi0) < 1e-9);
    CHECK(std::abs(c.derivative) < 1e-8);

    const Theta0Result f = find_theta0(Discretization::finite_difference(40000));
    CHECK(std::abs(f.theta0 - c.theta0) < 1e-6);
    CHECK(std::abs(f.theta0 - f.xi0 * f.xi0) < 1e-5);

    CHECK_THROWS_AS(find_theta0(Discretization::collocation(64), 1.0, 2.0), BracketError);
    CHECK_THROWS_AS(find_theta0(Discretization::collocation(64), 2.0, 1.0), BracketError);
}

TEST_CASE("band table") {
    const std::vector<double> grid{-2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 4.0};
    const BandTable t = band_table(OperatorSpec::de_gennes(0.0), grid, 3, Discretization::collocation(64));
    CHECK(t.mu.rows() == 7);
    CHECK(t.mu.cols() == 3);
    CHECK(t.mu(2, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(t.theta0_refined);
    CHECK(t.theta0 == doctest::Approx(kTheta0).epsilon(1e-8));
    CHECK(t.gaps[0] > 0.0);
    CHECK_THROWS_AS(band_table(OperatorSpec::de_gennes(0.0), {1.0, 0.0}, 2, Discretization::collocation()), ConfigError);

    // Minimum at an end point: reported unrefined.
    const BandTable edge = band_table(OperatorSpec::de_gennes(0.0), {1.0, 2.0, 3.0}, 1, Discretization::collocation());
    CHECK_FALSE(edge.theta0_refined);
    CHECK(edge.xi0 == 1.0);
}

TEST_CASE("band table does not depend on the worker count") {
    const std::vector<double> grid{-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
    setenv("DEGENNES_NUM_THREADS", "1", 1);
    const BandTable one = band_table(OperatorSpec::de_gennes(0.0), grid, 2, Discretization::collocation(48));
    setenv("DEGENNES_NUM_THREADS", "4", 1);
    const BandTable four = band_table(OperatorSpec::de_gennes(0.0), grid, 2, Discretization::collocation(48));
    unsetenv("DEGENNES_NUM_THREADS");
    CHECK(one.mu == four.mu);
    CHECK(one.theta0 == four.theta0);
}

TEST_CASE("large positive xi") {
    const Discretization disc = Discretization::collocation(64);
    const AsymptoticTable k1 = asymptotics_plus(1, {2.0, 4.0, 6.0, 8.0}, disc);
    const AsymptoticTable k2 = asymptotics_plus(2, {2.0, 4.0, 6.0, 8.0}, disc);
    CHECK(std::abs(k1.rows[2].value) <= 1e-6);
    CHECK(std::abs(k2.rows[3].value) <= 1e-6);
    CHECK(k1.monotone);
    CHECK(k2.monotone);
    CHECK(k2.rows[0].reference == 3.0);
    CHECK_THROWS_AS(asymptotics_plus(1, {4.0, 2.0}, disc), ConfigError);
}

TEST_CASE("large negative xi") {
    const Discretization disc = Discretization::collocation(64);
    const AsymptoticTable t = asymptotics_minus(1, {10.0, 15.0, 20.0}, disc);
    const double nu1 = oracle::airy_comparison_nu(1)[0];
    CHECK(t.rows[0].reference == doctest::Approx(nu1).epsilon(1e-9));
    CHECK(std::abs(t.rows[1].value - nu1) <= 0.05);
    CHECK(std::abs(t.rows[2].value - nu1) < std::abs(t.rows[0].value - nu1));
    CHECK(t.monotone);
    CHECK(t.warnings.empty());
    CHECK_THROWS_AS(asymptotics_minus(1, {1.0, 2.0}, disc), ConfigError);
}

TEST_CASE("gap stays open on [-10, 10]") {
    std::vector<double> grid;
    for (int i = -100; i <= 100; ++i) grid.push_back(0.1 * i);
    const BandTable t = band_table(OperatorSpec::de_gennes(0.0), grid, 2, Discretization::collocation(64));
    CHECK(t.gaps[0] >= 0.1);
}
