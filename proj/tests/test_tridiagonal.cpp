#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "degennes/quadrature.hpp"
#include "degennes/tridiagonal.hpp"

using namespace degennes;

namespace {

SymmetricTridiagonal random_tridiagonal(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SymmetricTridiagonal t;
    t.diag.resize(n);
    t.off.resize(n - 1);
    for (int i = 0; i < n; ++i) t.diag[i] = 4.0 * u(rng);
    for (int i = 0; i + 1 < n; ++i) t.off[i] = u(rng);
    return t;
}

}  // namespace

TEST_CASE("sturm count matches dense eigenvalues") {
    const SymmetricTridiagonal t = random_tridiagonal(40, 7);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t.dense()).eigenvalues();
    for (double x : {-5.0, -1.0, 0.0, 0.3, 2.0, 6.0}) {
        Eigen::Index expected = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) expected += ev[i] < x;
        CHECK(sturm_count(t, x) == expected);
    }
}

TEST_CASE("bisection reproduces the lowest eigenvalues") {
    const SymmetricTridiagonal t = random_tridiagonal(60, 11);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t.dense()).eigenvalues();
    const Eigen::VectorXd low = lowest_eigenvalues(t, 5);
    REQUIRE(low.size() == 5);
    for (int k = 0; k < 5; ++k) CHECK(low[k] == doctest::Approx(ev[k]).epsilon(1e-13));
}

TEST_CASE("inverse iteration returns a unit eigenvector") {
    const SymmetricTridiagonal t = random_tridiagonal(80, 3);
    const Eigen::VectorXd low = lowest_eigenvalues(t, 2);
    for (int k = 0; k < 2; ++k) {
        const Eigen::VectorXd v = inverse_iteration(t, low[k]);
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK((t.apply(v) - low[k] * v).norm() < 1e-11);
    }
}

TEST_CASE("apply agrees with the dense product") {
    const SymmetricTridiagonal t = random_tridiagonal(25, 5);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(25, -1.0, 2.0);
    CHECK((t.apply(x) - t.dense() * x).norm() < 1e-13);
    CHECK(t.norm_inf() == doctest::Approx(t.dense().cwiseAbs().rowwise().sum().maxCoeff()));
}

TEST_CASE("Lobatto rule integrates and differentiates polynomials exactly") {
    const int n = 12;
    const LobattoRule rule = lobatto_rule(n);
    REQUIRE(rule.nodes.size() == n + 1);
    CHECK(rule.nodes[0] == doctest::Approx(-1.0));
    CHECK(rule.nodes[n] == doctest::Approx(1.0));
    for (int p = 0; p <= 2 * n - 1; ++p) {
        const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
        const double quad = (rule.weights.array() * rule.nodes.array().pow(p)).sum();
        CHECK(quad == doctest::Approx(exact).epsilon(1e-13));
    }
    const Eigen::VectorXd f = rule.nodes.array().pow(7);
    const Eigen::VectorXd df = 7.0 * rule.nodes.array().pow(6);
    CHECK((rule.diff * f - df).cwiseAbs().maxCoeff() < 1e-11);
}
