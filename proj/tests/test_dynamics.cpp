#include "gravwit/dynamics.hpp"
#include "gravwit/expm.hpp"
#include "gravwit/model.hpp"
#include "gravwit/witness.hpp"

#include "support/gen.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <numbers>

using namespace gravwit;

namespace {

constexpr double sqrt2 = std::numbers::sqrt2;
const cplx minus_i{0.0, -1.0};

Matrix random_matrix(gen::Rng& rng, Eigen::Index n) {
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = gen::complex_normal(rng);
    return m;
}

std::array<double, 4> ingredients(const WitnessReport& r) { return {r.lhs_abs, r.o1, r.o2, r.o3}; }

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("expm matches the spectral exponential of Hermitian generators") {
    gen::Rng rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = static_cast<Eigen::Index>(gen::integer(rng, 1, 24));
        const Matrix a = random_matrix(rng, n);
        const Matrix h = 0.5 * (a + a.adjoint()) * gen::log_uniform(rng, 1e-3, 20.0);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
        const Vector phases = (minus_i * eig.eigenvalues().cast<cplx>()).array().exp();
        const Matrix expected = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
        const Matrix u = linalg::expm(minus_i * h);
        CHECK((u - expected).cwiseAbs().maxCoeff() < 1e-11);
        CHECK((u * u.adjoint() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("expm of nilpotent and non-normal matrices") {
    Matrix n = Matrix::Zero(3, 3);
    n(0, 1) = 2.0;
    n(1, 2) = 3.0;
    n(0, 2) = cplx{0.0, 1.0};
    Matrix expected = Matrix::Identity(3, 3) + n + 0.5 * n * n;
    CHECK((linalg::expm(n) - expected).cwiseAbs().maxCoeff() < 1e-14);

    gen::Rng rng(67);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix a = random_matrix(rng, 8) * gen::uniform(rng, 0.1, 3.0);
        const Matrix ea = linalg::expm(a), eb = linalg::expm(-a);
        const double scale = ea.norm() * eb.norm();
        CHECK((ea * eb - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-13 * scale);
    }
    CHECK((linalg::expm(Matrix::Zero(4, 4)) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exact evolution at zero coupling is the vacuum") {
    const auto ev = evolve_exact(0.0, 0.0, default_space());
    CHECK(ev.state.amplitudes() == vacuum(default_space()).amplitudes());
    CHECK(ev.leakage.total == 0.0);
}

TEST_CASE("exact evolution reproduces first-order amplitudes at small coupling") {
    const FockSpace s = default_space();
    const double eps = 1e-3;
    const StateVector psi = evolve_exact(eps, 0.0, s).state;
    CHECK(std::abs(psi[s.index({1, 0, 0})] - minus_i * eps) < 10 * eps * eps);
    CHECK(std::abs(psi[s.index({1, 0, 2})] - minus_i * sqrt2 * eps) < 10 * eps * eps);
    CHECK(std::abs(psi[s.index({0, 1, 0})]) == 0.0);
}

TEST_CASE("first-order state") {
    const FockSpace s = default_space();
    const StateVector zero = evolve_first_order(0.0, 0.0, s);
    CHECK(zero.amplitudes() == vacuum(s).amplitudes());

    const StateVector psi = evolve_first_order(0.01, 0.0, s);
    CHECK(psi.normalization() == Normalization::unnormalized);
    CHECK(psi[s.index({1, 0, 2})] == cplx{0.0, -0.01 * sqrt2});
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < s.dim(); ++i) nonzero += psi[i] != cplx{};
    CHECK(nonzero == 3);

    gen::Rng rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        const double e1 = gen::uniform(rng, -0.1, 0.1);
        const double e2 = gen::uniform(rng, -0.1, 0.1);
        const double n2 = std::pow(evolve_first_order(e1, e2, s).norm(), 2);
        CHECK(std::abs(n2 - (1.0 + 3.0 * e1 * e1 + 3.0 * e2 * e2)) < 1e-15);
    }

    CHECK_THROWS_AS(evolve_first_order(0.1, 0.1, make_space(2, 2, 2)), std::invalid_argument);
    CHECK_THROWS_AS(evolve_first_order(0.1, 0.1, make_space(1, 2, 3)), std::invalid_argument);
    CHECK_NOTHROW(evolve_first_order(0.1, 0.1, make_space(2, 2, 3)));
}

TEST_CASE("exact minus first-order state is second order") {
    const FockSpace s = default_space();
    const std::array<double, 3> grid{1e-2, 1e-3, 1e-4};
    const OrderFit fit = fit_leading_order(
        [&](double eps) {
            return (evolve_exact(eps, eps, s).state.amplitudes() - evolve_first_order(eps, eps, s).amplitudes()).norm();
        },
        grid);
    CHECK(fit.exponent == doctest::Approx(2.0).epsilon(0.05));
    CHECK(fit.r2 > 0.999);
}

TEST_CASE("unitarity up to eps = 0.1") {
    const FockSpace s = default_space();
    EvolveOptions loose;
    loose.leakage_threshold = 1.0;
    for (double eps : {1e-4, 1e-3, 1e-2, 5e-2, 0.1}) {
        const auto ev = evolve_exact(eps, -0.5 * eps, s, loose);
        CHECK(std::abs(ev.state.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("leakage diagnostic") {
    const FockSpace s = default_space();
    const auto ev = evolve_exact(1e-2, 1e-2, s);
    CHECK(ev.leakage.total < 1e-8);
    CHECK(ev.leakage.of(Mode::g1) > 0.0);
    CHECK(ev.leakage.of(Mode::m) == 0.0);  // only even oscillator levels are reachable

    try {
        evolve_exact(0.3, 0.0, s);
        FAIL("expected CutoffTooSmall");
    } catch (const CutoffTooSmall& e) {
        CHECK(e.mode() == Mode::g1);
        CHECK(e.probability() > 1e-8);
    }
    try {
        evolve_exact(0.0, 0.3, s);
        FAIL("expected CutoffTooSmall");
    } catch (const CutoffTooSmall& e) {
        CHECK(e.mode() == Mode::g2);
    }
    const StateVector top = basis_state(s, {3, 0, 7});
    const Leakage l = leakage(top);
    CHECK(l.total == 1.0);
    CHECK(l.of(Mode::g1) == 1.0);
    CHECK(l.of(Mode::m) == 1.0);
    CHECK(l.of(Mode::g2) == 0.0);
}

TEST_CASE("raising the oscillator cutoff leaves witness ingredients unchanged") {
    const FockSpace small = make_space(4, 4, 8);
    const FockSpace large = make_space(4, 4, 16);
    auto worst_change = [&](double eps) {
        const auto a = ingredients(report_on_state(evolve_exact(eps, eps, small).state));
        const auto b = ingredients(report_on_state(evolve_exact(eps, eps, large).state));
        double worst = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]) / std::abs(b[k]));
        return worst;
    };
    CHECK(worst_change(1e-3) < 1e-10);
    CHECK(worst_change(1e-4) < 1e-10);
    CHECK(worst_change(1e-2) < 1e-6);
}

TEST_CASE("first-order expectations") {
    const FockSpace s = default_space();
    const auto [h1, h2] = build_h1_h2(s);
    const double e1 = 1e-3, e2 = 2e-3;
    const Operator h = e1 * h1 + e2 * h2;

    CHECK(std::abs(expect_first_order(identity(s), h, 1.0) - 1.0) < 1e-15);
    const cplx a = expect_first_order(witness_operator_A(s), h, 1.0);
    CHECK(std::abs(a - cplx{0.0, -2.0 * (e1 + e2)}) < 1e-15);

    const WitnessOperators ops(s);
    for (Bipartition b : all_bipartitions) {
        const Operator& second = ops.split(b).second;
        const Operator& first = ops.split(b).first;
        const Operator& gram = b == Bipartition::m_vs_g1g2 ? first : second;
        CHECK(std::abs(expect_first_order(gram.adjoint() * gram, h, 1.0)) < 1e-15);
    }

    const Operator wrong = identity(make_space(2, 2, 3));
    CHECK_THROWS_AS(expect_first_order(wrong, h, 1.0), std::invalid_argument);
}

TEST_CASE("first-order term is real and linear in t for Hermitian observables") {
    const FockSpace s = make_space(3, 3, 5);
    const auto [h1, h2] = build_h1_h2(s);
    const Operator h = 0.7 * h1 - 0.2 * h2;
    gen::Rng rng(73);
    for (int trial = 0; trial < 10; ++trial) {
        const Operator o = gen::hermitian(rng, s);
        const cplx f0 = expect_first_order(o, h, 0.0);
        const cplx f1 = expect_first_order(o, h, 1.0);
        const cplx f2 = expect_first_order(o, h, 2.0);
        const cplx f3 = expect_first_order(o, h, 3.0);
        const double scale = 1.0 + std::abs(f1 - f0);
        CHECK(std::abs((f1 - f0).imag()) < 1e-12 * scale);
        CHECK(std::abs((f2 - f0) - 2.0 * (f1 - f0)) < 1e-12 * scale);
        CHECK(std::abs((f3 - f0) - 3.0 * (f1 - f0)) < 1e-12 * scale);
    }
}

TEST_CASE("leading-order fits on synthetic data") {
    const std::array<double, 4> grid{1e-1, 1e-2, 1e-3, 1e-4};
    CHECK(std::abs(fit_leading_order([](double e) { return e * e; }, grid).exponent - 2.0) < 1e-6);
    CHECK(std::abs(fit_leading_order([](double e) { return 3.0 * e; }, grid).exponent - 1.0) < 1e-6);
    const OrderFit fit = fit_leading_order([](double e) { return 5.0 * e * e * e; }, grid);
    CHECK(fit.samples.size() == 4);
    CHECK(fit.r2 == doctest::Approx(1.0));

    CHECK_THROWS_AS(fit_leading_order([](double) { return 0.0; }, grid), FitError);
    CHECK_THROWS_AS(fit_leading_order([](double e) { return -e; }, grid), FitError);
    const std::array<double, 2> short_grid{1e-1, 1e-2};
    CHECK_THROWS_AS(fit_leading_order([](double e) { return e; }, short_grid), FitError);
}

TEST_CASE("extrapolation to zero is exact on quadratics") {
    const std::array<OrderFit::Sample, 3> samples{{{1e-2, 0.5 + 2e-2 - 3e-4}, {1e-3, 0.5 + 2e-3 - 3e-6}, {1e-4, 0.5 + 2e-4 - 3e-8}}};
    CHECK(std::abs(extrapolate_to_zero(samples) - 0.5) < 1e-12);
    const std::array<OrderFit::Sample, 2> repeated{{{1e-2, 1.0}, {1e-2, 2.0}}};
    CHECK_THROWS_AS(extrapolate_to_zero(repeated), FitError);
}

}
