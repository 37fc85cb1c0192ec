#include "gravwit/model.hpp"

#include "support/gen.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gravwit;

namespace {

// Reference values from a 30-digit independent evaluation with the default constants.
constexpr double ref_coupling_10_2pi = 2.54583715133996705e-77;  // e = 1/sqrt2
constexpr double ref_omega_10_2pi = 9.65638227876126544e-43;
constexpr double ref_eps_10_2pi = 2.41409556969031636e-43;       // t = 1
constexpr double ref_c1_3_7 = 5.23531069648263479e-79;            // e1 = 0.6
constexpr double ref_c2_3_7 = 6.98041426197684639e-79;            // e2 = 0.8
constexpr double ref_omega_3_7 = 2.31671750781473448e-44;
constexpr double ref_zpf_1e16_2pi = 2.89689762954226312e-10;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

SystemParams reference_params() {
    SystemParams p;
    p.omega_k = 10.0;
    p.omega_m = 2.0 * std::numbers::pi;
    p.t = 1.0;
    std::tie(p.e1, p.e2) = default_polarization();
    return p;
}

SystemParams random_params(gen::Rng& rng) {
    SystemParams p;
    p.omega_k = gen::log_uniform(rng, 1e-2, 1e3);
    p.omega_m = gen::log_uniform(rng, 1e-2, 1e3);
    p.t = gen::log_uniform(rng, 1e-3, 1e3);
    p.mu = gen::log_uniform(rng, 1e-20, 1e-10);
    const double angle = gen::uniform(rng, 0.0, 2.0 * std::numbers::pi);
    p.e1 = std::cos(angle);
    p.e2 = std::sin(angle);
    return p;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("coupling at the reference point") {
    const PhysicalConstants k;
    const auto [c1, c2] = coupling(k, reference_params());
    CHECK(rel(c1, ref_coupling_10_2pi) < 1e-12);
    CHECK(c1 == c2);

    SystemParams p;
    p.omega_k = 3.0;
    p.omega_m = 7.0;
    p.e1 = 0.6;
    p.e2 = 0.8;
    const auto [d1, d2] = coupling(k, p);
    CHECK(rel(d1, ref_c1_3_7) < 1e-12);
    CHECK(rel(d2, ref_c2_3_7) < 1e-12);
    CHECK(rel(rate_omega(k, p), ref_omega_3_7) < 1e-12);
}

TEST_CASE("coupling scaling and zero polarization") {
    const PhysicalConstants k;
    SystemParams p = reference_params();
    p.e2 = 0.0;
    CHECK(coupling(k, p).second == 0.0);
    const double base = coupling(k, p).first;
    p.omega_k *= 2.0;
    CHECK(rel(coupling(k, p).first, 8.0 * base) < 1e-14);
}

TEST_CASE("Omega at the reference point and its identities") {
    const PhysicalConstants k;
    const SystemParams p = reference_params();
    CHECK(rel(rate_omega(k, p), ref_omega_10_2pi) < 1e-12);
    const DimensionlessCouplings d = derive_couplings(k, p);
    CHECK(rel(d.eps1, ref_eps_10_2pi) < 1e-12);
    CHECK_FALSE(d.delta_zpf.has_value());

    SystemParams q = p;
    q.e2 = -q.e1;
    CHECK(rate_omega(k, q) == 0.0);
}

TEST_CASE("Omega equals 2|C'1 + C'2|/hbar and eps = C' t/hbar on random draws") {
    const PhysicalConstants k;
    gen::Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const SystemParams p = random_params(rng);
        REQUIRE_NOTHROW(p.validate());
        const DimensionlessCouplings d = derive_couplings(k, p);
        const double expected = 2.0 * std::abs(d.C1p + d.C2p) / k.hbar;
        if (expected > 0.0) CHECK(rel(d.Omega, expected) < 1e-12);
        if (d.C1p != 0.0) CHECK(rel(d.eps1, d.C1p * p.t / k.hbar) < 1e-12);
        if (d.C2p != 0.0) CHECK(rel(d.eps2, d.C2p * p.t / k.hbar) < 1e-12);
        REQUIRE(d.delta_zpf.has_value());
        CHECK(rel(*d.delta_zpf, zpf(k, p.mu, p.omega_m)) == 0.0);
    }
}

TEST_CASE("Omega is proportional to omega_k^2 along omega_k = 2 omega_m") {
    const PhysicalConstants k;
    SystemParams p = reference_params();
    p.omega_k = 1.0;
    p.omega_m = 0.5;
    const double ratio0 = rate_omega(k, p) / (p.omega_k * p.omega_k);
    for (double wk : {2.0, 3.7, 10.0, 55.0}) {
        p.omega_k = wk;
        p.omega_m = wk / 2.0;
        CHECK(rel(rate_omega(k, p) / (wk * wk), ratio0) < 1e-12);
    }
}

TEST_CASE("zero-point length") {
    const PhysicalConstants k;
    CHECK(rel(zpf(k, 1e-16, 2.0 * std::numbers::pi), ref_zpf_1e16_2pi) < 1e-12);
    CHECK(rel(zpf(k, 4e-16, 3.0), 0.5 * zpf(k, 1e-16, 3.0)) < 1e-14);
    gen::Rng rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const double mu = gen::log_uniform(rng, 1e-20, 1e-5);
        const double wm = gen::log_uniform(rng, 1e-3, 1e6);
        CHECK(rel(omega_m_from_zpf(k, mu, zpf(k, mu, wm)), wm) < 1e-12);
    }
    CHECK_THROWS_AS(zpf(k, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(zpf(k, 1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(omega_m_from_zpf(k, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("witness rate scales as delta_zpf^2 at fixed mass") {
    const PhysicalConstants k;
    SystemParams p = reference_params();
    const double mu = 1e-16;
    p.omega_m = omega_m_from_zpf(k, mu, 1e-10);
    const double g0 = rate_omega(k, p);
    p.omega_m = omega_m_from_zpf(k, mu, 3e-10);
    CHECK(rel(rate_omega(k, p), 9.0 * g0) < 1e-12);
}

TEST_CASE("polarization geometry") {
    CHECK(polarization_constraint(axis_u3) == 1.0);
    CHECK(polarization_constraint({1.0, 0.0, 0.0}) == 0.0);
    const double s = 1.0 / std::numbers::sqrt2;
    CHECK(std::abs(polarization_constraint({s, 0.0, s}) - 0.25) < 1e-15);
    CHECK_THROWS_AS(polarization_constraint({0.0, 0.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(polarization_constraint({0.0, 0.0, 0.0}), std::invalid_argument);

    const auto [e1, e2] = default_polarization();
    CHECK(e1 == e2);
    CHECK(std::abs(e1 * e1 + e2 * e2 - 1.0) < 1e-15);
    CHECK(std::abs(std::abs(e1 + e2) - std::numbers::sqrt2) < 1e-15);
}

TEST_CASE("parameter validation") {
    const PhysicalConstants k;
    SystemParams p = reference_params();
    CHECK_NOTHROW(p.validate(false));
    CHECK_THROWS_AS(p.validate(true), std::invalid_argument);
    p.mu = 1e-16;
    CHECK_NOTHROW(p.validate());

    SystemParams bad = p;
    bad.e1 = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.n = {0.0, 1.0, 1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.n = {1.0, 0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.e1 = bad.e2 = 0.0;
    CHECK_NOTHROW(bad.validate());
    bad = p;
    bad.t = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = p;
    bad.omega_m = 0.0;
    CHECK_THROWS_AS(coupling(k, bad), std::invalid_argument);
    CHECK_THROWS_AS(rate_omega(k, bad), std::invalid_argument);
    bad = p;
    bad.omega_k = -1.0;
    CHECK_THROWS_AS(coupling(k, bad), std::invalid_argument);

    PhysicalConstants bad_k;
    bad_k.hbar = 0.0;
    CHECK_THROWS_AS(coupling(bad_k, p), std::invalid_argument);
}

TEST_CASE("Hamiltonian structure") {
    const FockSpace s = default_space();
    const auto [h1, h2] = build_h1_h2(s);
    CHECK(h1.is_hermitian(1e-12));
    CHECK(h2.is_hermitian(1e-12));

    const StateVector out = apply(h1, vacuum(s));
    CHECK(std::abs(out[s.index({1, 0, 0})] - 1.0) < 1e-14);
    CHECK(std::abs(out[s.index({1, 0, 2})] - std::numbers::sqrt2) < 1e-14);
    CHECK(std::abs(out.norm() - std::sqrt(3.0)) < 1e-14);

    CHECK(build_hamiltonian(s, 0.0, 0.0).matrix().cwiseAbs().maxCoeff() == 0.0);

    const auto [c1, c2] = coupling(PhysicalConstants{}, reference_params());
    const Operator h = build_hamiltonian(s, c1, c2);
    const double scale = h.matrix().cwiseAbs().maxCoeff();
    CHECK((h.matrix() - h.matrix().adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    CHECK(((h.matrix() - (c1 * h1.matrix() + c2 * h2.matrix())).cwiseAbs().maxCoeff()) <= 1e-12 * scale);

    CHECK_THROWS_AS(build_h1_h2(FockSpace({{Mode::g1, 2}, {Mode::m, 3}})), std::invalid_argument);
}

}
