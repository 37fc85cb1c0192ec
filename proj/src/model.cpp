#include "gravwit/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gravwit {

namespace {

constexpr double pi = std::numbers::pi;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

double norm3(const Direction& n) { return std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]); }

void require_frequencies(const SystemParams& p) {
    require_positive(p.omega_k, "omega_k");
    require_positive(p.omega_m, "omega_m");
}

}  // namespace

void PhysicalConstants::validate() const {
    require_positive(G, "G");
    require_positive(hbar, "hbar");
    require_positive(c, "c");
}

void SystemParams::validate(bool require_mass) const {
    if (require_mass) require_positive(mu, "mu");
    require_frequencies(*this);
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("t must be nonnegative and finite");
    const double p11sq = polarization_constraint(n);
    if (std::abs(e1 * e1 + e2 * e2 - p11sq) > 1e-9)
        throw std::invalid_argument("polarization (e1, e2) violates e1^2 + e2^2 = P11(n)^2 = " +
                                    std::to_string(p11sq));
}

std::pair<double, double> coupling(const PhysicalConstants& k, const SystemParams& p) {
    k.validate();
    require_frequencies(p);
    const double wk3 = p.omega_k * p.omega_k * p.omega_k;
    const double scale =
        std::sqrt(k.G * k.hbar * k.hbar * k.hbar / (64.0 * pi * pi * std::pow(k.c, 5))) * wk3 / p.omega_m;
    return {scale * p.e1, scale * p.e2};
}

double rate_omega(const PhysicalConstants& k, const SystemParams& p) {
    k.validate();
    require_frequencies(p);
    const double wk3 = p.omega_k * p.omega_k * p.omega_k;
    return std::sqrt(k.G * k.hbar / (16.0 * pi * pi * std::pow(k.c, 5))) * wk3 / p.omega_m *
           std::abs(p.e1 + p.e2);
}

DimensionlessCouplings derive_couplings(const PhysicalConstants& k, const SystemParams& p) {
    DimensionlessCouplings d;
    std::tie(d.C1p, d.C2p) = coupling(k, p);
    d.eps1 = d.C1p * p.t / k.hbar;
    d.eps2 = d.C2p * p.t / k.hbar;
    d.Omega = rate_omega(k, p);
    if (p.mu > 0.0) d.delta_zpf = zpf(k, p.mu, p.omega_m);
    return d;
}

double zpf(const PhysicalConstants& k, double mu, double omega_m) {
    require_positive(mu, "mu");
    require_positive(omega_m, "omega_m");
    return std::sqrt(k.hbar / (2.0 * mu * omega_m));
}

double omega_m_from_zpf(const PhysicalConstants& k, double mu, double delta_zpf) {
    require_positive(mu, "mu");
    require_positive(delta_zpf, "delta_zpf");
    return k.hbar / (2.0 * mu * delta_zpf * delta_zpf);
}

double polarization_constraint(const Direction& n) {
    if (std::abs(norm3(n) - 1.0) > 1e-12) throw std::invalid_argument("propagation direction must be a unit vector");
    const double p11 = 1.0 - n[0] * n[0];
    return p11 * p11;
}

std::pair<double, double> default_polarization() {
    const double e = 1.0 / std::numbers::sqrt2;
    return {e, e};
}

InteractionTerms build_h1_h2(const FockSpace& space) {
    for (Mode m : all_modes)
        if (!space.has(m))
            throw std::invalid_argument("build_h1_h2: space lacks mode " + std::string(mode_name(m)));
    const Operator b = annihilator(space, Mode::m);
    const Operator x = b + b.adjoint();
    const Operator x2 = x * x;
    const Operator g1 = annihilator(space, Mode::g1);
    const Operator g2 = annihilator(space, Mode::g2);
    return {(g1 + g1.adjoint()) * x2, (g2 + g2.adjoint()) * x2};
}

Operator build_hamiltonian(const FockSpace& space, double C1p, double C2p) {
    auto [h1, h2] = build_h1_h2(space);
    return C1p * std::move(h1) + C2p * std::move(h2);
}

}  // namespace gravwit
