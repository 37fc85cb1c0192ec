#pragma once

// Graviton-oscillator model: physical constants, couplings, zero-point
// length, polarization geometry, and the interaction Hamiltonian
//
//   H_int = C'_1 (g1 + g1^dagger) X^2 + C'_2 (g2 + g2^dagger) X^2,   X = b + b^dagger.
//
// All angular frequencies are in rad/s.

#include "gravwit/fock.hpp"

#include <array>
#include <optional>
#include <utility>

namespace gravwit {

struct PhysicalConstants {
    double G = 6.67430e-11;       // m^3 kg^-1 s^-2
    double hbar = 1.054571817e-34;  // J s
    double c = 2.99792458e8;        // m/s

    void validate() const;
};

using Direction = std::array<double, 3>;

inline constexpr Direction axis_u3{0.0, 0.0, 1.0};

struct SystemParams {
    double mu = 0.0;       // oscillator mass, kg
    double omega_m = 0.0;  // oscillator angular frequency
    double omega_k = 0.0;  // graviton-mode angular frequency
    double e1 = 0.0;       // polarization component e^1_11
    double e2 = 0.0;       // polarization component e^2_11
    Direction n = axis_u3;  // propagation direction
    double t = 0.0;        // evolution time, s

    /// Checks positivity, |n| = 1 and e1^2 + e2^2 == P11(n)^2 (1e-9).
    /// `require_mass` is false for quantities that never involve mu.
    void validate(bool require_mass = true) const;
};

struct DimensionlessCouplings {
    double C1p = 0.0;  // J
    double C2p = 0.0;  // J
    double eps1 = 0.0;
    double eps2 = 0.0;
    double Omega = 0.0;  // 1/s
    std::optional<double> delta_zpf;  // m, present when mu is known
};

/// C'_lambda = sqrt(G hbar^3 omega_k^6 / (64 pi^2 c^5 omega_m^2)) * e_lambda.
std::pair<double, double> coupling(const PhysicalConstants& k, const SystemParams& p);

/// Omega = sqrt(G hbar omega_k^6 / (16 pi^2 c^5 omega_m^2)) * |e1 + e2|.
double rate_omega(const PhysicalConstants& k, const SystemParams& p);

/// eps_i = C'_i t / hbar together with the other derived quantities.
DimensionlessCouplings derive_couplings(const PhysicalConstants& k, const SystemParams& p);

/// sqrt(hbar / (2 mu omega_m)).
double zpf(const PhysicalConstants& k, double mu, double omega_m);
/// hbar / (2 mu delta_zpf^2).
double omega_m_from_zpf(const PhysicalConstants& k, double mu, double delta_zpf);

/// P11(n)^2 with P_ij = delta_ij - n_i n_j: the required (e^1_11)^2 + (e^2_11)^2.
double polarization_constraint(const Direction& n);

/// Equal split for n = u3: (1/sqrt 2, 1/sqrt 2).
std::pair<double, double> default_polarization();

struct InteractionTerms {
    Operator H1;  // (g1 + g1^dagger) X^2
    Operator H2;  // (g2 + g2^dagger) X^2
};

/// Requires all three modes in `space`.
InteractionTerms build_h1_h2(const FockSpace& space);
Operator build_hamiltonian(const FockSpace& space, double C1p, double C2p);

}  // namespace gravwit
