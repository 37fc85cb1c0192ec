#pragma once

// Entanglement witnesses built on A = (1 + g1)(1 + g2) b^2.
//
// For a split A = A1 A2 across a bipartition, the product-state bound is
// |<A1 A2>| <= sqrt(<A1^dagger A1><A2^dagger A2>); its violation
// I = |<A>| - sqrt(...) > 0 certifies entanglement across that split. The
// three square-root terms O1, O2, O3 (one per bipartition) enter
//
//   G1 = |<A>| - (O1 + O2 + O3)        (bound for any biseparable mixture)
//   G2 = |<A>| - max(O1, O2, O3)
//
// Every <M^dagger M> is evaluated as a squared norm |M psi|^2.

#include "gravwit/fock.hpp"
#include "gravwit/model.hpp"

#include <array>
#include <string_view>
#include <utility>

namespace gravwit {

enum class Bipartition { g1_vs_g2m, g2_vs_g1m, m_vs_g1g2 };

inline constexpr std::array<Bipartition, 3> all_bipartitions{
    Bipartition::g1_vs_g2m, Bipartition::g2_vs_g1m, Bipartition::m_vs_g1g2};

std::string_view bipartition_name(Bipartition b);
/// The mode on the singleton side of the split.
Mode singleton_mode(Bipartition b);

struct WitnessReport {
    double lhs_abs = 0.0;  // |<(1 + g1)(1 + g2) b^2>|
    double o1 = 0.0;       // sqrt(<(1+g1)^d(1+g1)> <((1+g2)b^2)^d (1+g2)b^2>)
    double o2 = 0.0;       // sqrt(<(1+g2)^d(1+g2)> <((1+g1)b^2)^d (1+g1)b^2>)
    double o3 = 0.0;       // sqrt(<((1+g1)(1+g2))^d (1+g1)(1+g2)> <b^d2 b^2>)
    double g1_value = 0.0;
    double g2_value = 0.0;
    std::array<double, 3> insep{};  // indexed by Bipartition
    /// 10 * machine epsilon * largest ingredient; positivity means "value > threshold".
    double threshold = 0.0;

    double inseparability(Bipartition b) const { return insep[static_cast<std::size_t>(b)]; }
    bool fully_inseparable() const;
    bool genuine_tripartite() const { return g2_value > threshold; }
};

/// Operators entering the witness on one space, built once and reused.
class WitnessOperators {
  public:
    explicit WitnessOperators(const FockSpace& space);

    const FockSpace& space() const noexcept { return a_.space(); }
    const Operator& A() const noexcept { return a_; }
    /// (A1, A2): A1 supported on the singleton side, A2 on the rest; A1 A2 == A.
    const std::pair<Operator, Operator>& split(Bipartition b) const {
        return splits_[static_cast<std::size_t>(b)];
    }

  private:
    Operator a_;
    std::array<std::pair<Operator, Operator>, 3> splits_;
};

/// Textual split of A for a bipartition, validated against the mode support.
std::pair<std::string_view, std::string_view> split_expression(Bipartition b);

Operator witness_operator_A(const FockSpace& space);

/// Requires a normalized state (|norm - 1| <= 1e-8).
WitnessReport report_on_state(const StateVector& psi);
WitnessReport report_on_state(const StateVector& psi, const WitnessOperators& ops);
WitnessReport report_on_ensemble(const Ensemble& rho, const WitnessOperators& ops);

/// |<A1 A2>| - sqrt(<A1^d A1><A2^d A2>) for an arbitrary split.
double inseparability(const Operator& a1, const Operator& a2, const StateVector& psi);

/// First-order report from the perturbative expectation <O> + i<[H, O]>
/// with H = eps1 H1 + eps2 H2.
WitnessReport first_order_report(double eps1, double eps2, const FockSpace& space = default_space());
/// Same machinery driven by H_int and t/hbar from physical parameters.
WitnessReport first_order_report(const PhysicalConstants& k, const SystemParams& p,
                                 const FockSpace& space = default_space());

/// Closed form Omega * t.
double analytic_witness(const PhysicalConstants& k, const SystemParams& p);

}  // namespace gravwit
