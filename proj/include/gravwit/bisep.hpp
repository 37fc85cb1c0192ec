#pragma once

// Random biseparable states used to falsify the witnesses: pure products
// across one bipartition, and mixtures of such products drawn from all three
// classes. Amplitudes are isotropic complex Gaussians, normalized per factor.

#include "gravwit/fock.hpp"
#include "gravwit/witness.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace gravwit {

/// Mixes (seed, stream, index) into an independent 64-bit seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Normalized |u> (x) |v> with u on the singleton mode of `b` and v on the
/// other two modes; deterministic in `seed`.
StateVector random_pure_product(const FockSpace& space, Bipartition b, std::uint64_t seed);

/// 3 * per_class pure products (per_class from each class) with random positive weights summing to 1.
Ensemble random_biseparable_ensemble(const FockSpace& space, std::size_t per_class, std::uint64_t seed);

/// Tolerance on every falsification assertion.
inline constexpr double falsification_tolerance = 1e-10;

struct FalsificationConfig {
    std::size_t n_products = 1000;   // per bipartition
    std::size_t n_ensembles = 500;
    std::size_t per_class = 2;       // components per class in each ensemble
    std::uint64_t seed = 1;
};

struct Violation {
    std::string invariant;
    std::uint64_t sample_seed;  // reproduces the offending state
    double value;
};

struct FalsificationSummary {
    FalsificationConfig config;
    std::array<double, 3> max_insep_products{};  // per bipartition, on its own product states
    double max_g2_pure = 0.0;                    // over all pure products
    double max_g1_ensemble = 0.0;
    double max_g2_ensemble = 0.0;                // measured only, never asserted
    std::size_t violation_count = 0;
    std::vector<Violation> violations;           // first few, for reporting

    bool passed() const noexcept { return violation_count == 0; }
};

/// Asserts I <= tol on matching products, G2 <= tol on pure products and
/// G1 <= tol on ensembles; records maxima and any violations.
FalsificationSummary falsification_run(const FockSpace& space, const FalsificationConfig& config);

void write_summary_csv(std::ostream& out, const FalsificationSummary& s);
void write_summary_text(std::ostream& out, const FalsificationSummary& s);

}  // namespace gravwit
