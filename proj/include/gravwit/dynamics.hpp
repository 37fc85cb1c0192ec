#pragma once

// Evolution from the vacuum under exp(-i (eps1 H1 + eps2 H2)), exactly and at
// first perturbative order, plus the small numerical helpers used to check
// orders of accuracy (log-log slope fits and extrapolation to eps -> 0).

#include "gravwit/fock.hpp"

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace gravwit {

class CutoffTooSmall : public std::runtime_error {
  public:
    CutoffTooSmall(Mode mode, double probability);

    Mode mode() const noexcept { return mode_; }
    double probability() const noexcept { return probability_; }

  private:
    Mode mode_;
    double probability_;
};

class FitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Probability held on the highest occupation level of each mode.
struct Leakage {
    std::array<double, 3> per_mode{};  // indexed by Mode
    double total = 0.0;                // probability on any top level

    double of(Mode mode) const { return per_mode[static_cast<std::size_t>(mode)]; }
};

Leakage leakage(const StateVector& state);

struct EvolveOptions {
    double leakage_threshold = 1e-8;
};

struct Evolution {
    StateVector state;
    Leakage leakage;
};

/// exp(-i(eps1 H1 + eps2 H2)) |000>. Throws CutoffTooSmall naming the worst
/// mode when the top-level probability exceeds the threshold.
Evolution evolve_exact(double eps1, double eps2, const FockSpace& space, const EvolveOptions& opts = {});

/// |000> - i[eps1(|100> + sqrt2 |102>) + eps2(|010> + sqrt2 |012>)], tagged unnormalized.
/// Requires cutoffs of at least (2, 2, 3).
StateVector evolve_first_order(double eps1, double eps2, const FockSpace& space);

/// <0|O|0> + i scale <0|[H, O]|0>; `scale` is t/hbar for a physical H or 1
/// when H already carries the eps weights.
cplx expect_first_order(const Operator& observable, const Operator& hamiltonian, double scale);

struct OrderFit {
    struct Sample {
        double eps;
        double value;
    };

    double exponent = 0.0;
    double r2 = 0.0;
    std::vector<Sample> samples;
};

/// Least-squares slope of log(value) against log(eps). Needs >= 3 points and
/// strictly positive values; throws FitError otherwise.
OrderFit fit_leading_order(const std::function<double(double)>& evaluate, std::span<const double> eps_grid);
OrderFit fit_leading_order(std::span<const OrderFit::Sample> samples);

/// Value at eps = 0 of the interpolating polynomial through the samples
/// (Richardson-style extrapolation over a geometric grid).
double extrapolate_to_zero(std::span<const OrderFit::Sample> samples);

}  // namespace gravwit
