#include "gravwit/dynamics.hpp"

#include "gravwit/expm.hpp"
#include "gravwit/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace gravwit {

CutoffTooSmall::CutoffTooSmall(Mode mode, double probability)
    : std::runtime_error("cutoff too small for mode " + std::string(mode_name(mode)) +
                         ": top-level probability " + std::to_string(probability)),
      mode_(mode),
      probability_(probability) {}

Leakage leakage(const StateVector& state) {
    const FockSpace& space = state.space();
    Leakage out;
    for (std::size_t i = 0; i < space.dim(); ++i) {
        const double p = std::norm(state[i]);
        if (p == 0.0) continue;
        bool on_top = false;
        for (const auto& [mode, cutoff] : space.modes()) {
            if (space.occupation(i, mode) + 1 == cutoff) {
                out.per_mode[static_cast<std::size_t>(mode)] += p;
                on_top = true;
            }
        }
        if (on_top) out.total += p;
    }
    return out;
}

Evolution evolve_exact(double eps1, double eps2, const FockSpace& space, const EvolveOptions& opts) {
    const auto [h1, h2] = build_h1_h2(space);
    const Matrix generator = cplx{0.0, -1.0} * (eps1 * h1.matrix() + eps2 * h2.matrix());
    const Matrix propagator = linalg::expm(generator);
    StateVector psi(space, propagator.col(0), Normalization::normalized);

    Leakage leak = leakage(psi);
    if (leak.total > opts.leakage_threshold) {
        Mode worst = Mode::g1;
        for (Mode m : all_modes)
            if (leak.of(m) > leak.of(worst)) worst = m;
        throw CutoffTooSmall(worst, leak.total);
    }
    return {std::move(psi), leak};
}

StateVector evolve_first_order(double eps1, double eps2, const FockSpace& space) {
    for (Mode m : all_modes)
        if (!space.has(m))
            throw std::invalid_argument("evolve_first_order: space lacks mode " + std::string(mode_name(m)));
    if (space.cutoff(Mode::g1) < 2 || space.cutoff(Mode::g2) < 2 || space.cutoff(Mode::m) < 3)
        throw std::invalid_argument("evolve_first_order: cutoffs must be at least (2, 2, 3)");

    constexpr double r2 = std::numbers::sqrt2;
    Vector amp = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
    auto at = [&](std::initializer_list<std::size_t> occ) -> cplx& {
        return amp(static_cast<Eigen::Index>(space.index(occ)));
    };
    at({0, 0, 0}) = 1.0;
    at({1, 0, 0}) = cplx{0.0, -eps1};
    at({1, 0, 2}) = cplx{0.0, -r2 * eps1};
    at({0, 1, 0}) = cplx{0.0, -eps2};
    at({0, 1, 2}) = cplx{0.0, -r2 * eps2};
    return StateVector(space, std::move(amp), Normalization::unnormalized);
}

cplx expect_first_order(const Operator& observable, const Operator& hamiltonian, double scale) {
    if (!(observable.space() == hamiltonian.space()))
        throw std::invalid_argument("expect_first_order: space mismatch");
    const Matrix& o = observable.matrix();
    const Matrix& h = hamiltonian.matrix();
    const cplx zeroth = o(0, 0);
    // <0|HO|0> - <0|OH|0>
    const cplx commutator = (h.row(0) * o.col(0))(0, 0) - (o.row(0) * h.col(0))(0, 0);
    return zeroth + cplx{0.0, scale} * commutator;
}

OrderFit fit_leading_order(std::span<const OrderFit::Sample> samples) {
    if (samples.size() < 3) throw FitError("fit_leading_order: need at least 3 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : samples) {
        if (!(s.eps > 0.0) || !(s.value > 0.0) || !std::isfinite(s.value))
            throw FitError("fit_leading_order: cannot fit nonpositive value " + std::to_string(s.value) +
                           " at eps " + std::to_string(s.eps));
        const double x = std::log(s.eps);
        const double y = std::log(s.value);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(samples.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw FitError("fit_leading_order: degenerate eps grid");
    OrderFit fit;
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / n;
    for (const auto& s : samples) {
        const double y = std::log(s.value);
        const double r = y - (intercept + fit.exponent * std::log(s.eps));
        ss_res += r * r;
        ss_tot += (y - mean) * (y - mean);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.samples.assign(samples.begin(), samples.end());
    return fit;
}

OrderFit fit_leading_order(const std::function<double(double)>& evaluate, std::span<const double> eps_grid) {
    std::vector<OrderFit::Sample> samples;
    samples.reserve(eps_grid.size());
    for (double e : eps_grid) samples.push_back({e, evaluate(e)});
    return fit_leading_order(samples);
}

double extrapolate_to_zero(std::span<const OrderFit::Sample> samples) {
    if (samples.empty()) throw FitError("extrapolate_to_zero: no samples");
    // Neville's scheme evaluated at eps = 0.
    std::vector<double> p;
    p.reserve(samples.size());
    for (const auto& s : samples) p.push_back(s.value);
    for (std::size_t level = 1; level < samples.size(); ++level) {
        for (std::size_t i = 0; i + level < samples.size(); ++i) {
            const double xi = samples[i].eps;
            const double xj = samples[i + level].eps;
            if (xi == xj) throw FitError("extrapolate_to_zero: repeated eps");
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    return p.front();
}

}  // namespace gravwit
