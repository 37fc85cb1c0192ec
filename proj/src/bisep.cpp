#include "gravwit/bisep.hpp"

#include "gravwit/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace gravwit {

namespace {

constexpr std::size_t max_recorded_violations = 16;

enum Stream : std::uint64_t { product_stream = 1, ensemble_stream = 2 };

Vector random_unit_vector(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Vector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(k) = cplx{re, im};
    }
    v.normalize();
    return v;
}

void require_full_space(const FockSpace& space) {
    for (Mode m : all_modes)
        if (!space.has(m)) throw std::invalid_argument("biseparable sampling needs all three modes");
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ stream) ^ index);
}

StateVector random_pure_product(const FockSpace& space, Bipartition b, std::uint64_t seed) {
    require_full_space(space);
    std::mt19937_64 rng(seed);
    const Mode solo = singleton_mode(b);
    const std::size_t solo_dim = space.cutoff(solo);
    const std::size_t rest_dim = space.dim() / solo_dim;
    const Vector u = random_unit_vector(solo_dim, rng);
    const Vector v = random_unit_vector(rest_dim, rng);

    Vector amp(static_cast<Eigen::Index>(space.dim()));
    for (std::size_t i = 0; i < space.dim(); ++i) {
        // Row-major index over the two remaining modes, in declaration order.
        std::size_t rest_index = 0;
        for (const auto& [mode, cutoff] : space.modes()) {
            if (mode == solo) continue;
            rest_index = rest_index * cutoff + space.occupation(i, mode);
        }
        amp(static_cast<Eigen::Index>(i)) = u(static_cast<Eigen::Index>(space.occupation(i, solo))) *
                                            v(static_cast<Eigen::Index>(rest_index));
    }
    return StateVector(space, std::move(amp), Normalization::normalized);
}

Ensemble random_biseparable_ensemble(const FockSpace& space, std::size_t per_class, std::uint64_t seed) {
    if (per_class == 0) throw std::invalid_argument("random_biseparable_ensemble: per_class must be >= 1");
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> weight_dist(1.0);
    std::vector<double> weights;
    std::vector<StateVector> states;
    std::uint64_t k = 0;
    for (Bipartition b : all_bipartitions) {
        for (std::size_t j = 0; j < per_class; ++j, ++k) {
            double w = 0.0;
            while (!(w > 0.0)) w = weight_dist(rng);
            weights.push_back(w);
            states.push_back(random_pure_product(space, b, derive_seed(seed, ensemble_stream, k)));
        }
    }
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<Ensemble::Component> components;
    components.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) components.push_back({weights[i] / total, std::move(states[i])});
    return Ensemble(std::move(components));
}

FalsificationSummary falsification_run(const FockSpace& space, const FalsificationConfig& config) {
    if (config.n_products == 0 || config.n_ensembles == 0 || config.per_class == 0)
        throw std::invalid_argument("falsification_run: counts must be >= 1");
    require_full_space(space);

    FalsificationSummary s;
    s.config = config;
    constexpr double lowest = -std::numeric_limits<double>::infinity();
    s.max_insep_products.fill(lowest);
    s.max_g2_pure = lowest;
    s.max_g1_ensemble = lowest;
    s.max_g2_ensemble = lowest;

    auto record = [&](const std::string& invariant, std::uint64_t sample_seed, double value) {
        if (value <= falsification_tolerance) return;
        ++s.violation_count;
        if (s.violations.size() < max_recorded_violations) s.violations.push_back({invariant, sample_seed, value});
    };

    const WitnessOperators ops(space);
    std::uint64_t sample = 0;
    for (Bipartition b : all_bipartitions) {
        const std::size_t bi = static_cast<std::size_t>(b);
        for (std::size_t j = 0; j < config.n_products; ++j, ++sample) {
            const std::uint64_t sample_seed = derive_seed(config.seed, product_stream, sample);
            const WitnessReport r = report_on_state(random_pure_product(space, b, sample_seed), ops);
            const double insep = r.inseparability(b);
            s.max_insep_products[bi] = std::max(s.max_insep_products[bi], insep);
            s.max_g2_pure = std::max(s.max_g2_pure, r.g2_value);
            record("I(" + std::string(bipartition_name(b)) + ") on product state", sample_seed, insep);
            record("G2 on pure biseparable state", sample_seed, r.g2_value);
        }
    }
    for (std::size_t j = 0; j < config.n_ensembles; ++j) {
        const std::uint64_t sample_seed = derive_seed(config.seed, ensemble_stream, j);
        const WitnessReport r =
            report_on_ensemble(random_biseparable_ensemble(space, config.per_class, sample_seed), ops);
        s.max_g1_ensemble = std::max(s.max_g1_ensemble, r.g1_value);
        s.max_g2_ensemble = std::max(s.max_g2_ensemble, r.g2_value);
        record("G1 on biseparable ensemble", sample_seed, r.g1_value);
    }
    return s;
}

void write_summary_csv(std::ostream& out, const FalsificationSummary& s) {
    csv::write_header(out, {"seed", "n_products", "n_ensembles", "per_class", "max_i_g1", "max_i_g2", "max_i_m",
                            "max_g2_pure", "max_g1_ensemble", "max_g2_ensemble", "violations"});
    csv::write_row(out, {std::to_string(s.config.seed), std::to_string(s.config.n_products),
                         std::to_string(s.config.n_ensembles), std::to_string(s.config.per_class),
                         csv::number(s.max_insep_products[0]), csv::number(s.max_insep_products[1]),
                         csv::number(s.max_insep_products[2]), csv::number(s.max_g2_pure),
                         csv::number(s.max_g1_ensemble), csv::number(s.max_g2_ensemble),
                         std::to_string(s.violation_count)});
}

void write_summary_text(std::ostream& out, const FalsificationSummary& s) {
    out << "falsification run: seed " << s.config.seed << ", " << s.config.n_products
        << " product states per bipartition, " << s.config.n_ensembles << " ensembles of "
        << 3 * s.config.per_class << " components\n";
    for (Bipartition b : all_bipartitions)
        out << "  max I(" << bipartition_name(b) << ") on its product states: "
            << csv::number(s.max_insep_products[static_cast<std::size_t>(b)]) << '\n';
    out << "  max G2 on pure biseparable states: " << csv::number(s.max_g2_pure) << '\n';
    out << "  max G1 on biseparable ensembles:   " << csv::number(s.max_g1_ensemble) << '\n';
    out << "  max G2 on biseparable ensembles:   " << csv::number(s.max_g2_ensemble) << " (not asserted)\n";
    out << "  tolerance: " << csv::number(falsification_tolerance) << '\n';
    if (s.passed()) {
        out << "PASS: no violations\n";
        return;
    }
    out << "FAIL: " << s.violation_count << " violation(s)\n";
    for (const auto& v : s.violations)
        out << "  " << v.invariant << ": value " << csv::number(v.value) << ", sample seed " << v.sample_seed << '\n';
}

}  // namespace gravwit
