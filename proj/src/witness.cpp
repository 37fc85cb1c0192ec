#include "gravwit/witness.hpp"

#include "gravwit/dynamics.hpp"
#include "gravwit/opdsl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gravwit {

namespace {

constexpr std::string_view a_text = "(1 + g1)*(1 + g2)*b^2";

// Gram expectations entering O1, O2, O3, in the order
// (1+g1), (1+g2)b^2, (1+g2), (1+g1)b^2, (1+g1)(1+g2), b^2.
struct Ingredients {
    cplx a;
    std::array<double, 6> gram;
};

WitnessReport assemble(const Ingredients& in) {
    WitnessReport r;
    r.lhs_abs = std::abs(in.a);
    r.o1 = std::sqrt(in.gram[0] * in.gram[1]);
    r.o2 = std::sqrt(in.gram[2] * in.gram[3]);
    r.o3 = std::sqrt(in.gram[4] * in.gram[5]);
    r.g1_value = r.lhs_abs - (r.o1 + r.o2 + r.o3);
    r.g2_value = r.lhs_abs - std::max({r.o1, r.o2, r.o3});
    r.insep[static_cast<std::size_t>(Bipartition::g1_vs_g2m)] = r.lhs_abs - r.o1;
    r.insep[static_cast<std::size_t>(Bipartition::g2_vs_g1m)] = r.lhs_abs - r.o2;
    r.insep[static_cast<std::size_t>(Bipartition::m_vs_g1g2)] = r.lhs_abs - r.o3;
    const double scale = std::max({r.lhs_abs, r.o1, r.o2, r.o3});
    r.threshold = 10.0 * std::numeric_limits<double>::epsilon() * scale;
    return r;
}

// Gram operators in Ingredients order, taken from the per-bipartition splits.
std::array<const Operator*, 6> gram_operators(const WitnessOperators& ops) {
    const auto& s1 = ops.split(Bipartition::g1_vs_g2m);
    const auto& s2 = ops.split(Bipartition::g2_vs_g1m);
    const auto& s3 = ops.split(Bipartition::m_vs_g1g2);
    // The m split stores (b^2, (1+g1)(1+g2)); O3 pairs them the other way round.
    return {&s1.first, &s1.second, &s2.first, &s2.second, &s3.second, &s3.first};
}

template <class Source>
WitnessReport report_from(const Source& src, const WitnessOperators& ops) {
    Ingredients in;
    in.a = expect(ops.A(), src);
    const auto grams = gram_operators(ops);
    for (std::size_t k = 0; k < grams.size(); ++k) in.gram[k] = expect_gram(*grams[k], src);
    return assemble(in);
}

WitnessReport first_order_from(const Operator& hamiltonian, double scale, const FockSpace& space) {
    const WitnessOperators ops(space);
    Ingredients in;
    in.a = expect_first_order(ops.A(), hamiltonian, scale);
    const auto grams = gram_operators(ops);
    for (std::size_t k = 0; k < grams.size(); ++k) {
        const Operator mm = grams[k]->adjoint() * *grams[k];
        in.gram[k] = std::max(0.0, expect_first_order(mm, hamiltonian, scale).real());
    }
    return assemble(in);
}

bool subset(const std::set<Mode>& s, const std::vector<Mode>& allowed) {
    return std::all_of(s.begin(), s.end(), [&](Mode m) {
        return std::find(allowed.begin(), allowed.end(), m) != allowed.end();
    });
}

}  // namespace

std::string_view bipartition_name(Bipartition b) {
    switch (b) {
        case Bipartition::g1_vs_g2m: return "g1|g2m";
        case Bipartition::g2_vs_g1m: return "g2|g1m";
        case Bipartition::m_vs_g1g2: return "m|g1g2";
    }
    return "?";
}

Mode singleton_mode(Bipartition b) {
    switch (b) {
        case Bipartition::g1_vs_g2m: return Mode::g1;
        case Bipartition::g2_vs_g1m: return Mode::g2;
        case Bipartition::m_vs_g1g2: return Mode::m;
    }
    return Mode::m;
}

bool WitnessReport::fully_inseparable() const {
    return std::all_of(insep.begin(), insep.end(), [this](double v) { return v > threshold; });
}

std::pair<std::string_view, std::string_view> split_expression(Bipartition b) {
    switch (b) {
        case Bipartition::g1_vs_g2m: return {"1 + g1", "(1 + g2)*b^2"};
        case Bipartition::g2_vs_g1m: return {"1 + g2", "(1 + g1)*b^2"};
        case Bipartition::m_vs_g1g2: return {"b^2", "(1 + g1)*(1 + g2)"};
    }
    throw std::invalid_argument("unknown bipartition");
}

namespace {

std::pair<Operator, Operator> make_split(Bipartition b, const FockSpace& space) {
    const auto [lhs, rhs] = split_expression(b);
    const dsl::Expr e1 = dsl::parse(lhs);
    const dsl::Expr e2 = dsl::parse(rhs);
    const Mode solo = singleton_mode(b);
    std::vector<Mode> rest;
    for (Mode m : all_modes)
        if (m != solo) rest.push_back(m);
    if (!subset(dsl::support(e1), {solo}) || !subset(dsl::support(e2), rest))
        throw std::logic_error("witness split does not respect bipartition " + std::string(bipartition_name(b)));
    return {dsl::evaluate(e1, space), dsl::evaluate(e2, space)};
}

}  // namespace

WitnessOperators::WitnessOperators(const FockSpace& space)
    : a_(dsl::evaluate(a_text, space)),
      splits_{make_split(Bipartition::g1_vs_g2m, space), make_split(Bipartition::g2_vs_g1m, space),
              make_split(Bipartition::m_vs_g1g2, space)} {}

Operator witness_operator_A(const FockSpace& space) { return dsl::evaluate(a_text, space); }

WitnessReport report_on_state(const StateVector& psi, const WitnessOperators& ops) {
    if (std::abs(psi.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("report_on_state: state is not normalized (norm " +
                                    std::to_string(psi.norm()) + ")");
    return report_from(psi, ops);
}

WitnessReport report_on_state(const StateVector& psi) {
    return report_on_state(psi, WitnessOperators(psi.space()));
}

WitnessReport report_on_ensemble(const Ensemble& rho, const WitnessOperators& ops) {
    return report_from(rho, ops);
}

double inseparability(const Operator& a1, const Operator& a2, const StateVector& psi) {
    const double lhs = std::abs(expect(a1 * a2, psi));
    return lhs - std::sqrt(expect_gram(a1, psi) * expect_gram(a2, psi));
}

WitnessReport first_order_report(double eps1, double eps2, const FockSpace& space) {
    const auto [h1, h2] = build_h1_h2(space);
    return first_order_from(eps1 * h1 + eps2 * h2, 1.0, space);
}

WitnessReport first_order_report(const PhysicalConstants& k, const SystemParams& p, const FockSpace& space) {
    p.validate(false);
    const auto [c1, c2] = coupling(k, p);
    return first_order_from(build_hamiltonian(space, c1, c2), p.t / k.hbar, space);
}

double analytic_witness(const PhysicalConstants& k, const SystemParams& p) {
    p.validate(false);
    return rate_omega(k, p) * p.t;
}

}  // namespace gravwit
