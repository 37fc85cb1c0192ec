#include "gravwit/model.hpp"
#include "gravwit/opdsl.hpp"

#include "support/gen.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace gravwit;
namespace d = gravwit::dsl;

namespace {

double max_diff(const Operator& a, const Operator& b) { return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff(); }

std::string parse_error_message(std::string_view text, std::size_t* offset = nullptr) {
    try {
        d::parse(text);
    } catch (const d::ParseError& e) {
        if (offset) *offset = e.offset();
        return e.message();
    }
    return {};
}

}  // namespace

TEST_SUITE("opdsl") {

TEST_CASE("quadrature parses to two atoms") {
    const d::Expr e = d::parse("b + b'");
    REQUIRE(e.terms.size() == 2);
    const auto& f0 = std::get<d::ModeSymbol>(e.terms[0].factors.at(0).node);
    const auto& f1 = std::get<d::ModeSymbol>(e.terms[1].factors.at(0).node);
    CHECK(f0.mode == Mode::m);
    CHECK_FALSE(f0.dagger);
    CHECK(f1.mode == Mode::m);
    CHECK(f1.dagger);
}

TEST_CASE("interaction term parses with power") {
    const d::Expr e = d::parse("(g1 + g1')*(b + b')^2");
    REQUIRE(e.terms.size() == 1);
    REQUIRE(e.terms[0].factors.size() == 2);
    const auto& p = std::get<d::Power>(e.terms[0].factors[1].node);
    CHECK(p.exponent == 2);
    CHECK(d::support(e) == std::set<Mode>{Mode::g1, Mode::m});
}

TEST_CASE("parse errors carry offset and message") {
    std::size_t at = 99;
    CHECK(parse_error_message("g3*b", &at) == "unknown mode g3");
    CHECK(at == 0);
    CHECK(parse_error_message("b + g7", &at) == "unknown mode g7");
    CHECK(at == 4);
    CHECK(parse_error_message("(b + b'", &at) == "unbalanced parentheses");
    CHECK(parse_error_message("b + b')", &at) == "unbalanced parentheses");
    CHECK(at == 6);
    CHECK(parse_error_message("1.2.3*b") == "malformed scalar");
    CHECK(parse_error_message("b^") == "expected non-negative integer exponent");
    CHECK(parse_error_message("b^99999") == "exponent too large");
    CHECK(parse_error_message("") == "unexpected end of input");
    CHECK(parse_error_message("b +") == "unexpected end of input");
    CHECK(parse_error_message(std::string(500, '(') + "b" + std::string(500, ')')) == "nesting too deep");
    try {
        d::parse("g3");
        FAIL("expected a parse error");
    } catch (const d::ParseError& e) {
        CHECK(std::string(e.what()) == "parse error at offset 0: unknown mode g3");
    }
}

TEST_CASE("whitespace is insignificant and dagger aliases agree") {
    const FockSpace s = make_space(2, 2, 4);
    CHECK(max_diff(d::evaluate("  b*b'  ", s), d::evaluate("b*b'", s)) == 0.0);
    CHECK(max_diff(d::evaluate("b\xE2\x80\xA0", s), d::evaluate("b'", s)) == 0.0);
}

TEST_CASE("scalars") {
    const FockSpace s = make_space(2, 2, 2);
    const Operator id = identity(s);
    CHECK(max_diff(d::evaluate("0", s), zero_operator(s)) == 0.0);
    CHECK(max_diff(d::evaluate("2.5e1", s), cplx{25.0} * id) == 0.0);
    CHECK(max_diff(d::evaluate("i", s), cplx{0.0, 1.0} * id) == 0.0);
    CHECK(max_diff(d::evaluate("3i", s), cplx{0.0, 3.0} * id) == 0.0);
    CHECK(max_diff(d::evaluate("-(1 + 2i)", s), cplx{-1.0, -2.0} * id) == 0.0);
    CHECK(max_diff(d::evaluate("-2^2", s), cplx{-4.0} * id) == 0.0);
    CHECK(max_diff(d::evaluate("b^0", s), id) == 0.0);
}

TEST_CASE("commutator from text") {
    const FockSpace s = make_space(1, 1, 8);
    const Matrix c = (d::evaluate("b*b'", s) - d::evaluate("b'*b", s)).matrix();
    for (Eigen::Index k = 0; k < 7; ++k) CHECK(std::abs(c(k, k) - 1.0) < 1e-14);
    CHECK(std::abs(c(7, 7) + 7.0) < 1e-14);
}

TEST_CASE("products keep the written order") {
    const FockSpace s = make_space(1, 1, 4);
    const Operator a = annihilator(s, Mode::m);
    CHECK(max_diff(d::evaluate("b'*b", s), a.adjoint() * a) == 0.0);
    CHECK(max_diff(d::evaluate("b*b'", s), a * a.adjoint()) == 0.0);
}

TEST_CASE("DSL Hamiltonian terms equal programmatic construction") {
    const FockSpace s = default_space();
    const auto [h1, h2] = build_h1_h2(s);
    CHECK(max_diff(d::evaluate("(g1+g1')*(b+b')^2", s), h1) <= 1e-12);
    CHECK(max_diff(d::evaluate("(g2+g2')*(b+b')^2", s), h2) <= 1e-12);
    // The four grouped two-mode terms, summed.
    const Operator expanded = d::evaluate("g1*b^2 + g1'*b'^2 + g1*b'^2 + g1'*b^2 + g1*(b*b' + b'*b) + g1'*(b*b' + b'*b)", s);
    CHECK(max_diff(expanded, h1) <= 1e-12);
}

TEST_CASE("support") {
    CHECK(d::support(d::parse("b^2")) == std::set<Mode>{Mode::m});
    CHECK(d::support(d::parse("(1 + g1)*(1 + g2)*b^2")) == std::set<Mode>{Mode::g1, Mode::g2, Mode::m});
    CHECK(d::support(d::parse("g1' * g1")) == std::set<Mode>{Mode::g1});
    CHECK(d::support(d::parse("3 + 2i")).empty());
}

TEST_CASE("evaluation outside the space is rejected") {
    const FockSpace s({{Mode::m, 4}});
    CHECK_THROWS_AS(d::evaluate("g1*b", s), std::invalid_argument);
    CHECK_NOTHROW(d::evaluate("b'^2", s));
}

TEST_CASE("round trip through to_string") {
    gen::Rng rng(101);
    const FockSpace s = make_space(3, 3, 4);
    for (int trial = 0; trial < 300; ++trial) {
        const std::string text = gen::expression(rng);
        const d::Expr e = d::parse(text);
        const std::string printed = d::to_string(e);
        INFO(text, " -> ", printed);
        CHECK(max_diff(d::evaluate(d::parse(printed), s), d::evaluate(e, s)) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("adjoint of text equals adjoint of the matrix") {
    gen::Rng rng(202);
    const FockSpace s = make_space(3, 3, 4);
    for (int trial = 0; trial < 300; ++trial) {
        const std::string text = gen::expression(rng);
        const d::Expr e = d::parse(text);
        const Operator direct = d::evaluate(e, s).adjoint();
        const Operator via_text = d::evaluate(d::adjoint(e), s);
        INFO(text);
        CHECK(max_diff(direct, via_text) <= 1e-12 * (1.0 + direct.matrix().cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("parser fuzz: random inputs parse or fail with a positioned error") {
    gen::Rng rng(303);
    const std::string alphabet = "gb12'^*+-() i.e0395x\t";
    std::size_t parsed = 0, rejected = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        std::string text;
        const std::size_t len = gen::integer(rng, 0, 24);
        for (std::size_t k = 0; k < len; ++k) {
            const bool byte = gen::integer(rng, 0, 15) == 0;
            text += byte ? static_cast<char>(gen::integer(rng, 1, 255)) : alphabet[gen::integer(rng, 0, alphabet.size() - 1)];
        }
        try {
            const d::Expr e = d::parse(text);
            ++parsed;
            CHECK_NOTHROW(d::to_string(e));
        } catch (const d::ParseError& e) {
            ++rejected;
            CHECK(e.offset() <= text.size());
            CHECK_FALSE(e.message().empty());
        }
    }
    CHECK(parsed + rejected == 10000);
    CHECK(parsed > 0);
}

}
