#pragma once

// Textual ladder-operator expressions.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary ('*' unary)*
//   unary  := ('+' | '-') unary | power
//   power  := primary ('^' uint)*
//   primary:= scalar | atom | '(' expr ')'
//   atom   := g1 | g2 | b, optionally followed by ' (or U+2020) for the adjoint
//   scalar := decimal literal with optional trailing 'i', or 'i' alone
//
// Products keep the written order; nothing is normal-ordered or simplified,
// except that pure scalars (including parenthesized scalar sums) fold into
// the coefficient of the enclosing term.

#include "gravwit/fock.hpp"

#include <cstddef>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gravwit::dsl {

struct Expr;
struct Factor;

struct ModeSymbol {
    Mode mode;
    bool dagger = false;
};

struct SubExpr {
    std::shared_ptr<const Expr> expr;
};

struct Power {
    std::shared_ptr<const Factor> base;
    unsigned exponent = 0;
};

struct Factor {
    std::variant<ModeSymbol, SubExpr, Power> node;
};

struct Term {
    cplx coeff{1.0, 0.0};
    std::vector<Factor> factors;
};

struct Expr {
    std::vector<Term> terms;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t offset, const std::string& message);

    std::size_t offset() const noexcept { return offset_; }
    const std::string& message() const noexcept { return message_; }

  private:
    std::size_t offset_;
    std::string message_;
};

Expr parse(std::string_view text);

/// Throws std::invalid_argument if the expression mentions a mode absent from `space`.
Operator evaluate(const Expr& expr, const FockSpace& space);
Operator evaluate(std::string_view text, const FockSpace& space);

std::set<Mode> support(const Expr& expr);

/// Reparseable text; parse(to_string(e)) evaluates to the same matrix as e.
std::string to_string(const Expr& expr);

/// Hermitian conjugate: reversed factor order, conjugated coefficients, toggled daggers.
Expr adjoint(const Expr& expr);

}  // namespace gravwit::dsl
