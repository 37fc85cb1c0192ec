#include "gravwit/opdsl.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <system_error>

namespace gravwit::dsl {

ParseError::ParseError(std::size_t offset, const std::string& message)
    : std::runtime_error("parse error at offset " + std::to_string(offset) + ": " + message),
      offset_(offset),
      message_(message) {}

namespace {

constexpr std::size_t max_depth = 200;
constexpr std::string_view dagger_utf8 = "\xE2\x80\xA0";

// A parsed unary/power/primary: a scalar coefficient and at most one operator factor.
struct Piece {
    cplx coeff{1.0, 0.0};
    std::optional<Factor> factor;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

cplx int_power(cplx base, unsigned n) {
    cplx result{1.0, 0.0};
    for (unsigned k = 0; k < n; ++k) result *= base;
    return result;
}

class Parser {
  public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr parse_all() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ < text_.size()) {
            if (text_[pos_] == ')') fail(pos_, "unbalanced parentheses");
            fail(pos_, "unexpected character '" + std::string(1, text_[pos_]) + "'");
        }
        return e;
    }

  private:
    [[noreturn]] void fail(std::size_t at, const std::string& msg) const { throw ParseError(at, msg); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    Expr parse_expr() {
        if (++depth_ > max_depth) fail(pos_, "nesting too deep");
        Expr e;
        e.terms.push_back(parse_term());
        while (true) {
            skip_ws();
            if (pos_ >= text_.size()) break;
            const char c = text_[pos_];
            if (c != '+' && c != '-') break;
            ++pos_;
            Term t = parse_term();
            if (c == '-') t.coeff = -t.coeff;
            e.terms.push_back(std::move(t));
        }
        --depth_;
        return e;
    }

    Term parse_term() {
        Term t;
        absorb(t, parse_unary());
        while (peek('*')) {
            ++pos_;
            absorb(t, parse_unary());
        }
        return t;
    }

    static void absorb(Term& t, Piece p) {
        t.coeff *= p.coeff;
        if (p.factor) t.factors.push_back(std::move(*p.factor));
    }

    Piece parse_unary() {
        skip_ws();
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
            const bool negate = text_[pos_] == '-';
            ++pos_;
            if (++depth_ > max_depth) fail(pos_, "nesting too deep");
            Piece p = parse_unary();
            --depth_;
            if (negate) p.coeff = -p.coeff;
            return p;
        }
        return parse_power();
    }

    Piece parse_power() {
        Piece p = parse_primary();
        while (peek('^')) {
            ++pos_;
            skip_ws();
            const std::size_t start = pos_;
            while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
            if (start == pos_) fail(start, "expected non-negative integer exponent");
            unsigned n = 0;
            const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, n);
            if (ec != std::errc{} || n > 4096) fail(start, "exponent too large");
            if (p.factor) {
                p.factor = Factor{Power{std::make_shared<const Factor>(std::move(*p.factor)), n}};
            } else {
                p.coeff = int_power(p.coeff, n);
            }
        }
        return p;
    }

    Piece parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail(pos_, "unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            const std::size_t open = pos_;
            ++pos_;
            Expr inner = parse_expr();
            if (!peek(')')) fail(open, "unbalanced parentheses");
            ++pos_;
            bool scalar_only = true;
            cplx sum = 0.0;
            for (const auto& t : inner.terms) {
                if (!t.factors.empty()) scalar_only = false;
                sum += t.coeff;
            }
            if (scalar_only) return Piece{sum, std::nullopt};
            return Piece{cplx{1.0, 0.0}, Factor{SubExpr{std::make_shared<const Expr>(std::move(inner))}}};
        }
        if (is_digit(c) || c == '.') return Piece{parse_scalar(), std::nullopt};
        if (is_ident_start(c)) return parse_identifier();
        if (c == ')') fail(pos_, "unbalanced parentheses");
        fail(pos_, "unexpected character '" + std::string(1, c) + "'");
    }

    cplx parse_scalar() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (is_digit(text_[pos_]) || text_[pos_] == '.')) ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && is_digit(text_[look])) {
                pos_ = look;
                while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
            } else {
                fail(start, "malformed scalar");
            }
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc{} || ptr != text_.data() + pos_) fail(start, "malformed scalar");
        bool imaginary = false;
        if (pos_ < text_.size() && text_[pos_] == 'i') {
            imaginary = true;
            ++pos_;
        }
        if (pos_ < text_.size() && (is_ident_char(text_[pos_]) || text_[pos_] == '.'))
            fail(start, "malformed scalar");
        return imaginary ? cplx{0.0, value} : cplx{value, 0.0};
    }

    Piece parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "i") return Piece{cplx{0.0, 1.0}, std::nullopt};
        Mode mode;
        if (name == "g1") {
            mode = Mode::g1;
        } else if (name == "g2") {
            mode = Mode::g2;
        } else if (name == "b") {
            mode = Mode::m;
        } else {
            fail(start, "unknown mode " + std::string(name));
        }
        bool dagger = false;
        if (pos_ < text_.size() && text_[pos_] == '\'') {
            dagger = true;
            ++pos_;
        } else if (text_.substr(pos_, dagger_utf8.size()) == dagger_utf8) {
            dagger = true;
            pos_ += dagger_utf8.size();
        }
        return Piece{cplx{1.0, 0.0}, Factor{ModeSymbol{mode, dagger}}};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t depth_ = 0;
};

Operator evaluate_factor(const Factor& f, const FockSpace& space);

Operator evaluate_expr(const Expr& e, const FockSpace& space) {
    Operator sum = zero_operator(space);
    for (const auto& t : e.terms) {
        Operator prod = identity(space);
        for (const auto& f : t.factors) prod = prod * evaluate_factor(f, space);
        sum += t.coeff * prod;
    }
    return sum;
}

Operator evaluate_factor(const Factor& f, const FockSpace& space) {
    if (const auto* sym = std::get_if<ModeSymbol>(&f.node)) {
        if (!space.has(sym->mode))
            throw std::invalid_argument("evaluate: mode " + std::string(mode_name(sym->mode)) +
                                        " not in space");
        Operator a = annihilator(space, sym->mode);
        return sym->dagger ? a.adjoint() : a;
    }
    if (const auto* sub = std::get_if<SubExpr>(&f.node)) return evaluate_expr(*sub->expr, space);
    const auto& pw = std::get<Power>(f.node);
    Operator base = evaluate_factor(*pw.base, space);
    Operator result = identity(space);
    for (unsigned n = pw.exponent; n > 0; n >>= 1) {
        if (n & 1u) result = result * base;
        if (n > 1) base = base * base;
    }
    return result;
}

void collect_support(const Factor& f, std::set<Mode>& out);

void collect_support(const Expr& e, std::set<Mode>& out) {
    for (const auto& t : e.terms)
        for (const auto& f : t.factors) collect_support(f, out);
}

void collect_support(const Factor& f, std::set<Mode>& out) {
    if (const auto* sym = std::get_if<ModeSymbol>(&f.node)) {
        out.insert(sym->mode);
    } else if (const auto* sub = std::get_if<SubExpr>(&f.node)) {
        collect_support(*sub->expr, out);
    } else {
        collect_support(*std::get<Power>(f.node).base, out);
    }
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string format_coeff(cplx c) {
    if (c.imag() == 0.0) return format_double(c.real());
    if (c.real() == 0.0) return format_double(c.imag()) + "i";
    std::string s = "(" + format_double(c.real());
    if (std::signbit(c.imag())) {
        s += " - " + format_double(-c.imag()) + "i)";
    } else {
        s += " + " + format_double(c.imag()) + "i)";
    }
    return s;
}

std::string factor_to_string(const Factor& f);

std::string term_to_string(const Term& t) {
    std::string body;
    for (std::size_t k = 0; k < t.factors.size(); ++k) {
        if (k > 0) body += "*";
        body += factor_to_string(t.factors[k]);
    }
    if (body.empty()) return format_coeff(t.coeff);
    if (t.coeff == cplx{1.0, 0.0} && !std::signbit(t.coeff.imag())) return body;
    if (t.coeff == cplx{-1.0, 0.0} && !std::signbit(t.coeff.imag())) return "-" + body;
    return format_coeff(t.coeff) + "*" + body;
}

std::string factor_to_string(const Factor& f) {
    if (const auto* sym = std::get_if<ModeSymbol>(&f.node)) {
        std::string s = sym->mode == Mode::m ? "b" : std::string(mode_name(sym->mode));
        if (sym->dagger) s += "'";
        return s;
    }
    if (const auto* sub = std::get_if<SubExpr>(&f.node)) return "(" + to_string(*sub->expr) + ")";
    const auto& pw = std::get<Power>(f.node);
    return factor_to_string(*pw.base) + "^" + std::to_string(pw.exponent);
}

Factor adjoint_factor(const Factor& f) {
    if (const auto* sym = std::get_if<ModeSymbol>(&f.node)) return Factor{ModeSymbol{sym->mode, !sym->dagger}};
    if (const auto* sub = std::get_if<SubExpr>(&f.node))
        return Factor{SubExpr{std::make_shared<const Expr>(adjoint(*sub->expr))}};
    const auto& pw = std::get<Power>(f.node);
    return Factor{Power{std::make_shared<const Factor>(adjoint_factor(*pw.base)), pw.exponent}};
}

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

Operator evaluate(const Expr& expr, const FockSpace& space) { return evaluate_expr(expr, space); }

Operator evaluate(std::string_view text, const FockSpace& space) { return evaluate(parse(text), space); }

std::set<Mode> support(const Expr& expr) {
    std::set<Mode> out;
    collect_support(expr, out);
    return out;
}

std::string to_string(const Expr& expr) {
    if (expr.terms.empty()) return "0";
    std::string s;
    for (std::size_t k = 0; k < expr.terms.size(); ++k) {
        std::string t = term_to_string(expr.terms[k]);
        if (k == 0) {
            s = std::move(t);
        } else if (t.front() == '-') {
            s += " - " + t.substr(1);
        } else {
            s += " + " + t;
        }
    }
    return s;
}

Expr adjoint(const Expr& expr) {
    Expr out;
    out.terms.reserve(expr.terms.size());
    for (const auto& t : expr.terms) {
        Term a;
        a.coeff = std::conj(t.coeff);
        for (auto it = t.factors.rbegin(); it != t.factors.rend(); ++it) a.factors.push_back(adjoint_factor(*it));
        out.terms.push_back(std::move(a));
    }
    return out;
}

}  // namespace gravwit::dsl
