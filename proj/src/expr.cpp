#include "filtap/expr.hpp"

#include <cctype>
#include <limits>

#include "filtap/error.hpp"
#include "filtap/ideal.hpp"

namespace filtap {

namespace {

constexpr unsigned kParseOrder = std::numeric_limits<unsigned>::max() / 4;
constexpr unsigned kMaxExponent = 4096;

enum class Tok { Int, Name, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string text;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::End, start, {}};
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return {Tok::Int, start, std::string(src_.substr(start, pos_ - start))};
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      return {Tok::Name, start, std::string(src_.substr(start, pos_ - start))};
    }
    ++pos_;
    switch (c) {
      case '+': return {Tok::Plus, start, "+"};
      case '-': return {Tok::Minus, start, "-"};
      case '*': return {Tok::Star, start, "*"};
      case '/': return {Tok::Slash, start, "/"};
      case '^': return {Tok::Caret, start, "^"};
      case '(': return {Tok::LParen, start, "("};
      case ')': return {Tok::RParen, start, ")"};
      case ',': return {Tok::Comma, start, ","};
      default: break;
    }
    throw Error(Errc::SyntaxError, std::string("unexpected character '") + c + "'", start);
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
public:
  Parser(std::string_view src, ContextPtr ctx, std::size_t offset = 0)
      : lex_(src), ctx_(std::move(ctx)), offset_(offset) {
    advance();
  }

  Jet parse_all() {
    Jet e = expr();
    if (cur_.kind != Tok::End) fail("unexpected '" + cur_.text + "'");
    return Jet::polynomial(ctx_, e.terms());
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::SyntaxError, what, offset_ + cur_.pos);
  }

  void advance() {
    try {
      cur_ = lex_.next();
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), offset_ + e.position().value_or(0));
    }
  }

  Jet expr() {
    Jet acc = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      bool minus = cur_.kind == Tok::Minus;
      advance();
      Jet t = term();
      acc = minus ? acc - t : acc + t;
    }
    return acc;
  }

  Jet term() {
    Jet acc = factor();
    while (cur_.kind == Tok::Star) {
      advance();
      acc = acc * factor();
    }
    return acc;
  }

  Jet factor() {
    if (cur_.kind == Tok::Minus) {
      advance();
      return -factor();
    }
    if (cur_.kind == Tok::Plus) {
      advance();
      return factor();
    }
    Jet base = primary();
    if (cur_.kind == Tok::Caret) {
      advance();
      if (cur_.kind == Tok::Minus) throw Error(Errc::NegativeExponent, "exponent must be >= 0", offset_ + cur_.pos);
      if (cur_.kind != Tok::Int) fail("expected a non-negative integer exponent");
      if (cur_.text.size() > 5 || std::stoul(cur_.text) > kMaxExponent) fail("exponent too large");
      unsigned e = static_cast<unsigned>(std::stoul(cur_.text));
      advance();
      return power(base, e);
    }
    return base;
  }

  Jet primary() {
    switch (cur_.kind) {
      case Tok::Int: {
        std::string num = cur_.text;
        advance();
        std::string den = "1";
        if (cur_.kind == Tok::Slash) {
          advance();
          if (cur_.kind != Tok::Int) fail("expected an integer denominator");
          den = cur_.text;
          if (mpz_class(den) == 0) fail("zero denominator");
          advance();
        }
        Rational r{mpz_class(num), mpz_class(den)};
        r.canonicalize();
        return Jet::constant(ctx_, r, kParseOrder);
      }
      case Tok::Name: {
        auto idx = ctx_->index_of(cur_.text);
        if (!idx) throw Error(Errc::UnknownVariable, cur_.text, offset_ + cur_.pos);
        advance();
        return Jet::variable(ctx_, *idx, kParseOrder);
      }
      case Tok::LParen: {
        advance();
        Jet e = expr();
        if (cur_.kind != Tok::RParen) fail("expected ')'");
        advance();
        return e;
      }
      case Tok::End: fail("unexpected end of input");
      default: fail("unexpected '" + cur_.text + "'");
    }
  }

  Lexer lex_;
  ContextPtr ctx_;
  std::size_t offset_;
  Token cur_{Tok::End, 0, {}};
};

std::string coeff_prefix(const Rational& abs_c, bool has_monomial) {
  if (!has_monomial) return to_string(abs_c);
  if (abs_c == 1) return {};
  return to_string(abs_c) + "*";
}

}  // namespace

Jet parse_polynomial(std::string_view src, const ContextPtr& ctx) { return Parser(src, ctx).parse_all(); }

MonomialIdeal parse_monomial_ideal(std::string_view src, const ContextPtr& ctx) {
  std::vector<Monomial> gens;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= src.size(); ++i) {
    if (i < src.size() && src[i] == '(') ++depth;
    if (i < src.size() && src[i] == ')') --depth;
    if (i < src.size() && !(src[i] == ',' && depth == 0)) continue;
    std::string_view item = src.substr(start, i - start);
    std::size_t lead = 0;
    while (lead < item.size() && std::isspace(static_cast<unsigned char>(item[lead]))) ++lead;
    std::size_t item_pos = start + lead;
    start = i + 1;
    if (lead == item.size()) {
      if (src.find_first_not_of(" \t\r\n") == std::string_view::npos) break;  // empty text: zero ideal
      throw Error(Errc::SyntaxError, "empty ideal generator", item_pos);
    }
    Jet p = Parser(item, ctx, start - 1 - item.size()).parse_all();
    if (p.is_zero()) continue;
    if (p.terms().size() != 1 || p.terms().begin()->second != 1)
      throw Error(Errc::NotAMonomial, "generator is not a pure monomial", item_pos);
    gens.push_back(p.terms().begin()->first);
  }
  return MonomialIdeal(ctx, std::move(gens));
}

std::string to_expr(const Monomial& m, const VarContext& ctx) {
  std::string out;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    unsigned e = m.exponent(i);
    if (e == 0) continue;
    if (!out.empty()) out += "*";
    out += ctx.name(i);
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

std::string to_expr(const Jet& jet) {
  if (jet.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : jet.terms()) {
    bool neg = c < 0;
    Rational a = neg ? Rational(-c) : c;
    bool has_mono = !m.is_one();
    if (first)
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    out += coeff_prefix(a, has_mono);
    if (has_mono) out += to_expr(m, jet.ctx());
    first = false;
  }
  return out;
}

std::string serialize_jet(const Jet& jet) {
  std::string out = to_expr(jet) + " | order: " + std::to_string(jet.order());
  if (jet.exact()) out += ", exact";
  return out;
}

Jet parse_jet(std::string_view src, const ContextPtr& ctx) {
  auto bar = src.rfind('|');
  if (bar == std::string_view::npos) return parse_polynomial(src, ctx);
  Jet p = parse_polynomial(src.substr(0, bar), ctx);
  std::string attr(src.substr(bar + 1));
  auto key = attr.find("order:");
  if (key == std::string::npos) throw Error(Errc::SyntaxError, "missing 'order:' attribute", bar + 1);
  std::size_t i = key + 6;
  while (i < attr.size() && attr[i] == ' ') ++i;
  std::size_t j = i;
  while (j < attr.size() && std::isdigit(static_cast<unsigned char>(attr[j]))) ++j;
  if (j == i || j - i > 9) throw Error(Errc::SyntaxError, "bad order value", bar + 1 + i);
  unsigned order = static_cast<unsigned>(std::stoul(attr.substr(i, j - i)));
  std::string rest = attr.substr(j);
  bool exact = false;
  auto nonblank = rest.find_first_not_of(' ');
  if (nonblank != std::string::npos) {
    if (rest.substr(nonblank) != ", exact") throw Error(Errc::SyntaxError, "bad jet attributes", bar + 1 + j);
    exact = true;
  }
  if (p.degree() > order) throw Error(Errc::InvalidInput, "jet has terms above its order");
  return Jet::from_terms(ctx, p.terms(), order, exact);
}

std::string to_expr(const MonomialIdeal& ideal) {
  if (ideal.is_zero()) return "0";
  std::string out;
  for (const auto& g : ideal.generators()) {
    if (!out.empty()) out += ", ";
    out += to_expr(g, *ideal.context());
  }
  return out;
}

}  // namespace filtap
