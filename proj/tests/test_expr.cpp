#include <doctest.h>

#include "filtap/error.hpp"
#include "support.hpp"

using namespace filtap;
using namespace filtap::test;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::InvalidInput;
}

std::optional<std::size_t> position_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.position();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("parse_polynomial examples") {
  auto ctx = make_context({"x"});
  Jet p = P("(1+x)^2", ctx);
  CHECK(p.coefficient(Monomial::one(*ctx)) == 1);
  CHECK(p.coefficient(Monomial::variable(*ctx, 0)) == 2);
  CHECK(p.coefficient(Monomial::variable(*ctx, 0, 2)) == 1);
  CHECK(p.terms().size() == 3);
  CHECK(p.exact());

  auto ctx2 = make_context({"x"}, {"y1"});
  Jet q = P("y1^2 - 1 - x", ctx2);
  CHECK(q.terms().size() == 3);
  CHECK(q.degree() == 2);
  CHECK(q.order() == 2);

  CHECK(code_of([&] { P("x^-1", ctx); }) == Errc::NegativeExponent);
}

TEST_CASE("rational literals and precedence") {
  auto ctx = make_context({"x", "y"});
  CHECK(to_expr(P("-5/8", ctx)) == "-5/8");
  CHECK(to_expr(P("6/4*x", ctx)) == "3/2*x");
  CHECK(P("-x^2", ctx) == P("-(x^2)", ctx));
  CHECK(P("2*x^2", ctx) == P("2*(x^2)", ctx));
  CHECK(P("1 + 2*3", ctx) == P("7", ctx));
  CHECK(P("x - y - x", ctx) == P("-y", ctx));
}

TEST_CASE("parse errors carry positions") {
  auto ctx = make_context({"x"});
  CHECK(code_of([&] { P("2x", ctx); }) == Errc::SyntaxError);
  CHECK(position_of([&] { P("2x", ctx); }) == 1u);
  CHECK(code_of([&] { P("x + q", ctx); }) == Errc::UnknownVariable);
  CHECK(position_of([&] { P("x + q", ctx); }) == 4u);
  CHECK(code_of([&] { P("x/2", ctx); }) == Errc::SyntaxError);
  CHECK(code_of([&] { P("(x", ctx); }) == Errc::SyntaxError);
  CHECK(code_of([&] { P("1/0", ctx); }) == Errc::SyntaxError);
  CHECK(code_of([&] { P("x^2^3", ctx); }) == Errc::SyntaxError);
  CHECK(code_of([&] { P("x # 1", ctx); }) == Errc::SyntaxError);
  CHECK(code_of([&] { P("", ctx); }) == Errc::SyntaxError);
}

TEST_CASE("parse_monomial_ideal examples") {
  auto ctx = make_context({"x1", "x2"});
  auto a = I("x1, x1^2", ctx);
  REQUIRE(a.generators().size() == 1);
  CHECK(to_expr(a) == "x1");
  auto b = I("x1*x2, x2^2", ctx);
  CHECK(b.generators().size() == 2);
  CHECK(code_of([&] { I("x1 + x2", ctx); }) == Errc::NotAMonomial);
  CHECK(code_of([&] { I("x1, 2*x2", ctx); }) == Errc::NotAMonomial);
  CHECK(position_of([&] { I("x1, 2*x2", ctx); }) == 4u);
  CHECK(I("0", ctx).is_zero());
  CHECK(I("", ctx).is_zero());
  CHECK(I("1", ctx).is_unit());
}

TEST_CASE("round trip of random polynomials") {
  auto ctx = make_context({"x1", "x2"}, {"y"}, "t");
  Rng rng(11);
  std::vector<std::size_t> all{0, 1, 2, 3};
  for (int i = 0; i < 200; ++i) {
    std::bernoulli_distribution keep(0.3);
    Jet::Terms t;
    for (const auto& m : monomials_in(*ctx, all, 0, 4))
      if (keep(rng)) t.emplace(m, random_rational(rng, 9));
    Jet p = Jet::polynomial(ctx, t);
    Jet back = P(to_expr(p), ctx);
    CHECK(back.terms() == p.terms());
    CHECK(parse_jet(serialize_jet(p), ctx) == p);
    Jet trunc = p.at_order(2);
    Jet back2 = parse_jet(serialize_jet(trunc), ctx);
    CHECK(back2 == trunc);
    CHECK(back2.exact() == trunc.exact());
  }
}

TEST_CASE("fuzzed input parses or fails with a position") {
  auto ctx = make_context({"x", "y"});
  const std::string alphabet = "xy0123/+-*^() ,z";
  Rng rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 14);
  int parsed = 0, rejected = 0;
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    for (int k = len(rng); k > 0; --k) s += alphabet[pick(rng)];
    try {
      P(s, ctx);
      ++parsed;
    } catch (const Error& e) {
      ++rejected;
      CHECK(e.position().has_value());
    }
  }
  CHECK(parsed > 0);
  CHECK(rejected > 0);
}
