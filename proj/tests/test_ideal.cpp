#include <doctest.h>

#include "filtap/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace filtap;
using namespace filtap::test;

namespace {

using oracle::raw_member;

std::vector<Monomial> random_gens(Rng& rng, const VarContext& ctx, std::size_t count, unsigned lo, unsigned hi) {
  auto pool = monomials_in(ctx, x_indices(ctx), lo, hi);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::vector<Monomial> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(pool[pick(rng)]);
  return out;
}

}  // namespace

TEST_CASE("ideal membership examples") {
  auto ctx = make_context({"x1", "x2"});
  auto a = I("x1^2, x1*x2", ctx);
  auto f = P("x1^3 + x1*x2^2", ctx);
  auto mem = contains_jet(a, f);
  REQUIRE(mem);
  CHECK(mem.certificate->verifies(f));
  CHECK(mem.certificate->recombine(ctx, f.order(), true) == f);

  auto out = contains_jet(a, P("x1^3 + x2^3", ctx));
  CHECK_FALSE(out);
  REQUIRE(out.offending);
  CHECK(to_expr(*out.offending, *ctx) == "x2^3");
}

TEST_CASE("ideal operations examples") {
  auto ctx = make_context({"x1", "x2"});
  auto m = MonomialIdeal::maximal(ctx);
  CHECK(power(m, 2) == I("x1^2, x1*x2, x2^2", ctx));
  CHECK(intersection(I("x1", ctx), I("x2", ctx)) == I("x1*x2", ctx));
  CHECK(sum(I("x1^2", ctx), I("x1*x2", ctx)) == I("x1^2, x1*x2", ctx));
  CHECK(product(I("x1", ctx), I("x1, x2", ctx)) == I("x1^2, x1*x2", ctx));
  CHECK(contains_ideal(m, power(m, 3)));
  CHECK_FALSE(contains_ideal(power(m, 3), m));
  CHECK(power(m, 0).is_unit());
  CHECK(MonomialIdeal::zero(ctx).min_degree().is_infinite());
  CHECK(power(m, 4).min_degree() == 4u);
}

TEST_CASE("reduce_mod drops ideal terms") {
  auto ctx = make_context({"x1", "x2"});
  auto r = reduce_mod(P("1 + x1 + x1^2 + x2^3 + x1*x2", ctx), I("x1^2, x2^2", ctx));
  CHECK(r.terms() == P("1 + x1 + x1*x2", ctx).terms());
  CHECK(r.order() == 3);
}

TEST_CASE("generators must involve x only") {
  auto ctx = make_context({"x"}, {"y"});
  CHECK_THROWS_AS(I("y", ctx), Error);
  auto other = make_context({"x"});
  CHECK_THROWS_AS(sum(I("x", ctx), I("x", other)), Error);
}

TEST_CASE("operations agree with brute-force enumeration") {
  auto ctx = make_context({"x1", "x2", "x3"});
  auto all = monomials_in(*ctx, x_indices(*ctx), 0, 8);
  Rng rng(41);
  for (int round = 0; round < 40; ++round) {
    auto ga = random_gens(rng, *ctx, 1 + round % 4, 1, 3);
    auto gb = random_gens(rng, *ctx, 1 + round % 3, 1, 3);
    MonomialIdeal a(ctx, ga), b(ctx, gb);

    std::vector<Monomial> gprod;
    for (const auto& p : ga)
      for (const auto& q : gb) gprod.push_back(p.times(q));

    auto s = sum(a, b), p = product(a, b), c = intersection(a, b);
    for (const auto& m : all) {
      bool in_a = raw_member(*ctx, ga, m), in_b = raw_member(*ctx, gb, m);
      CHECK(a.contains(m) == in_a);
      CHECK(s.contains(m) == (in_a || in_b));
      CHECK(c.contains(m) == (in_a && in_b));
      CHECK(p.contains(m) == raw_member(*ctx, gprod, m));
    }
    CHECK(contains_ideal(a, c));
    CHECK(contains_ideal(s, a));
    CHECK(contains_ideal(c, p));

    // minimal generating set: no generator divides another
    for (const auto& ideal : {a, s, p, c}) {
      const auto& g = ideal.generators();
      for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
          if (i != j) CHECK_FALSE(g[i].divides(g[j], *ctx));
    }
  }
}

TEST_CASE("certificates recombine to the input") {
  auto ctx = make_context({"x1", "x2"});
  Rng rng(8);
  for (int i = 0; i < 80; ++i) {
    auto gens = random_gens(rng, *ctx, 1 + i % 3, 1, 3);
    MonomialIdeal a(ctx, gens);
    Jet f = random_x_jet(rng, ctx, 7, 0, 7, 0.4);
    Jet in = Jet::zero(ctx, 7).inexact();
    Jet::Terms kept;
    for (const auto& [m, c] : f.terms())
      if (a.contains(m)) kept.emplace(m, c);
    in = Jet::from_terms(ctx, kept, 7, false);
    auto mem = contains_jet(a, in);
    REQUIRE(mem);
    CHECK(mem.certificate->verifies(in));
    for (std::size_t k = 0; k < mem.certificate->generators.size(); ++k)
      CHECK(mem.certificate->cofactors[k].order() + mem.certificate->generators[k].degree() >= 7);

    Jet out = reduce_mod(f, a);
    CHECK(out + in == f);
    if (!out.is_zero()) CHECK_FALSE(contains_jet(a, f));
  }
}

TEST_CASE("reduce_mod is multiplicative on representatives") {
  auto ctx = make_context({"x1", "x2"});
  Rng rng(12);
  for (int i = 0; i < 60; ++i) {
    MonomialIdeal J(ctx, random_gens(rng, *ctx, 1 + i % 3, 1, 3));
    Jet f = random_x_jet(rng, ctx, 6, 0, 6), g = random_x_jet(rng, ctx, 6, 0, 6);
    CHECK(reduce_mod(f * g, J) == reduce_mod(reduce_mod(f, J) * reduce_mod(g, J), J));
    CHECK(reduce_mod(reduce_mod(f, J), J) == reduce_mod(f, J));
  }
}

TEST_CASE("spec membership examples") {
  auto ctx = make_context({"x1", "x2"});
  auto mem = contains_jet(I("x1*x2", ctx), P("x1^2*x2 + x1*x2^2", ctx));
  REQUIRE(mem);
  CHECK(mem.certificate->cofactors.front().terms() == P("x1 + x2", ctx).terms());
  auto out = contains_jet(I("x1^2", ctx), P("x1 + x2^2", ctx));
  REQUIRE(out.offending);
  CHECK(to_expr(*out.offending, *ctx) == "x1");
  auto zero = contains_jet(I("x1", ctx), Jet::zero(ctx, 3));
  REQUIRE(zero);
  CHECK(zero.certificate->cofactors.front().is_zero());
  CHECK(power(MonomialIdeal::maximal(ctx), 3).generators().size() == 4);
  CHECK(sum(I("x1^2", ctx), I("x2, x1^2*x2", ctx)) == I("x1^2, x2", ctx));
}
