#include <doctest.h>

#include "filtap/error.hpp"
#include "filtap/homotopy.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace filtap;
using namespace filtap::test;

namespace {

PolySystem sys_of(const ContextPtr& ctx, const std::vector<std::string>& eqs) {
  std::vector<Jet> e;
  for (const auto& s : eqs) e.push_back(P(s, ctx));
  return PolySystem(ctx, e);
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::InvalidInput;
}

}  // namespace

TEST_CASE("verify_homotopy examples") {
  auto ctx = make_context({"x"}, {"y1", "y2"}, "t");
  auto sys = sys_of(ctx, {"y1*y2"});
  SolutionFamily fam{{P("t*x", ctx), P("0", ctx)}, I("x", ctx)};
  auto rep = verify_homotopy(sys, fam, {P("0", ctx), P("0", ctx)}, {P("x", ctx), P("0", ctx)});
  CHECK(rep.ok());
  REQUIRE(rep.certificates.size() == 2);
  CHECK(rep.certificates[0].verifies(P("t*x", ctx)));

  auto c1 = make_context({"x"}, {"y"}, "t");
  auto bad = verify_homotopy(sys_of(c1, {"y - x^2"}), SolutionFamily{{P("x^2 + t*x^5", c1)}, I("x", c1)},
                             {P("x^2", c1)}, {P("x^2 + x^5", c1)});
  CHECK(bad.endpoints);
  CHECK_FALSE(bad.solves);
  REQUIRE(bad.residual_witness);
  CHECK(bad.residual_witness->find("x^5*t") != std::string::npos);

  auto constant = verify_homotopy(sys_of(c1, {"y - x^2"}), SolutionFamily{{P("x^2", c1)}, I("x^3", c1)},
                                  {P("x^2", c1)}, {P("x^2", c1)});
  CHECK(constant.ok());
  CHECK(constant.certificates[0].cofactors.front().is_zero());

  auto wrong_end = verify_homotopy(sys, fam, {P("0", ctx), P("0", ctx)}, {P("2*x", ctx), P("0", ctx)});
  CHECK_FALSE(wrong_end.endpoints);
  auto outside = verify_homotopy(sys, SolutionFamily{fam.family, I("x^2", ctx)}, {P("0", ctx), P("0", ctx)},
                                 {P("x", ctx), P("0", ctx)});
  CHECK_FALSE(outside.stays_in_ideal);

  auto no_t = make_context({"x"}, {"y"});
  CHECK_THROWS_AS(verify_homotopy(sys_of(no_t, {"y"}), SolutionFamily{{P("0", no_t)}, I("x", no_t)}, {P("0", no_t)},
                                  {P("0", no_t)}),
                  Error);
}

TEST_CASE("parametric lift with t inert") {
  auto ctx = make_context({"x"}, {"y"}, "t");
  auto sys = sys_of(ctx, {"y^2 - 1 - x"});
  LiftRequest req{sys, {P("1", ctx)}, I("x", ctx), 8};
  auto fam = parametric_lift(req, SolutionFamily{{P("1", ctx)}, MonomialIdeal::zero(ctx)});
  CHECK_FALSE(fam.family[0].depends_on(*ctx->t_index()));
  CHECK(fam.family[0] == tougeron_step(req).y_solution[0]);
}

TEST_CASE("parametric lift along t matches pointwise solves") {
  auto ctx = make_context({"x"}, {"y"}, "t");
  auto sys = sys_of(ctx, {"y^2 - 1 - x - t*x"});
  LiftRequest req{sys, {P("1", ctx)}, I("x", ctx), 8};
  auto fam = parametric_lift(req, SolutionFamily{{P("1", ctx)}, MonomialIdeal::zero(ctx)});
  const std::size_t t = *ctx->t_index();

  // undetermined coefficients at t = 0 and t = 1 (x is variable 0, y is 1)
  for (int tv = 0; tv <= 1; ++tv) {
    auto bx = make_context({"x"}, {"y"});
    Jet spec_eq = P(tv ? "y^2 - 1 - 2*x" : "y^2 - 1 - x", bx);
    auto want = oracle::series_solve(oracle::bivariate_of(spec_eq), {1}, 0, 8);
    CHECK(oracle::dense_of(specialize(fam.family[0], t, tv), 8) == want);
  }

  Jet y0 = specialize(fam.family[0], t, 0), y1 = specialize(fam.family[0], t, 1);
  CHECK(verify_homotopy(sys, fam, {y0}, {y1}).ok());

  Rng rng(4);
  for (int i = 0; i < 5; ++i) {
    Rational tstar = random_rational(rng, 7);
    PolySystem pointwise(ctx, {specialize(sys.equations()[0], t, tstar)});
    LiftResult r = tougeron_step({pointwise, {P("1", ctx)}, I("x", ctx), 8});
    CHECK(specialize(fam.family[0], t, tstar) == r.y_solution[0]);
  }
}

TEST_CASE("parametric lift refusals") {
  auto ctx = make_context({"x"}, {"y"}, "t");
  // h = (1+t)^2 cannot be inverted uniformly in t
  auto sys = sys_of(ctx, {"(1 + t)*y - x"});
  CHECK(code_of([&] {
          parametric_lift({sys, {P("0", ctx)}, I("x", ctx), 4}, SolutionFamily{{P("0", ctx)}, I("x", ctx)});
        }) == Errc::HDegeneratesAlongT);

  auto sq = sys_of(ctx, {"y^2 - 1 - x"});
  CHECK(code_of([&] {
          parametric_lift({sq, {P("1", ctx)}, I("x", ctx), 4}, SolutionFamily{{P("1 + t", ctx)}, I("x", ctx)});
        }) == Errc::ResidualNotInIdeal);
}
