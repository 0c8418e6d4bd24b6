#include <doctest.h>

#include <cmath>
#include <sstream>

#include "filtap/borel.hpp"
#include "filtap/error.hpp"

using namespace filtap;
using namespace filtap::borel;

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

const CutoffSpec kSpec{{-0.1, 0.1}, {-0.5, 0.5}, {0.15, 0.1, 0.05}};

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v)
    if (!std::isnan(x)) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("cutoff shape") {
  auto grid = Grid1D::over(-0.6, 0.6, 4097);
  auto tau = build_cutoff(kSpec, grid);
  for (std::size_t i = 0; i < grid.n; ++i) {
    double x = grid.x(i), v = tau.values[i];
    CHECK(v >= 0);
    CHECK(v <= 1 + 1e-12);
    if (kSpec.Z.contains(x)) CHECK(v == 1.0);
    if (x <= kSpec.U.lo || x >= kSpec.U.hi) CHECK(v == 0.0);
    // non-increasing away from Z on each side
    if (i > 0 && x > 0) CHECK(v <= tau.values[i - 1] + 1e-12);
    if (i > 0 && x <= 0) CHECK(v >= tau.values[i - 1] - 1e-12);
  }
}

TEST_CASE("single width gives the ramp") {
  auto grid = Grid1D::over(-0.6, 0.6, 4097);
  CutoffSpec spec{{-0.1, 0.1}, {-0.5, 0.5}, {0.2}};
  auto tau = build_cutoff(spec, grid);
  // continuous oracle: |[x - d/2, x + d/2] ∩ [-R, R]| / d with R = 0.1 + 0.2
  const double d = 0.2, R = 0.3;
  double worst = 0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    double x = grid.x(i);
    double exact = std::max(0.0, std::min(x + d / 2, R) - std::max(x - d / 2, -R)) / d;
    worst = std::max(worst, std::abs(exact - tau.values[i]));
  }
  CHECK(worst <= 2 * grid.step() / d);
  CHECK(max_abs(finite_difference(tau, 1)) <= 1 / d * 1.01);
  auto rep = check_derivative_bounds(tau, spec, 1);
  REQUIRE(rep.orders.size() == 1);
  CHECK(rep.orders[0].sharp_ratio == doctest::Approx(1.0).epsilon(0.02));
  CHECK(rep.orders[0].ratio == doctest::Approx(0.5).epsilon(0.02));
  CHECK(rep.ok);
}

TEST_CASE("cutoff refusals") {
  auto grid = Grid1D::over(-0.6, 0.6, 4097);
  CHECK(code_of([&] { build_cutoff({{-0.1, 0.1}, {-0.5, 0.5}, {0.2, 0.15, 0.1}}, grid); }) == Errc::WidthsTooLarge);
  CHECK(code_of([&] { build_cutoff(kSpec, Grid1D::over(-0.6, 0.6, 101)); }) == Errc::GridTooCoarse);
  CHECK(code_of([&] { build_cutoff({{-0.1, 0.1}, {-0.5, 0.5}, {0.1, 0.1}}, grid); }) == Errc::InvalidInput);
  CHECK(code_of([&] { build_cutoff({{-0.1, 0.1}, {-0.5, 0.5}, {}}, grid); }) == Errc::InvalidInput);
  auto tau = build_cutoff(kSpec, grid);
  CHECK(code_of([&] { check_derivative_bounds(tau, kSpec, 4); }) == Errc::InvalidInput);
  // a spec whose smallest width the 1025-point grid cannot resolve
  auto coarse = build_cutoff(kSpec, Grid1D::over(-0.6, 0.6, 1025));
  const CutoffSpec fine{{-0.1, 0.1}, {-0.5, 0.5}, {0.15, 0.1, 0.008}};
  CHECK(code_of([&] { check_derivative_bounds(coarse, fine, 3); }) == Errc::GridTooCoarse);
  auto small = build_cutoff(kSpec, Grid1D::over(-0.6, 0.6, 513));
  CHECK(code_of([&] { check_derivative_bounds(small, kSpec, 1); }) == Errc::GridTooCoarse);
}

TEST_CASE("derivative bounds for three widths") {
  auto grid = Grid1D::over(-0.6, 0.6, 4097);
  auto tau = build_cutoff(kSpec, grid);
  auto rep = check_derivative_bounds(tau, kSpec, 2);
  CHECK(rep.ok);
  CHECK(rep.margin > 0);
  for (const auto& b : rep.orders) CHECK(b.ratio <= 1.15);
  CHECK(check_derivative_bounds(tau, kSpec, 3).ok);
}

TEST_CASE("each convolution weakly lowers derivative peaks") {
  auto grid = Grid1D::over(-0.6, 0.6, 8193);
  auto stages = cutoff_stages(kSpec, grid);
  REQUIRE(stages.size() == 4);
  for (unsigned k = 1; k <= 2; ++k)
    for (std::size_t s = k + 1; s < stages.size(); ++s)
      CHECK(max_abs(finite_difference(stages[s], k)) <= max_abs(finite_difference(stages[s - 1], k)) * (1 + 1e-9));
}

TEST_CASE("finite differences on a cubic") {
  auto grid = Grid1D::over(-1, 1, 2049);
  auto f = sample(grid, [](double x) { return x * x * x; });
  auto d1 = finite_difference(f, 1), d2 = finite_difference(f, 2), d3 = finite_difference(f, 3);
  for (std::size_t i = 4; i + 4 < grid.n; ++i) {
    double x = grid.x(i);
    CHECK(d1[i] == doctest::Approx(3 * x * x).epsilon(1e-5));
    CHECK(std::abs(d2[i] - 6 * x) < 1e-6);
    CHECK(d3[i] == doctest::Approx(6).epsilon(1e-5));
  }
  CHECK(std::isnan(d3.front()));
  CHECK(std::isnan(d3.back()));
}

TEST_CASE("flat bounds examples") {
  auto grid = Grid1D::over(-1, 1, 4097);
  const Interval left{-INFINITY, 0.1};
  auto model = sample(grid, [](double x) { return x > 0.1 ? std::pow(x - 0.1, 5) : 0.0; });
  auto rep = check_flat_bounds(model, left, 5, 2);
  CHECK(rep.ok);
  REQUIRE(rep.orders.size() == 3);
  const double falling[] = {1, 5, 20};
  for (unsigned k = 0; k <= 2; ++k) {
    CHECK(rep.orders[k].constant == doctest::Approx(falling[k]).epsilon(0.02));
    CHECK(rep.orders[k].slope == doctest::Approx(5.0 - k).epsilon(0.02));
  }

  auto bump = sample(grid, [](double x) { return x == 0 ? 0.0 : std::exp(-1 / (x * x)); });
  for (unsigned j = 3; j <= 6; ++j) CHECK(check_flat_bounds(bump, {0, 0}, j, 2).ok);

  auto wrong = sample(grid, [](double x) { return x > 0.1 ? std::pow(x - 0.1, 4) : 0.0; });
  auto bad = check_flat_bounds(wrong, left, 5, 2);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.orders[0].ok);

  CHECK(code_of([&] { check_flat_bounds(sample(Grid1D::over(-1, 1, 513), [](double) { return 0.0; }), left, 5, 2); }) ==
        Errc::GridTooCoarse);
  CHECK(code_of([&] { check_flat_bounds(model, left, 2, 2); }) == Errc::InvalidInput);
}

TEST_CASE("borel assembly of x^j (1 - x^2)") {
  auto grid = Grid1D::over(-1, 1, 262145);
  std::vector<FlatTerm> terms;
  for (unsigned j = 1; j <= 6; ++j)
    terms.push_back({sample(grid, [j](double x) { return std::pow(x, j) * (1 - x * x); }), j});
  const Interval Z{0, 0}, U{-1, 1};
  auto res = assemble_borel(terms, Z, U);

  REQUIRE(res.eps.size() == 7);
  for (std::size_t i = 1; i < res.eps.size(); ++i) CHECK(res.eps[i] <= 0.5 * res.eps[i - 1] * (1 + 1e-12));
  for (std::size_t idx = 0; idx < terms.size(); ++idx)
    for (std::size_t i = 0; i < grid.n; ++i) {
      double d = Z.dist(grid.x(i)), v = res.cutoffs[idx].values[i];
      if (d < res.eps[idx + 1]) CHECK(v == 1.0);
      if (d >= res.eps[idx]) CHECK(v == 0.0);
    }

  CHECK(res.plateau_points > 0);
  CHECK(res.plateau_exact);
  REQUIRE(res.fits.size() == 6);
  for (const auto& fit : res.fits) {
    CHECK(fit.ok);
    if (fit.N >= 3 && fit.N <= 5) CHECK(fit.slope >= fit.N + 0.75);
  }
  // the ε inequality, recomputed from the reported constants and widths
  for (std::size_t idx = 0; idx < terms.size(); ++idx) {
    CHECK(res.flat[idx].ok);
    const unsigned j = terms[idx].order;
    const double eps = res.eps[idx], C = res.flat[idx].constant;
    const auto& d = res.cutoff_specs[idx].widths;
    double jfact = 1;
    for (unsigned i = 2; i <= j; ++i) jfact *= i;
    for (unsigned k = 0; k <= res.options.k_max && j > k + 1; ++k) {
      double sum = C * std::pow(eps, j - k - 1.0);
      if (k == 1) sum += 2 * C / d[0] * std::pow(eps, j - 1.0);
      CHECK(sum < 1 / jfact);
    }
  }

  // the same six terms on a coarse grid cannot meet the inequality
  auto coarse = Grid1D::over(-1, 1, 8193);
  std::vector<FlatTerm> coarse_terms;
  for (unsigned j = 1; j <= 6; ++j)
    coarse_terms.push_back({sample(coarse, [j](double x) { return std::pow(x, j) * (1 - x * x); }), j});
  CHECK(code_of([&] { assemble_borel(coarse_terms, Z, U); }) == Errc::EpsilonSearchFailed);
}

TEST_CASE("borel assembly with one term and bad input") {
  auto grid = Grid1D::over(-1, 1, 8193);
  auto g1 = sample(grid, [](double x) { return x * (1 - x * x); });
  auto res = assemble_borel({{g1, 1}}, {0, 0}, {-1, 1});
  for (std::size_t i = 0; i < grid.n; ++i) {
    double d = std::abs(grid.x(i));
    if (d < res.eps[1]) CHECK(res.f.values[i] == g1.values[i]);
    if (d >= res.eps[0]) CHECK(res.f.values[i] == 0.0);
  }

  auto too_slow = sample(grid, [](double x) { return x * x * (1 - x * x); });
  CHECK(code_of([&] { assemble_borel({{too_slow, 3}}, {0, 0}, {-1, 1}); }) == Errc::FlatBoundsViolated);
  CHECK(code_of([&] { assemble_borel({{g1, 2}, {g1, 1}}, {0, 0}, {-1, 1}); }) == Errc::InvalidInput);
  auto other = sample(Grid1D::over(-1, 1, 4097), [](double x) { return x; });
  CHECK(code_of([&] { assemble_borel({{g1, 1}, {other, 2}}, {0, 0}, {-1, 1}); }) == Errc::InvalidInput);
}

TEST_CASE("csv round trip") {
  auto grid = Grid1D::over(-0.6, 0.6, 1025);
  auto tau = build_cutoff(kSpec, grid);
  std::stringstream ss;
  write_csv(ss, tau);
  auto back = read_csv(ss);
  CHECK(back.grid.n == grid.n);
  CHECK(back.values == tau.values);
  for (std::size_t i = 0; i < grid.n; ++i) CHECK(back.grid.x(i) == grid.x(i));

  std::stringstream bad_header("t,v\n0,1\n1,2\n");
  CHECK(code_of([&] { read_csv(bad_header); }) == Errc::Schema);
  std::stringstream uneven("x,value\n0,1\n0.5,2\n2,3\n");
  CHECK(code_of([&] { read_csv(uneven); }) == Errc::Schema);
  std::stringstream junk("x,value\n0,1\n1,abc\n");
  CHECK(code_of([&] { read_csv(junk); }) == Errc::Schema);
}
