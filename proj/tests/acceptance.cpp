// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "filtap/borel.hpp"
#include "filtap/cli.hpp"
#include "filtap/error.hpp"
#include "filtap/homotopy.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace filtap;
using namespace filtap::test;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

const char* yn(bool b) { return b ? "yes" : "no"; }

void criterion(int id, const char* title, double limit_s, const std::function<Verdict()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = s < limit_s;
  bool ok = v.pass && in_time;
  if (!ok) ++failures;
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.3f s of %.0f s", s, limit_s);
  std::cout << "criterion " << id << " [" << title << "]: " << (ok ? "PASS" : "FAIL") << " (" << timing
            << (in_time ? "" : ", over time") << "; " << v.detail << ")" << std::endl;
}

PolySystem sys_of(const ContextPtr& ctx, const std::vector<std::string>& eqs) {
  std::vector<Jet> e;
  for (const auto& s : eqs) e.push_back(P(s, ctx));
  return PolySystem(ctx, e);
}

Jet random_equation(Rng& rng, const ContextPtr& ctx) {
  std::vector<std::size_t> vars;
  for (std::size_t i = 0; i < ctx->size(); ++i) vars.push_back(i);
  std::bernoulli_distribution keep(0.25);
  Jet::Terms t;
  for (const auto& m : monomials_in(*ctx, vars, 0, 2))
    if (keep(rng)) t.emplace(m, random_rational(rng, 3));
  return Jet::polynomial(ctx, t);
}

std::vector<Monomial> random_gens(Rng& rng, const VarContext& ctx, std::size_t count) {
  std::uniform_int_distribution<unsigned> e(0, 2);
  std::vector<Monomial> out;
  while (out.size() < count) {
    std::vector<unsigned> ex(ctx.size(), 0);
    unsigned deg = 0;
    for (std::size_t i = 0; i < ctx.x_count(); ++i) deg += ex[i] = e(rng);
    if (deg >= 1 && deg <= 4) out.emplace_back(ctx, ex);
  }
  return out;
}

// every d | m, by enumerating exponent vectors
bool product_member(const VarContext& ctx, const std::vector<Monomial>& ga, const std::vector<Monomial>& gb,
                    const Monomial& m) {
  std::vector<unsigned> d(ctx.size(), 0);
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == ctx.x_count()) {
      std::vector<unsigned> q(ctx.size(), 0);
      for (std::size_t k = 0; k < ctx.x_count(); ++k) q[k] = m.exponent(k) - d[k];
      return oracle::raw_member(ctx, ga, Monomial(ctx, d)) && oracle::raw_member(ctx, gb, Monomial(ctx, q));
    }
    for (d[i] = 0; d[i] <= m.exponent(i); ++d[i])
      if (rec(i + 1)) return true;
    d[i] = 0;
    return false;
  };
  return rec(0);
}

int exit_status(const std::string& cmd) {
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

int main() {
  criterion(1, "unit-Jacobian lift", 1, [] {
    auto ctx = make_context({"x"}, {"y"});
    auto r = tougeron_step({sys_of(ctx, {"y^2 - 1 - x"}), {P("1", ctx)}, I("x", ctx), 16});
    auto want = oracle::series_solve(oracle::bivariate_of(P("y^2 - 1 - x", ctx)), {1}, 0, 16);
    bool eq = oracle::dense_of(r.y_solution[0], 16) == want && r.y_solution[0].order() == 16;
    return Verdict{eq, "17 coefficients vs undetermined coefficients, x^16 coefficient " + to_string(want[16])};
  });

  criterion(2, "degenerate-h lift", 1, [] {
    auto ctx = make_context({"x"}, {"y"});
    Jet eq = P("x^2*y + y^2 - x^10", ctx);
    auto r = tougeron_step({PolySystem(ctx, {eq}), {P("0", ctx)}, I("x^10", ctx), 24});
    bool residual = r.residuals.size() == 1 && r.residuals[0].is_zero() && r.residuals[0].order() >= 24;
    bool ideal = r.correction_ideal == I("x^2", ctx);
    bool cert = r.correction_certificates.size() == 1 && r.correction_certificates[0].verifies(r.delta_y[0]);
    for (const auto& g : r.correction_certificates[0].generators) cert = cert && I("x^2", ctx).contains(g);
    // the x^4 coefficient is quadratic in a_2; start 0 picks the branch a_2 = 0
    auto want = oracle::series_solve(oracle::bivariate_of(eq), {0, 0, 0}, 2, 24);
    bool series = oracle::dense_of(r.y_solution[0], 24) == want &&
                  agree_to_order(r.y_solution[0], P("x^8 - x^14 + 2*x^20", ctx), 24);
    return Verdict{residual && ideal && cert && series, std::string("residual zero ") + yn(residual) +
                                                            ", Δy in (x^2) " + yn(ideal && cert) +
                                                            ", series match " + yn(series)};
  });

  criterion(3, "refusal of x^2 y - x^5", 5, [] {
    auto ctx = make_context({"x"}, {"y"});
    std::string code = "none";
    try {
      tougeron_step({sys_of(ctx, {"x^2*y - x^5"}), {P("0", ctx)}, I("x^5", ctx), 8});
    } catch (const Error& e) {
      code = std::string(errc_name(e.code()));
    }
    bool engine = code == "ContractionViolated" || code == "ResidualNotInIdeal";
    fs::path out = fs::path(FILTAP_ACCEPTANCE_OUT) / "refusal.json";
    fs::create_directories(out.parent_path());
    int rc = exit_status(quoted(FILTAP_CLI_PATH) + " run " +
                         quoted(fs::path(FILTAP_CORPUS_DIR) / "lift_no_continuous_solution.json") + " --out " +
                         quoted(out) + " 2>/dev/null");
    auto report = cli::load_json(out);
    bool cli = rc == 2 && report["status"] == "refused" && report["reason"]["code"] == code;
    return Verdict{engine && cli, "engine " + code + ", cli exit " + std::to_string(rc)};
  });

  criterion(4, "fundamental identity", 10, [] {
    Rng rng(4);
    int total = 0, good = 0;
    for (int i = 0; i < 120; ++i) {
      std::size_t s = 1 + i % 3, n = 1 + (i / 3) % 4;
      std::vector<std::string> ys;
      for (std::size_t k = 0; k < n; ++k) ys.push_back("y" + std::to_string(k + 1));
      auto ctx = make_context({"x1", "x2"}, ys);
      std::vector<Jet> eqs;
      for (std::size_t k = 0; k < s; ++k) eqs.push_back(random_equation(rng, ctx));
      std::vector<Jet> y;
      for (std::size_t k = 0; k < n; ++k) y.push_back(random_x_jet(rng, ctx, 8, 0, 3));
      auto d = jacobian_y(PolySystem(ctx, eqs), y);
      ++total;
      Matrix jjt = multiply(d.jacobian, transpose(d.jacobian));
      good += matrices_equal(jjt, d.gram) && matrices_equal(multiply(jjt, d.adjugate), scaled_identity(d.h, s)) &&
              d.h == oracle::permutation_det(jjt);
    }
    return Verdict{good == total && total >= 100, std::to_string(good) + "/" + std::to_string(total) + " exact"};
  });

  criterion(5, "ideal algebra vs enumeration", 10, [] {
    Rng rng(5);
    int pairs = 0, good = 0;
    for (int round = 0; round < 210; ++round) {
      std::vector<std::string> xs;
      for (int k = 0; k <= round % 3; ++k) xs.push_back("x" + std::to_string(k + 1));
      auto ctx = make_context(xs);
      auto all = monomials_in(*ctx, x_indices(*ctx), 0, 8);
      auto ga = random_gens(rng, *ctx, 1 + round % 4), gb = random_gens(rng, *ctx, 1 + (round / 4) % 3);
      if (round % 7 == 0) gb = {ga.front().times(Monomial::variable(*ctx, 0))};  // a contained pair now and then
      MonomialIdeal a(ctx, ga), b(ctx, gb);
      auto s = sum(a, b), p = product(a, b), c = intersection(a, b);
      bool ok = true, b_in_a = true;
      for (const auto& m : all) {
        bool in_a = oracle::raw_member(*ctx, ga, m), in_b = oracle::raw_member(*ctx, gb, m);
        ok = ok && s.contains(m) == (in_a || in_b) && c.contains(m) == (in_a && in_b) &&
             p.contains(m) == product_member(*ctx, ga, gb, m);
        if (in_b && !in_a) b_in_a = false;
      }
      ok = ok && contains_ideal(a, b) == b_in_a;
      ++pairs;
      good += ok;
    }
    return Verdict{good == pairs && pairs >= 200, std::to_string(good) + "/" + std::to_string(pairs) + " pairs"};
  });

  criterion(6, "general filtration reduction", 5, [] {
    auto ctx = make_context({"x1", "x2"}, {"y"});
    auto sys = sys_of(ctx, {"y^2 - 1 - x1 - x2"});
    auto A = Filtration(ctx, parse_filtration_rule("scaled([x1, x2]^2, m, j)", ctx), 8);
    // Taylor prefix of sqrt(1 + s), s = x1 + x2, through degree N + 2
    const char* prefixes[] = {"1 + 1/2*(x1 + x2) - 1/8*(x1 + x2)^2 + 1/16*(x1 + x2)^3",
                              "1 + 1/2*(x1 + x2) - 1/8*(x1 + x2)^2 + 1/16*(x1 + x2)^3 - 5/128*(x1 + x2)^4",
                              "1 + 1/2*(x1 + x2) - 1/8*(x1 + x2)^2 + 1/16*(x1 + x2)^3 - 5/128*(x1 + x2)^4 + "
                              "7/256*(x1 + x2)^5"};
    std::string detail;
    bool all = true;
    for (unsigned N = 1; N <= 3; ++N) {
      Jet prefix = P(prefixes[N - 1], ctx);
      auto r = lift_general_filtration(sys, {prefix}, A, N, N + 6);
      const Jet& y = r.lift.y_solution[0];
      bool solves = evaluate(sys, std::vector<Jet>{y})[0].is_zero();
      Jet diff = y - prefix.at_order(y.order());
      const auto& cert = r.approximation_certificates[0];
      bool certified = cert.verifies(diff);
      for (const auto& g : cert.generators) certified = certified && A.ideal_at(N + 1).contains(g);
      all = all && solves && certified;
      detail += "N=" + std::to_string(N) + (solves && certified ? " ok " : " bad ");
    }
    return Verdict{all, detail};
  });

  criterion(7, "homotopy verifier", 5, [] {
    bool ok = true;
    auto ctx = make_context({"x"}, {"y1", "y2"}, "t");
    auto sys = sys_of(ctx, {"y1*y2"});
    SolutionFamily fam{{P("t*x", ctx), P("0", ctx)}, I("x", ctx)};
    ok = ok && verify_homotopy(sys, fam, {P("0", ctx), P("0", ctx)}, {P("x", ctx), P("0", ctx)}).ok();
    auto c1 = make_context({"x"}, {"y"}, "t");
    auto bad = verify_homotopy(sys_of(c1, {"y - x^2"}), SolutionFamily{{P("x^2 + t*x^5", c1)}, I("x", c1)},
                               {P("x^2", c1)}, {P("x^2 + x^5", c1)});
    ok = ok && bad.endpoints && !bad.solves && bad.residual_witness &&
         bad.residual_witness->find("x^5*t") != std::string::npos;

    auto psys = sys_of(c1, {"y^2 - 1 - x - t*x"});
    auto pfam = parametric_lift({psys, {P("1", c1)}, I("x", c1), 8}, SolutionFamily{{P("1", c1)}, MonomialIdeal::zero(c1)});
    const std::size_t t = *c1->t_index();
    ok = ok && verify_homotopy(psys, pfam, {specialize(pfam.family[0], t, 0)}, {specialize(pfam.family[0], t, 1)}).ok();
    Rng rng(7);
    int agree = 0;
    for (int i = 0; i < 5; ++i) {
      Rational ts = random_rational(rng, 9);
      PolySystem pointwise(c1, {specialize(psys.equations()[0], t, ts)});
      auto r = tougeron_step({pointwise, {P("1", c1)}, I("x", c1), 8});
      agree += specialize(pfam.family[0], t, ts) == r.y_solution[0];
    }
    return Verdict{ok && agree == 5, "examples " + std::string(ok ? "as specified" : "wrong") + ", " +
                                         std::to_string(agree) + "/5 specializations exact"};
  });

  criterion(8, "cutoff derivative bounds", 5, [] {
    borel::CutoffSpec spec{{-0.1, 0.1}, {-0.5, 0.5}, {0.15, 0.1, 0.05}};
    auto grid = borel::Grid1D::over(-0.6, 0.6, 4097);
    auto rep = borel::check_derivative_bounds(borel::build_cutoff(spec, grid), spec, 2);
    bool ok = rep.orders.size() == 2;
    std::string detail;
    for (const auto& o : rep.orders) {
      ok = ok && o.ratio <= 1.15;
      char buf[64];
      std::snprintf(buf, sizeof buf, "k=%u ratio %.4f ", o.k, o.ratio);
      detail += buf;
    }
    return Verdict{ok, detail + "(limit 1.15)"};
  });

  criterion(9, "flat assembly", 10, [] {
    auto grid = borel::Grid1D::over(-1, 1, 262145);
    std::vector<borel::FlatTerm> terms;
    for (unsigned j = 1; j <= 6; ++j)
      terms.push_back({borel::sample(grid, [j](double x) { return std::pow(x, j) * (1 - x * x); }), j});
    auto r = borel::assemble_borel(terms, {0, 0}, {-1, 1});
    bool ok = r.plateau_exact && r.plateau_points > 0;
    std::string detail;
    for (unsigned N = 3; N <= 5; ++N) {
      auto it = std::find_if(r.fits.begin(), r.fits.end(), [N](const auto& f) { return f.N == N; });
      bool fit = it != r.fits.end() && it->slope >= N + 0.75;
      ok = ok && fit;
      char buf[64];
      std::snprintf(buf, sizeof buf, "N=%u slope %.3f ", N, it == r.fits.end() ? NAN : it->slope);
      detail += buf;
    }
    return Verdict{ok, detail + "plateau exact " + yn(r.plateau_exact)};
  });

  criterion(10, "end-to-end reproducibility", 60, [] {
    fs::path out = fs::path(FILTAP_ACCEPTANCE_OUT) / "corpus";
    fs::create_directories(out);
    std::vector<fs::path> problems;
    for (const auto& e : fs::directory_iterator(FILTAP_CORPUS_DIR))
      if (e.path().extension() == ".json") problems.push_back(e.path());
    std::sort(problems.begin(), problems.end());
    std::set<std::string> tasks;
    int good = 0;
    std::string bad;
    for (const auto& p : problems) {
      fs::path a = out / (p.stem().string() + ".a.json"), b = out / (p.stem().string() + ".b.json");
      std::string run = quoted(FILTAP_CLI_PATH) + " run " + quoted(p) + " --out ";
      exit_status(run + quoted(a) + " 2>/dev/null");
      exit_status(run + quoted(b) + " 2>/dev/null");
      int v = exit_status(quoted(FILTAP_CLI_PATH) + " verify " + quoted(a) + " " + quoted(p) + " >/dev/null 2>&1");
      bool same = slurp(a) == slurp(b) && !slurp(a).empty();
      if (v == 0 && same)
        ++good;
      else
        bad += " " + p.stem().string();
      tasks.insert(cli::load_json(p).value("task", ""));
    }
    bool every_task = tasks.size() == 7;
    return Verdict{good == static_cast<int>(problems.size()) && problems.size() >= 12 && every_task,
                   std::to_string(good) + "/" + std::to_string(problems.size()) + " problems, " +
                       std::to_string(tasks.size()) + " task types" + (bad.empty() ? "" : "; failing:" + bad)};
  });

  std::cout << (failures ? "acceptance: FAIL" : "acceptance: PASS") << " (" << failures << " failing)" << std::endl;
  return failures ? 1 : 0;
}
