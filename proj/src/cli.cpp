#include "filtap/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "filtap/borel.hpp"
#include "filtap/error.hpp"
#include "filtap/expr.hpp"
#include "filtap/homotopy.hpp"
#include "filtap/lift.hpp"

namespace filtap::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(Errc::Schema, msg); }

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) schema(where + " must be an object");
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) schema(where + "." + key + " is missing");
  return *it;
}

const json* optional_field(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) schema(where + " must be a string");
  return v.get<std::string>();
}

unsigned as_unsigned(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 100000)
    schema(where + " must be a non-negative integer");
  return v.get<unsigned>();
}

double as_double(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  schema(where + " must be a number, \"inf\" or \"-inf\"");
}

std::vector<std::string> string_list(const json& v, const std::string& where) {
  if (!v.is_array()) schema(where + " must be an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_string(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

// Parse errors get the JSON location prepended; codes and positions stay.
template <class F>
auto located(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), where + ": " + e.detail(), e.position());
  }
}

Jet jet_of(const std::string& src, const ContextPtr& ctx, const std::string& where) {
  return located(where, [&] {
    return src.find('|') == std::string::npos ? parse_polynomial(src, ctx) : parse_jet(src, ctx);
  });
}

std::vector<Jet> jets_of(const json& v, const ContextPtr& ctx, const std::string& where, std::size_t expected) {
  auto strs = string_list(v, where);
  if (strs.size() != expected)
    schema(where + " has " + std::to_string(strs.size()) + " entries, expected " + std::to_string(expected));
  std::vector<Jet> out;
  for (std::size_t i = 0; i < strs.size(); ++i)
    out.push_back(jet_of(strs[i], ctx, where + "[" + std::to_string(i) + "]"));
  return out;
}

MonomialIdeal ideal_of(const json& v, const ContextPtr& ctx, const std::string& where) {
  auto s = as_string(v, where);
  return located(where, [&] { return parse_monomial_ideal(s, ctx); });
}

Monomial monomial_of(const json& v, const ContextPtr& ctx, const std::string& where) {
  Jet p = jet_of(as_string(v, where), ctx, where);
  if (p.terms().size() != 1 || p.terms().begin()->second != 1) schema(where + " must be a monic monomial");
  return p.terms().begin()->first;
}

Filtration filtration_of(const json& v, const ContextPtr& ctx, const std::string& where) {
  auto rule_src = as_string(field(v, "rule", where), where + ".rule");
  unsigned j_max = as_unsigned(field(v, "j_max", where), where + ".j_max");
  return located(where, [&] { return Filtration(ctx, parse_filtration_rule(rule_src, ctx), j_max); });
}

json jets_json(const std::vector<Jet>& jets) {
  json out = json::array();
  for (const auto& j : jets) out.push_back(serialize_jet(j));
  return out;
}

json cert_json(const MembershipCertificate& c, const VarContext& ctx) {
  json gens = json::array();
  for (const auto& m : c.generators) gens.push_back(to_expr(m, ctx));
  return {{"generators", gens}, {"cofactors", jets_json(c.cofactors)}};
}

json certs_json(const std::vector<MembershipCertificate>& cs, const VarContext& ctx) {
  json out = json::array();
  for (const auto& c : cs) out.push_back(cert_json(c, ctx));
  return out;
}

MembershipCertificate cert_of(const json& v, const ContextPtr& ctx, const std::string& where) {
  MembershipCertificate c;
  const json& gens = field(v, "generators", where);
  if (!gens.is_array()) schema(where + ".generators must be an array");
  for (std::size_t i = 0; i < gens.size(); ++i)
    c.generators.push_back(monomial_of(gens[i], ctx, where + ".generators[" + std::to_string(i) + "]"));
  c.cofactors = jets_of(field(v, "cofactors", where), ctx, where + ".cofactors", c.generators.size());
  return c;
}

std::vector<MembershipCertificate> certs_of(const json& v, const ContextPtr& ctx, const std::string& where,
                                            std::size_t expected) {
  if (!v.is_array() || v.size() != expected)
    schema(where + " must hold " + std::to_string(expected) + " certificates");
  std::vector<MembershipCertificate> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(cert_of(v[i], ctx, where + "[" + std::to_string(i) + "]"));
  return out;
}

json monomials_json(const std::vector<Monomial>& ms, const VarContext& ctx) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(to_expr(m, ctx));
  return out;
}

json valuation_json(const Valuation& v) { return v.is_infinite() ? json("inf") : json(v.value()); }

// ---------------------------------------------------------------- problems

const char* const kTasks[] = {"lift", "lift_general", "check_formal", "homotopy_verify", "weak_fg", "cofinal",
                              "borel_demo"};

struct Problem {
  std::string task;
  json params;
  fs::path base;
  ContextPtr ctx;
  std::optional<PolySystem> sys;
  std::optional<json> filtration;

  const json& param(const char* key) const { return field(params, key, "params"); }
  const PolySystem& system() const {
    if (!sys) schema("task " + task + " needs equations");
    return *sys;
  }
  Filtration filt() const {
    if (!filtration) schema("task " + task + " needs a filtration");
    return filtration_of(*filtration, ctx, "filtration");
  }
};

Problem load_problem(const json& raw, const fs::path& base) {
  if (!raw.is_object()) schema("problem must be a JSON object");
  if (as_string(field(raw, "format", "problem"), "format") != kProblemFormat)
    schema(std::string("format must be \"") + kProblemFormat + "\"");
  Problem pr;
  pr.base = base;
  pr.task = as_string(field(raw, "task", "problem"), "task");
  if (std::find(std::begin(kTasks), std::end(kTasks), pr.task) == std::end(kTasks)) schema("unknown task " + pr.task);
  if (const json* p = optional_field(raw, "params")) {
    if (!p->is_object()) schema("params must be an object");
    pr.params = *p;
  } else {
    pr.params = json::object();
  }

  const json& vars = field(raw, "variables", "problem");
  auto xs = string_list(field(vars, "x", "variables"), "variables.x");
  std::vector<std::string> ys;
  if (const json* y = optional_field(vars, "y")) ys = string_list(*y, "variables.y");
  std::optional<std::string> t;
  if (const json* tv = optional_field(vars, "t")) t = as_string(*tv, "variables.t");
  pr.ctx = located("variables", [&] { return make_context(xs, ys, t); });

  if (const json* eqs = optional_field(raw, "equations")) {
    auto srcs = string_list(*eqs, "equations");
    std::vector<Jet> fs;
    for (std::size_t i = 0; i < srcs.size(); ++i)
      fs.push_back(located("equations[" + std::to_string(i) + "]", [&] { return parse_polynomial(srcs[i], pr.ctx); }));
    std::optional<MonomialIdeal> quotient;
    if (const json* q = optional_field(raw, "quotient")) quotient = ideal_of(*q, pr.ctx, "quotient");
    pr.sys = located("equations", [&] { return PolySystem(pr.ctx, std::move(fs), quotient); });
  }
  if (const json* f = optional_field(raw, "filtration")) pr.filtration = *f;
  return pr;
}

unsigned order_param(const Problem&, const json& obj, const char* key, const std::string& where,
                     const RunFlags& flags) {
  if (flags.order) return *flags.order;
  return as_unsigned(field(obj, key, where), where + "." + key);
}

struct TaskResult {
  json result = json::object();
  std::optional<Error> refusal;  // a refusal that still carries a payload
};

// ---------------------------------------------------------------- lift

json lift_json(const LiftResult& r, const VarContext& ctx, bool trace) {
  json quotients = json::array();
  for (const auto& q : r.quotients)
    quotients.push_back({{"generator", to_expr(q.generator, ctx)}, {"quotient", serialize_jet(q.quotient)}});
  json out{{"target_order", r.target_order},
           {"working_order", r.working_order},
           {"h", serialize_jet(r.h)},
           {"h_order", r.h_order},
           {"solution", jets_json(r.y_solution)},
           {"delta_y", jets_json(r.delta_y)},
           {"residuals", jets_json(r.residuals)},
           {"start_certificates", certs_json(r.start_certificates, ctx)},
           {"correction_ideal", to_expr(r.correction_ideal)},
           {"quotients", quotients},
           {"correction_certificates", certs_json(r.correction_certificates, ctx)},
           {"iterations", r.trace.size()}};
  if (trace) {
    json steps = json::array();
    for (const auto& rec : r.trace) steps.push_back({{"z", jets_json(rec.z)}, {"change", valuation_json(rec.change)}});
    out["trace"] = steps;
  }
  return out;
}

Matrix matrix_of(const json& v, const ContextPtr& ctx, std::size_t rows, std::size_t cols, const std::string& where) {
  if (!v.is_array() || v.size() != rows) schema(where + " must have " + std::to_string(rows) + " rows");
  Matrix m;
  for (std::size_t i = 0; i < rows; ++i)
    m.push_back(jets_of(v[i], ctx, where + "[" + std::to_string(i) + "]", cols));
  return m;
}

LiftRequest lift_request(const Problem& pr, const RunFlags& flags) {
  const PolySystem& sys = pr.system();
  return {sys, jets_of(pr.param("start"), pr.ctx, "params.start", sys.unknown_count()),
          ideal_of(pr.param("residual_ideal"), pr.ctx, "params.residual_ideal"),
          order_param(pr, pr.params, "target_order", "params", flags)};
}

TaskResult run_lift(const Problem& pr, const RunFlags& flags) {
  LiftRequest req = lift_request(pr, flags);
  TaskResult out;
  if (const json* mult = optional_field(pr.params, "multiplier")) {
    Jet h = jet_of(as_string(field(*mult, "h", "params.multiplier"), "params.multiplier.h"), pr.ctx,
                   "params.multiplier.h");
    Matrix B = matrix_of(field(*mult, "B", "params.multiplier"), pr.ctx, req.sys.unknown_count(),
                         req.sys.equation_count(), "params.multiplier.B");
    out.result = lift_json(ann_coker_step(req, h, B), *pr.ctx, flags.trace);
    out.result["method"] = "multiplier";
  } else {
    out.result = lift_json(tougeron_step(req), *pr.ctx, flags.trace);
    out.result["method"] = "adjugate";
  }
  return out;
}

TaskResult run_lift_general(const Problem& pr, const RunFlags& flags) {
  const PolySystem& sys = pr.system();
  auto prefix = jets_of(pr.param("prefix"), pr.ctx, "params.prefix", sys.unknown_count());
  unsigned N = as_unsigned(pr.param("N"), "params.N");
  unsigned order = order_param(pr, pr.params, "oracle_order", "params", flags);
  Filtration A = pr.filt();
  GeneralLiftResult r = lift_general_filtration(sys, prefix, A, N, order);
  const VarContext& g = *r.shifted.context();
  json shifted{{"unknowns", g.y_vars()},
               {"equations", jets_json(r.shifted.equations())},
               {"solution", jets_json(r.shifted_solution)},
               {"residuals", jets_json(r.shifted_residuals)}};
  TaskResult out;
  out.result = {{"N", N},
                {"oracle_order", order},
                {"target_ideal", to_expr(A.ideal_at(N + 1))},
                {"fg", {{"N", r.fg.N}, {"extra", r.fg.extra}, {"q_set", monomials_json(r.fg.q_set, *pr.ctx)}}},
                {"prefix_certificates", certs_json(r.prefix_certificates, *pr.ctx)},
                {"shifted", shifted},
                {"lift", lift_json(r.lift, *pr.ctx, flags.trace)},
                {"solution", jets_json(r.lift.y_solution)},
                {"approximation_certificates", certs_json(r.approximation_certificates, *pr.ctx)}};
  return out;
}

TaskResult run_check_formal(const Problem& pr, const RunFlags& flags) {
  const PolySystem& sys = pr.system();
  auto y = jets_of(pr.param("assignment"), pr.ctx, "params.assignment", sys.unknown_count());
  unsigned N = order_param(pr, pr.params, "N", "params", flags);
  Filtration filt = pr.filt();
  FormalCheck fc = formal_solution_check(sys, y, filt, N);
  TaskResult out;
  out.result = {{"N", N}, {"ideal", to_expr(filt.ideal_at(N))}, {"residuals", jets_json(evaluate(sys, y))}};
  if (!fc) {
    out.refusal = Error(Errc::ResidualNotInIdeal, "residual of equation " + std::to_string(*fc.failed_equation) +
                                                      " has monomial " + to_expr(*fc.offending, *pr.ctx) +
                                                      " outside I_" + std::to_string(N));
    out.result["failed_equation"] = *fc.failed_equation;
    out.result["offending"] = to_expr(*fc.offending, *pr.ctx);
    return out;
  }
  out.result["certificates"] = certs_json(fc.certificates, *pr.ctx);
  return out;
}

json homotopy_json(const HomotopyReport& rep, const VarContext& ctx) {
  json out{{"endpoints", rep.endpoints},
           {"solves", rep.solves},
           {"stays_in_ideal", rep.stays_in_ideal},
           {"certificates", certs_json(rep.certificates, ctx)}};
  json w = json::object();
  if (rep.endpoint_witness) w["endpoints"] = *rep.endpoint_witness;
  if (rep.residual_witness) w["solves"] = *rep.residual_witness;
  if (rep.membership_witness) w["stays_in_ideal"] = *rep.membership_witness;
  out["witnesses"] = w;
  return out;
}

std::optional<Error> homotopy_refusal(const HomotopyReport& rep) {
  if (rep.ok()) return std::nullopt;
  std::string what = !rep.endpoints ? "endpoint check failed: " + rep.endpoint_witness.value_or("")
                     : !rep.solves  ? "family does not solve the system: " + rep.residual_witness.value_or("")
                                    : "family leaves the ideal: " + rep.membership_witness.value_or("");
  return Error(Errc::NotAHomotopy, what);
}

TaskResult run_homotopy(const Problem& pr, const RunFlags& flags) {
  const PolySystem& sys = pr.system();
  if (!pr.ctx->t_var()) schema("homotopy_verify needs variables.t");
  const std::size_t n = sys.unknown_count(), t = *pr.ctx->t_index();
  std::string mode = "verify";
  if (const json* m = optional_field(pr.params, "mode")) mode = as_string(*m, "params.mode");

  SolutionFamily fam;
  std::vector<Jet> y0, y1;
  TaskResult out;
  if (mode == "verify") {
    fam.family = jets_of(pr.param("family"), pr.ctx, "params.family", n);
    fam.ideal = ideal_of(pr.param("ideal"), pr.ctx, "params.ideal");
    y0 = jets_of(pr.param("y0"), pr.ctx, "params.y0", n);
    y1 = jets_of(pr.param("y1"), pr.ctx, "params.y1", n);
  } else if (mode == "parametric_lift") {
    LiftRequest req = lift_request(pr, flags);
    SolutionFamily start{jets_of(pr.param("family_start"), pr.ctx, "params.family_start", n),
                         MonomialIdeal::zero(pr.ctx)};
    if (const json* si = optional_field(pr.params, "start_ideal"))
      start.ideal = ideal_of(*si, pr.ctx, "params.start_ideal");
    fam = parametric_lift(req, start);
    for (const auto& f : fam.family) {
      y0.push_back(specialize(f, t, 0));
      y1.push_back(specialize(f, t, 1));
    }
    out.result["target_order"] = req.target_order;
  } else {
    schema("params.mode must be \"verify\" or \"parametric_lift\"");
  }
  HomotopyReport rep = verify_homotopy(sys, fam, y0, y1);
  out.result["mode"] = mode;
  out.result["family"] = jets_json(fam.family);
  out.result["ideal"] = to_expr(fam.ideal);
  out.result["y0"] = jets_json(y0);
  out.result["y1"] = jets_json(y1);
  out.result["checks"] = homotopy_json(rep, *pr.ctx);
  out.refusal = homotopy_refusal(rep);
  return out;
}

TaskResult run_weak_fg(const Problem& pr, const RunFlags& flags) {
  Filtration f = pr.filt();
  unsigned N = order_param(pr, pr.params, "N", "params", flags);
  unsigned limit = as_unsigned(pr.param("search_limit"), "params.search_limit");
  FGCertificate c = weak_fg_check(f, N, limit);
  TaskResult out;
  out.result = {{"N", c.N},
                {"extra", c.extra},
                {"q_set", monomials_json(c.q_set, *pr.ctx)},
                {"ideal_N", to_expr(f.ideal_at(N))},
                {"ideal_N_extra", to_expr(f.ideal_at(N + c.extra))}};
  return out;
}

TaskResult run_cofinal(const Problem& pr, const RunFlags& flags) {
  Filtration a = pr.filt();
  Filtration b = filtration_of(pr.param("other"), pr.ctx, "params.other");
  unsigned range = order_param(pr, pr.params, "range", "params", flags);
  CofinalTable tab = filtrations_cofinal(a, b, range);
  TaskResult out;
  out.result = {{"range", range}, {"a_into_b", tab.a_into_b}, {"b_into_a", tab.b_into_a}};
  if (!tab) {
    out.result["failed_direction"] = *tab.failed_direction;
    out.result["failed_at"] = *tab.failed_at;
    out.refusal = Error(Errc::NotCofinal, "no index d ≤ j_max works for " + *tab.failed_direction + " at j = " +
                                              std::to_string(*tab.failed_at));
  }
  return out;
}

// ---------------------------------------------------------------- borel

borel::Interval interval_of(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) schema(where + " must be [lo, hi]");
  borel::Interval iv{as_double(v[0], where + "[0]"), as_double(v[1], where + "[1]")};
  if (!(iv.lo <= iv.hi)) schema(where + " has lo > hi");
  return iv;
}

json interval_json(const borel::Interval& iv) {
  auto end = [](double v) { return std::isinf(v) ? json(v < 0 ? "-inf" : "inf") : json(v); };
  return json::array({end(iv.lo), end(iv.hi)});
}

borel::Grid1D grid_of(const Problem& pr, const RunFlags& flags) {
  const json& g = pr.param("grid");
  double a = as_double(field(g, "a", "params.grid"), "params.grid.a");
  double b = as_double(field(g, "b", "params.grid"), "params.grid.b");
  auto n = static_cast<std::size_t>(field(g, "n", "params.grid").get<long long>());
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b) || n < 2 || n > (std::size_t{1} << 24))
    schema("params.grid needs finite a < b and 2 ≤ n ≤ 2^24");
  if (flags.seed) {
    // same shift on both ends keeps the spacing
    std::mt19937_64 rng(*flags.seed);
    double h = (b - a) / static_cast<double>(n - 1);
    double shift = std::uniform_real_distribution<double>(-0.25, 0.25)(rng) * h;
    a += shift;
    b += shift;
  }
  return borel::Grid1D::over(a, b, n);
}

json grid_json(const borel::Grid1D& g) { return {{"a", g.a}, {"b", g.b}, {"n", g.n}}; }

borel::Grid1D grid_from_report(const json& g) {
  return borel::Grid1D::over(as_double(field(g, "a", "result.grid"), "result.grid.a"),
                             as_double(field(g, "b", "result.grid"), "result.grid.b"),
                             static_cast<std::size_t>(field(g, "n", "result.grid").get<long long>()));
}

double eval_poly(const Jet& p, double x) {
  double acc = 0;
  for (const auto& [m, c] : p.terms()) acc += c.get_d() * std::pow(x, static_cast<double>(m.exponent(0)));
  return acc;
}

std::function<double(double)> univariate(const json& v, const std::string& where) {
  auto ctx = make_context({"x"});
  Jet p = jet_of(as_string(v, where), ctx, where);
  return [p](double x) { return eval_poly(p, x); };
}

fs::path resolve(const fs::path& base, const std::string& name) {
  fs::path p(name);
  return p.is_absolute() ? p : base / p;
}

std::string artifact_name(const json& v, const std::string& where) {
  auto s = as_string(v, where);
  if (s.empty() || s.find('/') != std::string::npos || s.find('\\') != std::string::npos || s == "." || s == "..")
    schema(where + " must be a plain file name");
  return s;
}

void save_csv(const RunFlags& flags, const std::string& name, const borel::SampledFunction& f, bool write) {
  if (!write) return;
  fs::create_directories(flags.artifact_dir);
  std::ofstream out(flags.artifact_dir / name, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + (flags.artifact_dir / name).string());
  borel::write_csv(out, f);
}

borel::SampledFunction load_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  return borel::read_csv(in);
}

borel::CutoffSpec cutoff_spec_of(const Problem& pr) {
  borel::CutoffSpec spec{interval_of(pr.param("Z"), "params.Z"), interval_of(pr.param("U"), "params.U"), {}};
  const json& w = pr.param("widths");
  if (!w.is_array()) schema("params.widths must be an array");
  for (std::size_t i = 0; i < w.size(); ++i) spec.widths.push_back(as_double(w[i], "params.widths[" + std::to_string(i) + "]"));
  return spec;
}

json derivative_json(const borel::DerivativeReport& r) {
  json orders = json::array();
  for (const auto& o : r.orders)
    orders.push_back(
        {{"k", o.k}, {"max_abs", o.max_abs}, {"ratio", o.ratio}, {"sharp_ratio", o.sharp_ratio}, {"ok", o.ok}});
  return {{"constant", r.constant}, {"tolerance", r.tolerance}, {"orders", orders}, {"margin", r.margin}, {"ok", r.ok}};
}

json flat_json(const borel::FlatReport& r) {
  json orders = json::array();
  for (const auto& o : r.orders)
    orders.push_back({{"k", o.k}, {"constant", o.constant}, {"slope", o.slope}, {"fit_points", o.fit_points}, {"ok", o.ok}});
  return {{"order", r.order}, {"slope_margin", r.slope_margin}, {"window", r.window},
          {"orders", orders}, {"constant", r.constant},          {"ok", r.ok}};
}

unsigned k_max_of(const Problem& pr, unsigned fallback) {
  const json* k = optional_field(pr.params, "k_max");
  return k ? as_unsigned(*k, "params.k_max") : fallback;
}

TaskResult run_borel(const Problem& pr, const RunFlags& flags, bool write) {
  std::string mode = as_string(pr.param("mode"), "params.mode");
  TaskResult out;
  out.result["mode"] = mode;
  if (flags.seed) out.result["seed"] = *flags.seed;

  if (mode == "cutoff") {
    borel::Grid1D grid = grid_of(pr, flags);
    borel::CutoffSpec spec = cutoff_spec_of(pr);
    unsigned k_max = k_max_of(pr, 2);
    borel::SampledFunction tau = borel::build_cutoff(spec, grid);
    borel::DerivativeReport rep = borel::check_derivative_bounds(tau, spec, k_max);
    std::size_t ones = 0;
    for (double v : tau.values) ones += v == 1.0;
    out.result["grid"] = grid_json(grid);
    out.result["clearance"] = borel::clearance(spec.Z, spec.U);
    out.result["plateau_points"] = ones;
    out.result["derivatives"] = derivative_json(rep);
    if (const json* c = optional_field(pr.params, "csv")) {
      auto name = artifact_name(*c, "params.csv");
      save_csv(flags, name, tau, write);
      out.result["csv"] = name;
    }
    if (!rep.ok) out.refusal = Error(Errc::DerivativeBoundsViolated, "ratio above 1 + tolerance");
  } else if (mode == "flat") {
    borel::Interval Z = interval_of(pr.param("Z"), "params.Z");
    unsigned j = as_unsigned(pr.param("order"), "params.order");
    unsigned k_max = k_max_of(pr, 2);
    borel::SampledFunction g;
    if (const json* src = optional_field(pr.params, "g_csv")) {
      g = load_csv(resolve(pr.base, as_string(*src, "params.g_csv")));
    } else {
      g = borel::sample(grid_of(pr, flags), univariate(pr.param("g"), "params.g"));
    }
    borel::FlatReport rep = borel::check_flat_bounds(g, Z, j, k_max);
    out.result["grid"] = grid_json(g.grid);
    out.result["flat"] = flat_json(rep);
    if (!rep.ok) out.refusal = Error(Errc::FlatBoundsViolated, "log-log slope below order - k - margin");
  } else if (mode == "assemble") {
    borel::Grid1D grid = grid_of(pr, flags);
    borel::Interval Z = interval_of(pr.param("Z"), "params.Z");
    borel::Interval U = interval_of(pr.param("U"), "params.U");
    borel::BorelOptions opt;
    opt.k_max = k_max_of(pr, opt.k_max);
    if (const json* s = optional_field(pr.params, "shrink")) opt.shrink = as_double(*s, "params.shrink");
    const json& ts = pr.param("terms");
    if (!ts.is_array()) schema("params.terms must be an array");
    std::vector<borel::FlatTerm> terms;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      std::string w = "params.terms[" + std::to_string(i) + "]";
      terms.push_back({borel::sample(grid, univariate(field(ts[i], "g", w), w + ".g")),
                       as_unsigned(field(ts[i], "order", w), w + ".order")});
    }
    borel::BorelResult r = borel::assemble_borel(terms, Z, U, opt);
    json flat = json::array(), fits = json::array(), specs = json::array();
    for (const auto& f : r.flat) flat.push_back(flat_json(f));
    for (const auto& f : r.fits)
      fits.push_back({{"N", f.N},
                      {"window", f.window},
                      {"slope", std::isinf(f.slope) ? json("inf") : json(f.slope)},
                      {"constant", f.constant},
                      {"fit_points", f.fit_points},
                      {"identically_zero", f.identically_zero},
                      {"ok", f.ok}});
    for (const auto& s : r.cutoff_specs)
      specs.push_back({{"Z", interval_json(s.Z)}, {"U", interval_json(s.U)}, {"widths", s.widths}});
    out.result["grid"] = grid_json(grid);
    out.result["options"] = {{"k_max", opt.k_max},
                             {"shrink", opt.shrink},
                             {"slope_margin", opt.slope_margin},
                             {"bisection_steps", opt.bisection_steps}};
    out.result["eps"] = r.eps;
    out.result["cutoffs"] = specs;
    out.result["flat"] = flat;
    out.result["fits"] = fits;
    out.result["plateau_points"] = r.plateau_points;
    out.result["plateau_exact"] = r.plateau_exact;
    if (const json* c = optional_field(pr.params, "csv")) {
      auto name = artifact_name(*c, "params.csv");
      save_csv(flags, name, r.f, write);
      out.result["csv"] = name;
    }
    for (const auto& f : r.fits)
      if (!f.ok && !out.refusal)
        out.refusal = Error(Errc::FlatBoundsViolated, "vanishing order " + std::to_string(f.N + 1) + " not reached");
    if (!r.plateau_exact && !out.refusal)
      out.refusal = Error(Errc::FlatBoundsViolated, "f differs from the partial sum on the plateau");
  } else {
    schema("params.mode must be \"cutoff\", \"flat\" or \"assemble\"");
  }
  return out;
}

TaskResult dispatch(const Problem& pr, const RunFlags& flags, bool write) {
  if (pr.task == "lift") return run_lift(pr, flags);
  if (pr.task == "lift_general") return run_lift_general(pr, flags);
  if (pr.task == "check_formal") return run_check_formal(pr, flags);
  if (pr.task == "homotopy_verify") return run_homotopy(pr, flags);
  if (pr.task == "weak_fg") return run_weak_fg(pr, flags);
  if (pr.task == "cofinal") return run_cofinal(pr, flags);
  return run_borel(pr, flags, write);
}

json reason_json(const Error& e) {
  json r{{"code", std::string(errc_name(e.code()))}, {"message", e.detail()}};
  if (e.position()) r["position"] = *e.position();
  return r;
}

Outcome run_impl(const json& problem, const RunFlags& flags, const fs::path& base_dir, bool write) {
  auto start = std::chrono::steady_clock::now();
  Outcome out;
  json& rep = out.report;
  rep["format"] = kReportFormat;
  rep["task"] = problem.is_object() && problem.contains("task") ? problem["task"] : json();
  rep["problem_digest"] = problem_digest(problem);
  json run = json::object();
  if (flags.order) run["order"] = *flags.order;
  if (flags.seed) run["seed"] = *flags.seed;
  if (flags.trace) run["trace"] = true;
  rep["run"] = run;

  auto fail = [&](const Error& e) {
    bool refused = is_refusal(e.code());
    rep["status"] = refused ? "refused" : "error";
    rep["reason"] = reason_json(e);
    out.exit_code = refused ? 2 : 1;
  };
  try {
    Problem pr = load_problem(problem, base_dir);
    TaskResult tr = dispatch(pr, flags, write);
    rep["result"] = tr.result;
    if (tr.refusal) {
      fail(*tr.refusal);
    } else {
      rep["status"] = "ok";
      out.exit_code = 0;
    }
  } catch (const Error& e) {
    fail(e);
  } catch (const json::exception& e) {
    fail(Error(Errc::Schema, e.what()));
  } catch (const fs::filesystem_error& e) {
    fail(Error(Errc::Io, e.what()));
  }
  if (flags.timings) {
    std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start;
    rep["timings"] = {{"total_ms", ms.count()}};
  }
  return out;
}

// ---------------------------------------------------------------- verify

struct Mismatch {
  std::string what;
};

void expect(bool cond, const std::string& what) {
  if (!cond) throw Mismatch{what};
}

void expect_certificates(const std::vector<MembershipCertificate>& certs, const std::vector<Jet>& targets,
                         const MonomialIdeal& ideal, const std::string& what) {
  for (std::size_t i = 0; i < certs.size(); ++i) {
    expect(certs[i].verifies(targets[i]), what + "[" + std::to_string(i) + "] does not recombine");
    for (const auto& g : certs[i].generators)
      expect(ideal.contains(g), what + "[" + std::to_string(i) + "] uses generator " +
                                    to_expr(g, *ideal.context()) + " outside " + to_expr(ideal));
  }
}

void expect_zero(const std::vector<Jet>& rs, const std::string& what) {
  for (std::size_t i = 0; i < rs.size(); ++i)
    expect(rs[i].is_zero(), what + " of equation " + std::to_string(i) + " is " + serialize_jet(rs[i]));
}

const json& res_field(const json& res, const char* key) { return field(res, key, "result"); }

// Lift payload `res` against the request it claims to answer.
void check_lift_payload(const json& res, const PolySystem& sys, const std::vector<Jet>& start,
                        const MonomialIdeal& residual_ideal, unsigned target, const json* multiplier) {
  const ContextPtr& ctx = sys.context();
  const std::size_t n = sys.unknown_count(), s = sys.equation_count();
  expect(as_unsigned(res_field(res, "target_order"), "target_order") == target, "target order differs from the problem");
  auto sol = jets_of(res_field(res, "solution"), ctx, "result.solution", n);
  auto dy = jets_of(res_field(res, "delta_y"), ctx, "result.delta_y", n);
  for (std::size_t j = 0; j < n; ++j) {
    expect(sol[j].order() >= target, "solution[" + std::to_string(j) + "] is known below the target order");
    expect(agree_to_order(sol[j], start[j] + dy[j], target),
           "solution[" + std::to_string(j) + "] != start + delta_y");
  }
  expect_zero(evaluate(sys, sol), "residual");

  auto r0 = evaluate(sys, start);
  expect_certificates(certs_of(res_field(res, "start_certificates"), ctx, "result.start_certificates", s), r0,
                      residual_ideal, "start certificate");

  Jet h = jet_of(as_string(res_field(res, "h"), "result.h"), ctx, "result.h");
  expect(!h.is_zero(), "h is zero");
  unsigned e = h.ord().value();
  expect(as_unsigned(res_field(res, "h_order"), "h_order") == e, "h_order is not ord(h)");
  if (multiplier) {
    Jet ht = jet_of(as_string(field(*multiplier, "h", "params.multiplier"), "params.multiplier.h"), ctx, "h");
    expect(agree_to_order(h, ht, std::min(h.order(), ht.order())), "h differs from the supplied multiplier");
    Matrix B = matrix_of(field(*multiplier, "B", "params.multiplier"), ctx, n, s, "params.multiplier.B");
    expect(matrices_equal(multiply(jacobian_y(sys, start).jacobian, B), scaled_identity(ht, s)), "J·B != h·Id");
  } else if (!sys.quotient()) {
    Jet want = jacobian_y(sys, start).h;
    expect(agree_to_order(h, want, std::min(h.order(), want.order())), "h is not det(J·Jᵀ) at the start");
  }

  MonomialIdeal corr = ideal_of(res_field(res, "correction_ideal"), ctx, "result.correction_ideal");
  const json& qs = res_field(res, "quotients");
  expect(qs.is_array() && qs.size() == residual_ideal.generators().size(), "one quotient per generator expected");
  unsigned W = as_unsigned(res_field(res, "working_order"), "working_order");
  expect(W >= target + 2 * e, "working order below target + 2·ord(h)");
  Jet h2 = mul_tracked(h, h, W + e);
  for (std::size_t a = 0; a < qs.size(); ++a) {
    Monomial q = monomial_of(field(qs[a], "generator", "quotient"), ctx, "quotient.generator");
    expect(q == residual_ideal.generators()[a], "quotient " + std::to_string(a) + " names the wrong generator");
    Jet c = jet_of(as_string(field(qs[a], "quotient", "quotient"), "quotient"), ctx, "quotient");
    Jet prod = mul_tracked(h2, c, target + 2 * e);
    expect(prod.order() >= target + 2 * e && agree_to_order(prod, Jet::monomial(ctx, q), target + 2 * e),
           "h²·c != " + to_expr(q, *ctx));
    expect(static_cast<bool>(contains_jet(corr, c)), "quotient " + std::to_string(a) + " leaves the correction ideal");
  }
  expect_certificates(certs_of(res_field(res, "correction_certificates"), ctx, "result.correction_certificates", n),
                      dy, corr, "correction certificate");

  if (const json* tr = optional_field(res, "trace")) {
    expect(tr->is_array() && !tr->empty(), "empty trace");
    expect(tr->back().at("change") == "inf", "trace does not end at a fixed point");
  }
}

void verify_lift(const Problem& pr, const json& res, const RunFlags& flags) {
  LiftRequest req = lift_request(pr, flags);
  check_lift_payload(res, req.sys, req.y_start, req.residual_ideal, req.target_order,
                     optional_field(pr.params, "multiplier"));
}

void verify_lift_general(const Problem& pr, const json& res, const RunFlags& flags) {
  const PolySystem& sys = pr.system();
  const ContextPtr& ctx = pr.ctx;
  const std::size_t n = sys.unknown_count(), s = sys.equation_count();
  auto prefix = jets_of(pr.param("prefix"), ctx, "params.prefix", n);
  unsigned N = as_unsigned(pr.param("N"), "params.N");
  unsigned order = order_param(pr, pr.params, "oracle_order", "params", flags);
  Filtration A = pr.filt();
  const MonomialIdeal& target = A.ideal_at(N + 1);
  expect(as_unsigned(res_field(res, "oracle_order"), "oracle_order") == order, "oracle order differs");

  // weak finite generation of A_{N+1} with no extra steps
  const json& fg = res_field(res, "fg");
  std::vector<Monomial> q_set;
  for (const auto& m : field(fg, "q_set", "fg")) q_set.push_back(monomial_of(m, ctx, "fg.q_set"));
  expect(q_set == target.generators(), "q_set is not the generator list of A_{N+1}");

  expect_certificates(certs_of(res_field(res, "prefix_certificates"), ctx, "result.prefix_certificates", s),
                      evaluate(sys, prefix), target, "prefix certificate");

  auto sol = jets_of(res_field(res, "solution"), ctx, "result.solution", n);
  for (const auto& y : sol) expect(y.order() >= order, "solution known below the oracle order");
  expect_zero(evaluate(sys, sol), "residual");
  std::vector<Jet> diffs;
  for (std::size_t j = 0; j < n; ++j) diffs.push_back(sol[j] - prefix[j].at_order(sol[j].order()));
  expect_certificates(certs_of(res_field(res, "approximation_certificates"), ctx, "result.approximation_certificates", n),
                      diffs, target, "approximation certificate");

  // the shifted system, rebuilt from its own text
  const json& sh = res_field(res, "shifted");
  auto names = string_list(field(sh, "unknowns", "shifted"), "shifted.unknowns");
  const std::size_t k = q_set.size();
  expect(names == shifted_unknown_names(*ctx, k), "shifted unknowns are misnamed");
  auto gctx = make_context(ctx->x_vars(), names, ctx->t_var());
  auto geqs = jets_of(field(sh, "equations", "shifted"), gctx, "shifted.equations", s);
  auto gsol = jets_of(field(sh, "solution", "shifted"), gctx, "shifted.solution", names.size());
  if (k > 0) expect_zero(evaluate(PolySystem(gctx, geqs), gsol), "shifted residual");
  for (std::size_t j = 0; j < n; ++j) {
    Jet acc = prefix[j].at_order(order);
    for (std::size_t a = 0; a < k; ++a)
      acc += times_monomial(embed(gsol[j * k + a], ctx), q_set[a]);
    expect(agree_to_order(acc, sol[j], order), "prefix + Σ q·ỹ differs from solution[" + std::to_string(j) + "]");
  }

  check_lift_payload(res_field(res, "lift"), sys, prefix, [&] {
    // the residual ideal of the inner lift is A_{N+1} times the lowest monomial of h²
    Jet h = jet_of(as_string(res_field(res_field(res, "lift"), "h"), "h"), ctx, "h");
    Jet h2 = h * h;
    std::vector<unsigned> ex = h2.terms().begin()->first.exponents();
    for (std::size_t i = ctx->x_count(); i < ex.size(); ++i) ex[i] = 0;
    return product(target, MonomialIdeal(ctx, {Monomial(*ctx, ex)}));
  }(), order, nullptr);
}

void verify_check_formal(const Problem& pr, const json& res, const RunFlags& flags) {
  const PolySystem& sys = pr.system();
  auto y = jets_of(pr.param("assignment"), pr.ctx, "params.assignment", sys.unknown_count());
  unsigned N = order_param(pr, pr.params, "N", "params", flags);
  expect(as_unsigned(res_field(res, "N"), "N") == N, "N differs");
  expect_certificates(certs_of(res_field(res, "certificates"), pr.ctx, "result.certificates", sys.equation_count()),
                      evaluate(sys, y), pr.filt().ideal_at(N), "certificate");
}

void verify_homotopy_payload(const Problem& pr, const json& res, const RunFlags& flags) {
  const PolySystem& sys = pr.system();
  if (!pr.ctx->t_var()) schema("homotopy_verify needs variables.t");
  const std::size_t n = sys.unknown_count(), t = *pr.ctx->t_index();
  auto fam = jets_of(res_field(res, "family"), pr.ctx, "result.family", n);
  auto ideal = ideal_of(res_field(res, "ideal"), pr.ctx, "result.ideal");
  auto y0 = jets_of(res_field(res, "y0"), pr.ctx, "result.y0", n);
  auto y1 = jets_of(res_field(res, "y1"), pr.ctx, "result.y1", n);
  std::string mode = as_string(res_field(res, "mode"), "result.mode");
  if (mode == "verify") {
    expect(fam == jets_of(pr.param("family"), pr.ctx, "params.family", n), "family differs from the problem");
    expect(ideal == ideal_of(pr.param("ideal"), pr.ctx, "params.ideal"), "ideal differs from the problem");
    expect(y0 == jets_of(pr.param("y0"), pr.ctx, "params.y0", n), "y0 differs from the problem");
    expect(y1 == jets_of(pr.param("y1"), pr.ctx, "params.y1", n), "y1 differs from the problem");
  } else {
    LiftRequest req = lift_request(pr, flags);
    expect(as_unsigned(res_field(res, "target_order"), "target_order") == req.target_order, "target order differs");
    auto start = jets_of(pr.param("family_start"), pr.ctx, "params.family_start", n);
    for (std::size_t j = 0; j < n; ++j) {
      expect(fam[j].order() >= req.target_order, "family known below the target order");
      expect(agree_to_order(fam[j].at_order(0), start[j].at_order(0), 0), "family does not start at family_start");
    }
  }
  // endpoints, F(x, fam) = 0 in every t-coefficient, fam - y0 in the ideal
  for (std::size_t j = 0; j < n; ++j) {
    expect(specialize(fam[j], t, 0).terms() == y0[j].terms(), "family at t=0 differs from y0[" + std::to_string(j) + "]");
    expect(specialize(fam[j], t, 1).terms() == y1[j].terms(), "family at t=1 differs from y1[" + std::to_string(j) + "]");
  }
  expect_zero(evaluate(sys, fam), "family residual");
  std::vector<Jet> diffs;
  for (std::size_t j = 0; j < n; ++j) diffs.push_back(fam[j] - y0[j]);
  const json& checks = res_field(res, "checks");
  expect_certificates(certs_of(field(checks, "certificates", "checks"), pr.ctx, "checks.certificates", n), diffs, ideal,
                      "homotopy certificate");
  expect(field(checks, "endpoints", "checks") == true && field(checks, "solves", "checks") == true &&
             field(checks, "stays_in_ideal", "checks") == true,
         "check flags are not all true");
}

void verify_weak_fg(const Problem& pr, const json& res, const RunFlags& flags) {
  Filtration f = pr.filt();
  unsigned N = order_param(pr, pr.params, "N", "params", flags);
  unsigned limit = as_unsigned(pr.param("search_limit"), "params.search_limit");
  expect(as_unsigned(res_field(res, "N"), "N") == N, "N differs");
  unsigned extra = as_unsigned(res_field(res, "extra"), "extra");
  expect(extra <= limit && N + extra <= f.j_max(), "extra beyond the search limit");
  std::vector<Monomial> q;
  for (const auto& m : res_field(res, "q_set")) q.push_back(monomial_of(m, pr.ctx, "q_set"));
  expect(q == f.ideal_at(N).generators(), "q_set is not the generator list of I_N");
  MonomialIdeal span(pr.ctx, q);
  expect(contains_ideal(span, f.ideal_at(N + extra)), "I_{N+extra} is not inside (q_set)");
  for (unsigned e = 0; e < extra; ++e)
    expect(!contains_ideal(span, f.ideal_at(N + e)), "a smaller extra already works: " + std::to_string(e));
}

void verify_cofinal(const Problem& pr, const json& res, const RunFlags& flags) {
  Filtration a = pr.filt();
  Filtration b = filtration_of(pr.param("other"), pr.ctx, "params.other");
  unsigned range = order_param(pr, pr.params, "range", "params", flags);
  expect(as_unsigned(res_field(res, "range"), "range") == range, "range differs");
  auto check = [&](const Filtration& src, const Filtration& dst, const json& table, const std::string& dir) {
    expect(table.is_array() && table.size() == range + 1, dir + " table has the wrong length");
    for (unsigned j = 0; j <= range; ++j) {
      unsigned d = as_unsigned(table[j], dir);
      expect(d <= src.j_max(), dir + " index beyond j_max");
      expect(contains_ideal(dst.ideal_at(j), src.ideal_at(d)), dir + " inclusion fails at j = " + std::to_string(j));
      expect(d == 0 || !contains_ideal(dst.ideal_at(j), src.ideal_at(d - 1)),
             dir + " index is not the least at j = " + std::to_string(j));
    }
  };
  check(a, b, res_field(res, "a_into_b"), "A->B");
  check(b, a, res_field(res, "b_into_a"), "B->A");
}

double num(const json& v, const std::string& where) {
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return as_double(v, where);
}

void verify_borel(const Problem& pr, const json& res, const RunFlags& flags, const fs::path& report_dir) {
  std::string mode = as_string(pr.param("mode"), "params.mode");
  expect(res_field(res, "mode") == mode, "mode differs");
  if (mode == "cutoff") {
    borel::CutoffSpec spec = cutoff_spec_of(pr);
    unsigned k_max = k_max_of(pr, 2);
    const json& d = res_field(res, "derivatives");
    double tol = num(field(d, "tolerance", "derivatives"), "tolerance");
    bool all = true;
    for (const auto& o : field(d, "orders", "derivatives")) {
      bool ok = num(o.at("ratio"), "ratio") <= 1 + tol;
      expect(o.at("ok") == ok, "derivative flag inconsistent at k = " + o.at("k").dump());
      all = all && ok;
    }
    expect(field(d, "ok", "derivatives") == all, "overall derivative flag inconsistent");
    if (const json* c = optional_field(res, "csv")) {
      borel::SampledFunction tau = load_csv(report_dir / artifact_name(*c, "result.csv"));
      borel::Grid1D g = grid_from_report(res_field(res, "grid"));
      expect(tau.grid.n == g.n && tau.grid.a == g.a && tau.grid.b == g.b, "CSV grid differs from the report");
      const double h = g.step();
      for (std::size_t i = 0; i < g.n; ++i) {
        double x = g.x(i), v = tau.values[i];
        expect(v >= 0 && v <= 1, "cutoff leaves [0, 1] at x = " + std::to_string(x));
        if (spec.Z.contains(x)) expect(v == 1, "cutoff is not 1 on Z at x = " + std::to_string(x));
        if (!(x > spec.U.lo + h && x < spec.U.hi - h)) expect(v == 0, "cutoff is not 0 off U at x = " + std::to_string(x));
      }
      auto rep = borel::check_derivative_bounds(tau, spec, k_max);
      const json& ords = field(d, "orders", "derivatives");
      expect(ords.size() == rep.orders.size(), "derivative orders differ");
      for (std::size_t k = 0; k < rep.orders.size(); ++k)
        expect(ords[k].at("ratio").get<double>() == rep.orders[k].ratio,
               "derivative ratio at k = " + std::to_string(k + 1) + " does not match the CSV");
    }
  } else if (mode == "flat") {
    const json& f = res_field(res, "flat");
    unsigned j = as_unsigned(pr.param("order"), "params.order");
    double margin = num(field(f, "slope_margin", "flat"), "slope_margin");
    expect(as_unsigned(field(f, "order", "flat"), "order") == j, "order differs");
    bool all = true;
    for (const auto& o : field(f, "orders", "flat")) {
      unsigned k = as_unsigned(o.at("k"), "k");
      bool ok = num(o.at("slope"), "slope") >= static_cast<double>(j) - k - margin;
      expect(o.at("ok") == ok, "flat flag inconsistent at k = " + std::to_string(k));
      all = all && ok;
    }
    expect(field(f, "ok", "flat") == all, "overall flat flag inconsistent");
  } else {
    auto eps = field(res, "eps", "result").get<std::vector<double>>();
    const json& opt = res_field(res, "options");
    double shrink = num(opt.at("shrink"), "shrink"), margin = num(opt.at("slope_margin"), "slope_margin");
    for (std::size_t i = 0; i + 1 < eps.size(); ++i)
      expect(eps[i] > 0 && eps[i + 1] < eps[i] && eps[i + 1] <= shrink * eps[i] * (1 + 1e-12),
             "eps does not shrink at " + std::to_string(i));
    for (const auto& fit : res_field(res, "fits")) {
      unsigned N = as_unsigned(fit.at("N"), "N");
      bool ok = num(fit.at("slope"), "slope") >= static_cast<double>(N + 1) - margin;
      expect(fit.at("ok") == ok, "vanishing flag inconsistent at N = " + std::to_string(N));
      expect(ok, "vanishing order not reached at N = " + std::to_string(N));
    }
    expect(res_field(res, "plateau_exact") == true, "plateau is not exact");
    if (const json* c = optional_field(res, "csv")) {
      borel::SampledFunction f = load_csv(report_dir / artifact_name(*c, "result.csv"));
      borel::Grid1D g = grid_from_report(res_field(res, "grid"));
      expect(f.grid.n == g.n && f.grid.a == g.a && f.grid.b == g.b, "CSV grid differs from the report");
      borel::Interval Z = interval_of(pr.param("Z"), "params.Z");
      const json& ts = pr.param("terms");
      std::vector<std::function<double(double)>> gs;
      for (const auto& t : ts) gs.push_back(univariate(t.at("g"), "g"));
      std::size_t inner = 0;
      for (std::size_t i = 0; i < g.n; ++i) {
        double x = g.x(i), dist = Z.dist(x);
        if (dist <= eps.back()) {
          double sum = 0;
          for (const auto& gf : gs) sum += gf(x);
          expect(f.values[i] == sum, "f differs from the full sum at x = " + std::to_string(x));
          ++inner;
        } else if (dist >= eps.front()) {
          expect(f.values[i] == 0, "f is not 0 outside the outer cutoff at x = " + std::to_string(x));
        }
      }
      expect(inner <= res_field(res, "plateau_points").get<std::size_t>(), "plateau count too small");
    }
  }
  (void)flags;
}

}  // namespace

std::string problem_digest(const json& problem) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : problem.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json load_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw Error(Errc::Schema, path.string() + " is not valid JSON: " + e.what(), e.byte);
  }
}

std::string render(const json& doc) { return doc.dump(2) + "\n"; }

Outcome run_problem(const json& problem, const RunFlags& flags, const fs::path& base_dir) {
  return run_impl(problem, flags, base_dir, true);
}

Outcome run_file(const fs::path& problem_path, const RunFlags& flags) {
  json problem;
  try {
    problem = load_json(problem_path);
  } catch (const Error& e) {
    Outcome out;
    out.exit_code = 1;
    out.report = {{"format", kReportFormat}, {"task", nullptr}, {"status", "error"}, {"reason", reason_json(e)}};
    return out;
  }
  return run_problem(problem, flags, problem_path.parent_path());
}

VerifyOutcome verify_report(const json& report, const json& problem, const fs::path& report_dir,
                            const fs::path& problem_dir) {
  try {
    if (!report.is_object() || report.value("format", "") != kReportFormat)
      return {1, std::string("report format must be \"") + kReportFormat + "\""};
    if (report.value("problem_digest", "") != problem_digest(problem))
      return {1, "report was produced from a different problem file"};
    if (!problem.is_object() || report.value("task", json()) != problem.value("task", json()))
      return {1, "report task differs from the problem task"};

    RunFlags flags;
    const json& run = field(report, "run", "report");
    if (const json* o = optional_field(run, "order")) flags.order = as_unsigned(*o, "run.order");
    if (const json* s = optional_field(run, "seed")) flags.seed = s->get<std::uint64_t>();

    std::string status = as_string(field(report, "status", "report"), "status");
    if (status != "ok") {
      // nothing to recombine: the outcome itself is reproduced
      Outcome again = run_impl(problem, flags, problem_dir, false);
      std::string code = field(report, "reason", "report").value("code", "");
      if (again.report.value("status", "") != status || again.report["reason"].value("code", "") != code)
        return {3, "CertificateMismatch: reported " + status + " (" + code + ") does not reproduce"};
      return {0, "reproduced " + status + " (" + code + ")"};
    }

    std::optional<Problem> loaded;
    try {
      loaded = load_problem(problem, problem_dir);
    } catch (const Error& e) {
      return {1, std::string("problem file does not load: ") + e.what()};
    }
    const Problem& pr = *loaded;
    const json& res = field(report, "result", "report");
    if (pr.task == "lift")
      verify_lift(pr, res, flags);
    else if (pr.task == "lift_general")
      verify_lift_general(pr, res, flags);
    else if (pr.task == "check_formal")
      verify_check_formal(pr, res, flags);
    else if (pr.task == "homotopy_verify")
      verify_homotopy_payload(pr, res, flags);
    else if (pr.task == "weak_fg")
      verify_weak_fg(pr, res, flags);
    else if (pr.task == "cofinal")
      verify_cofinal(pr, res, flags);
    else
      verify_borel(pr, res, flags, report_dir);
    return {0, "all certificates verify"};
  } catch (const Mismatch& m) {
    return {3, "CertificateMismatch: " + m.what};
  } catch (const Error& e) {
    // unreadable payloads count as mismatches; a broken problem file does not
    return {e.code() == Errc::Io ? 1 : 3, "CertificateMismatch: " + std::string(e.what())};
  } catch (const json::exception& e) {
    return {3, std::string("CertificateMismatch: malformed report: ") + e.what()};
  }
}

VerifyOutcome verify_files(const fs::path& report_path, const fs::path& problem_path) {
  json report, problem;
  try {
    report = load_json(report_path);
    problem = load_json(problem_path);
  } catch (const Error& e) {
    return {1, e.what()};
  }
  return verify_report(report, problem, report_path.parent_path(), problem_path.parent_path());
}

}  // namespace filtap::cli
