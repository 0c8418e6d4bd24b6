#include "filtap/borel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "filtap/error.hpp"

namespace filtap::borel {

namespace {

constexpr double kTiny = 1e-300;
// constants are fitted this many steps away from Z, where difference
// quotients of dist^j are accurate
constexpr double kCollar = 32;

double binomial(unsigned n, unsigned k) {
  double r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(unsigned n) {
  double r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

bool same_grid(const Grid1D& a, const Grid1D& b) { return a.a == b.a && a.b == b.b && a.n == b.n; }

// Box of width d on a grid of step h: cells |m| < M get h/d, the two cells
// at ±M get the part of [-d/2, d/2] they overlap.
struct BoxKernel {
  long M = 0;
  double inner = 0;
  double edge = 0;
};

BoxKernel box_kernel(double d, double h) {
  BoxKernel k;
  k.M = std::max(0L, static_cast<long>(std::ceil(d / (2 * h) - 0.5)));
  if (k.M == 0) {
    k.edge = 1;  // unreachable under the grid checks, kept total
    return k;
  }
  k.inner = h / d;
  k.edge = (d / 2 - (static_cast<double>(k.M) - 0.5) * h) / d;
  return k;
}

// Least-squares slope of ys against xs.
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  double mx = sx / n, my = sy / n, num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return den > 0 ? num / den : 0;
}

unsigned stencil_half_width(unsigned k) { return (k + 1) / 2; }

void require_derivative_grid(const Grid1D& g) {
  if (g.n < 1025)
    throw Error(Errc::GridTooCoarse, "derivative checks need at least 1025 samples, got " + std::to_string(g.n));
}

}  // namespace

double Interval::dist(double x) const {
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0;
}

Grid1D Grid1D::over(double a, double b, std::size_t n) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw Error(Errc::InvalidInput, "grid needs finite a < b");
  if (n < 2) throw Error(Errc::InvalidInput, "grid needs at least two samples");
  return Grid1D{a, b, n};
}

double Grid1D::x(std::size_t i) const {
  if (i + 1 == n) return b;
  return a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
}

void SampledFunction::validate() const {
  if (values.size() != grid.n)
    throw Error(Errc::InvalidInput, "sampled function has " + std::to_string(values.size()) + " values for " +
                                        std::to_string(grid.n) + " grid points");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i])) throw Error(Errc::InvalidInput, "non-finite value at sample " + std::to_string(i));
}

SampledFunction sample(const Grid1D& grid, const std::function<double(double)>& f) {
  SampledFunction s{grid, std::vector<double>(grid.n)};
  for (std::size_t i = 0; i < grid.n; ++i) s.values[i] = f(grid.x(i));
  return s;
}

double clearance(const Interval& Z, const Interval& U) { return std::min(Z.lo - U.lo, U.hi - Z.hi); }

std::vector<SampledFunction> cutoff_stages(const CutoffSpec& spec, const Grid1D& grid) {
  const auto& d = spec.widths;
  if (d.empty()) throw Error(Errc::InvalidInput, "cutoff needs at least one width");
  for (std::size_t l = 0; l < d.size(); ++l) {
    if (!(d[l] > 0)) throw Error(Errc::InvalidInput, "widths must be positive");
    if (l > 0 && !(d[l] < d[l - 1])) throw Error(Errc::InvalidInput, "widths must be strictly decreasing");
  }
  if (!(spec.Z.lo <= spec.Z.hi)) throw Error(Errc::InvalidInput, "Z is empty");
  const double gap = clearance(spec.Z, spec.U);
  if (!(gap > 0)) throw Error(Errc::InvalidInput, "Z is not inside U");
  double total = 0;
  for (double w : d) total += w;
  if (total >= gap)
    throw Error(Errc::WidthsTooLarge,
                "sum of widths " + std::to_string(total) + " is not below dist(Z, boundary of U) " + std::to_string(gap));
  const double h = grid.step();
  if (h > d.back() / 8)
    throw Error(Errc::GridTooCoarse, "grid step " + std::to_string(h) + " exceeds smallest width / 8");
  // each discrete stage spreads by up to half a cell beyond its width
  if (static_cast<double>(d.size() + 1) * h >= gap - total)
    throw Error(Errc::GridTooCoarse, "room left by the widths is below grid resolution");

  // S = {dist(x, Z) ≤ gap/2}; the convolutions spread it by total/2
  const double r = gap / 2;
  const double s_lo = spec.Z.lo - r, s_hi = spec.Z.hi + r;

  std::vector<BoxKernel> kernels;
  long pad = 0;
  for (double w : d) {
    kernels.push_back(box_kernel(w, h));
    pad += kernels.back().M + 1;
  }
  const long n = static_cast<long>(grid.n), len = n + 2 * pad;
  auto pos = [&](long i) { return grid.a + static_cast<double>(i - pad) * h; };

  std::vector<double> cur(static_cast<std::size_t>(len));
  for (long i = 0; i < len; ++i) {
    double lo = pos(i) - h / 2, hi = pos(i) + h / 2;
    double v;
    if (lo >= s_lo && hi <= s_hi)
      v = 1;
    else if (hi <= s_lo || lo >= s_hi)
      v = 0;
    else
      v = (std::min(hi, s_hi) - std::max(lo, s_lo)) / h;
    cur[static_cast<std::size_t>(i)] = v;
  }

  auto crop = [&](const std::vector<double>& full) {
    return SampledFunction{grid, std::vector<double>(full.begin() + pad, full.begin() + pad + n)};
  };
  std::vector<SampledFunction> stages{crop(cur)};

  // Reads past the padded ends count as 0; the damage travels inward by M
  // per stage and stays inside the padding.
  for (const auto& kern : kernels) {
    const long M = kern.M;
    std::vector<long> ones(static_cast<std::size_t>(len + 1), 0), zeros(static_cast<std::size_t>(len + 1), 0);
    std::vector<long double> prefix(static_cast<std::size_t>(len + 1), 0);
    for (long i = 0; i < len; ++i) {
      ones[i + 1] = ones[i] + (cur[i] == 1.0);
      zeros[i + 1] = zeros[i] + (cur[i] == 0.0);
      prefix[i + 1] = prefix[i] + cur[i];
    }
    auto at = [&](long i) { return i < 0 || i >= len ? 0.0 : cur[static_cast<std::size_t>(i)]; };
    std::vector<double> next(static_cast<std::size_t>(len));
    for (long i = 0; i < len; ++i) {
      const long lo = i - M, hi = i + M;
      if (lo >= 0 && hi < len) {
        if (ones[hi + 1] - ones[lo] == 2 * M + 1) {
          next[i] = 1;
          continue;
        }
        if (zeros[hi + 1] - zeros[lo] == 2 * M + 1) {
          next[i] = 0;
          continue;
        }
      }
      long a = std::clamp(lo + 1, 0L, len), b = std::clamp(hi, 0L, len);
      long double inner = b > a ? prefix[b] - prefix[a] : 0.0L;
      long double v = static_cast<long double>(kern.inner) * inner +
                      static_cast<long double>(kern.edge) * (at(lo) + (M > 0 ? at(hi) : 0.0));
      next[i] = static_cast<double>(v);
    }
    cur = std::move(next);
    stages.push_back(crop(cur));
  }
  return stages;
}

SampledFunction build_cutoff(const CutoffSpec& spec, const Grid1D& grid) {
  return std::move(cutoff_stages(spec, grid).back());
}

std::vector<double> finite_difference(const SampledFunction& f, unsigned k) {
  f.validate();
  const std::size_t n = f.values.size();
  const double h = f.grid.step();
  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  if (k == 0) return f.values;
  const long hw = stencil_half_width(k);
  // Δ^k starting at p
  auto delta = [&](long p) {
    double acc = 0;
    for (unsigned m = 0; m <= k; ++m) {
      double c = binomial(k, m) * ((k - m) % 2 ? -1 : 1);
      acc += c * f.values[static_cast<std::size_t>(p + m)];
    }
    return acc;
  };
  const double scale = std::pow(h, static_cast<double>(k));
  for (long i = hw; i + hw < static_cast<long>(n); ++i) {
    double v = k % 2 == 0 ? delta(i - static_cast<long>(k / 2))
                          : 0.5 * (delta(i - static_cast<long>((k - 1) / 2)) + delta(i - static_cast<long>((k + 1) / 2)));
    out[static_cast<std::size_t>(i)] = v / scale;
  }
  return out;
}

DerivativeReport check_derivative_bounds(const SampledFunction& tau, const CutoffSpec& spec, unsigned k_max) {
  tau.validate();
  require_derivative_grid(tau.grid);
  if (k_max == 0 || k_max > spec.widths.size())
    throw Error(Errc::InvalidInput, "k_max must be between 1 and the number of widths");
  if (tau.grid.step() > spec.widths[k_max - 1] / 8)
    throw Error(Errc::GridTooCoarse, "grid step exceeds d_" + std::to_string(k_max) + " / 8");
  DerivativeReport rep;
  double worst = 0;
  for (unsigned k = 1; k <= k_max; ++k) {
    auto D = finite_difference(tau, k);
    double m = 0;
    for (double v : D)
      if (!std::isnan(v)) m = std::max(m, std::abs(v));
    double prod = 1;
    for (unsigned l = 0; l < k; ++l) prod *= spec.widths[l];
    DerivativeBound b;
    b.k = k;
    b.max_abs = m;
    b.ratio = m * prod / std::pow(rep.constant, k);
    b.sharp_ratio = m * prod / std::pow(rep.constant, k - 1);
    b.ok = b.ratio <= 1 + rep.tolerance;
    worst = std::max(worst, b.ratio);
    rep.orders.push_back(b);
  }
  rep.margin = 1 + rep.tolerance - worst;
  rep.ok = rep.margin >= 0;
  return rep;
}

FlatReport check_flat_bounds(const SampledFunction& g, const Interval& Z, unsigned j, unsigned k_max) {
  g.validate();
  require_derivative_grid(g.grid);
  if (j <= k_max) throw Error(Errc::InvalidInput, "flat order must exceed k_max");
  const double h = g.grid.step();
  double max_dist = 0;
  for (std::size_t i = 0; i < g.grid.n; ++i) max_dist = std::max(max_dist, Z.dist(g.grid.x(i)));
  FlatReport rep;
  rep.order = j;
  rep.window = 0.25 * max_dist;
  rep.ok = true;
  for (unsigned k = 0; k <= k_max; ++k) {
    auto D = finite_difference(g, k);
    const double off = std::max<double>(stencil_half_width(k) + 1, kCollar) * h;
    FlatOrder fo;
    fo.k = k;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < g.grid.n; ++i) {
      double v = D[i], dist = Z.dist(g.grid.x(i));
      if (std::isnan(v) || dist < off) continue;
      fo.constant = std::max(fo.constant, std::abs(v) / std::pow(dist, static_cast<double>(j - k)));
      if (dist <= rep.window && std::abs(v) > kTiny) {
        lx.push_back(std::log(dist));
        ly.push_back(std::log(std::abs(v)));
      }
    }
    fo.fit_points = lx.size();
    if (lx.size() < 2) {
      fo.slope = std::numeric_limits<double>::infinity();  // vanishes near Z on this grid
    } else {
      fo.slope = fit_slope(lx, ly);
    }
    fo.ok = fo.slope >= static_cast<double>(j - k) - rep.slope_margin;
    rep.ok = rep.ok && fo.ok;
    rep.constant = std::max(rep.constant, fo.constant);
    rep.orders.push_back(fo);
  }
  return rep;
}

BorelResult assemble_borel(const std::vector<FlatTerm>& terms, const Interval& Z, const Interval& U,
                           const BorelOptions& opt) {
  if (terms.empty()) throw Error(Errc::InvalidInput, "no terms to assemble");
  const Grid1D& grid = terms.front().g.grid;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!same_grid(terms[i].g.grid, grid)) throw Error(Errc::InvalidInput, "terms live on different grids");
    if (terms[i].order == 0) throw Error(Errc::InvalidInput, "term orders start at 1");
    if (i > 0 && terms[i].order <= terms[i - 1].order)
      throw Error(Errc::InvalidInput, "term orders must be strictly increasing");
  }
  if (!(opt.shrink > 0 && opt.shrink < 1)) throw Error(Errc::InvalidInput, "shrink factor must lie in (0, 1)");
  const double gap = clearance(Z, U);
  if (!(gap > 0)) throw Error(Errc::InvalidInput, "Z is not inside U");

  BorelResult out;
  out.options = opt;
  for (const auto& t : terms) {
    unsigned k = std::min(opt.k_max, t.order - 1);
    FlatReport rep = check_flat_bounds(t.g, Z, t.order, k);
    if (!rep.ok) {
      for (const auto& fo : rep.orders)
        if (!fo.ok)
          throw Error(Errc::FlatBoundsViolated, "term of order " + std::to_string(t.order) + ": derivative " +
                                                    std::to_string(fo.k) + " has log-log slope " +
                                                    std::to_string(fo.slope));
    }
    out.flat.push_back(std::move(rep));
  }

  const unsigned L = opt.k_max + 1;
  const double rho = opt.shrink, h = grid.step();
  auto widths = [&](double eps) {
    std::vector<double> d;
    const double fill = 0.9 * (1 - rho) * eps / (1 - std::pow(2.0, -static_cast<double>(L)));
    for (unsigned l = 1; l <= L; ++l) d.push_back(fill / std::pow(2.0, l));
    return d;
  };
  // smallest ε for which build_cutoff accepts the grid
  const double eps_min = std::max(8 * h / widths(1.0).back(),
                                  static_cast<double>(L + 1) * h / (0.1 * (1 - rho))) *
                         (1 + 1e-9);

  auto bound_holds = [&](double eps, std::size_t idx) {
    const unsigned j = terms[idx].order;
    const double Cg = out.flat[idx].constant;
    const auto d = widths(eps);
    for (unsigned kk = 0; kk <= opt.k_max && j > kk + 1; ++kk) {
      double sum = 0, prod = 1;
      for (unsigned l = 0; l <= kk; ++l) {
        if (l > 0) prod *= d[std::min<std::size_t>(l - 1, d.size() - 1)];
        sum += binomial(kk, l) * std::pow(2.0, l) * Cg / prod *
               std::pow(eps, static_cast<double>(j) - kk + l - 1);
      }
      if (!(sum < 1 / factorial(j))) return false;
    }
    return true;
  };

  for (std::size_t idx = 0; idx < terms.size(); ++idx) {
    double hi = idx == 0 ? 0.9 * gap : rho * out.eps.back();
    if (hi < eps_min)
      throw Error(Errc::EpsilonSearchFailed, "term of order " + std::to_string(terms[idx].order) +
                                                 ": room for ε is below grid resolution");
    double eps;
    if (bound_holds(hi, idx)) {
      eps = hi;
    } else {
      if (!bound_holds(eps_min, idx))
        throw Error(Errc::EpsilonSearchFailed, "term of order " + std::to_string(terms[idx].order) +
                                                   ": the 1/j! bound fails even at the smallest admissible ε");
      double lo = eps_min;
      for (unsigned it = 0; it < opt.bisection_steps; ++it) {
        double mid = 0.5 * (lo + hi);
        (bound_holds(mid, idx) ? lo : hi) = mid;
      }
      eps = lo;
    }
    out.eps.push_back(eps);
  }
  out.eps.push_back(rho * out.eps.back());

  out.f = SampledFunction{grid, std::vector<double>(grid.n, 0.0)};
  for (std::size_t idx = 0; idx < terms.size(); ++idx) {
    CutoffSpec spec{{Z.lo - out.eps[idx + 1], Z.hi + out.eps[idx + 1]},
                    {Z.lo - out.eps[idx], Z.hi + out.eps[idx]},
                    widths(out.eps[idx])};
    out.cutoffs.push_back(build_cutoff(spec, grid));
    out.cutoff_specs.push_back(std::move(spec));
    for (std::size_t i = 0; i < grid.n; ++i) out.f.values[i] += out.cutoffs.back().values[i] * terms[idx].g.values[i];
  }

  out.plateau_exact = true;
  for (std::size_t i = 0; i < grid.n; ++i) {
    bool all_one = true;
    for (const auto& tau : out.cutoffs) all_one = all_one && tau.values[i] == 1.0;
    if (!all_one) continue;
    ++out.plateau_points;
    double partial = 0;
    for (const auto& t : terms) partial += t.g.values[i];
    if (out.f.values[i] != partial) out.plateau_exact = false;
  }

  // f - S_N near Z, summed term by term so nothing cancels
  for (unsigned N = terms.front().order - 1; N < terms.back().order; ++N) {
    std::size_t next = 0;
    while (next < terms.size() && terms[next].order <= N) ++next;
    VanishingFit fit;
    fit.N = N;
    // every cutoff up to and including the first omitted term is 1 here
    fit.window = out.eps[std::min(next + 1, out.eps.size() - 1)];
    std::vector<double> lx, ly;
    bool any_nonzero = false;
    for (std::size_t i = 0; i < grid.n; ++i) {
      double dist = Z.dist(grid.x(i));
      if (dist < 2 * h || dist >= fit.window) continue;
      double r = 0;
      for (std::size_t idx = 0; idx < terms.size(); ++idx) {
        double tau = out.cutoffs[idx].values[i], g = terms[idx].g.values[i];
        r += terms[idx].order <= N ? (tau - 1) * g : tau * g;
      }
      if (r != 0) any_nonzero = true;
      fit.constant = std::max(fit.constant, std::abs(r) / std::pow(dist, static_cast<double>(N + 1)));
      if (std::abs(r) > kTiny) {
        lx.push_back(std::log(dist));
        ly.push_back(std::log(std::abs(r)));
      }
    }
    fit.fit_points = lx.size();
    fit.identically_zero = !any_nonzero;
    if (lx.size() >= 2) fit.slope = fit_slope(lx, ly);
    fit.ok = fit.slope >= static_cast<double>(N + 1) - opt.slope_margin;
    out.fits.push_back(fit);
  }
  return out;
}

void write_csv(std::ostream& out, const SampledFunction& f) {
  f.validate();
  out << "x,value\n";
  char buf[64];
  for (std::size_t i = 0; i < f.grid.n; ++i) {
    auto r = std::to_chars(buf, buf + sizeof buf, f.grid.x(i));
    out.write(buf, r.ptr - buf);
    out << ',';
    r = std::to_chars(buf, buf + sizeof buf, f.values[i]);
    out.write(buf, r.ptr - buf);
    out << '\n';
  }
}

SampledFunction read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::Io, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,value") throw Error(Errc::Schema, "CSV header must be 'x,value'");
  std::vector<double> xs, vs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(Errc::Schema, "line " + std::to_string(lineno) + ": expected two columns");
    double x, v;
    auto r1 = std::from_chars(line.data(), line.data() + comma, x);
    auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), v);
    if (r1.ec != std::errc() || r1.ptr != line.data() + comma || r2.ec != std::errc() ||
        r2.ptr != line.data() + line.size())
      throw Error(Errc::Schema, "line " + std::to_string(lineno) + ": not two numbers");
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.size() < 2) throw Error(Errc::Schema, "CSV needs at least two samples");
  Grid1D grid = Grid1D::over(xs.front(), xs.back(), xs.size());
  const double tol = 1e-9 * (grid.b - grid.a);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - grid.x(i)) > tol)
      throw Error(Errc::Schema, "sample " + std::to_string(i) + " breaks uniform spacing");
  SampledFunction f{grid, std::move(vs)};
  f.validate();
  return f;
}

}  // namespace filtap::borel
