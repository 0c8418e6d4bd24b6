// One-dimensional numerics for flat functions, smooth cutoffs with bounded
// derivative growth, and the assembly f = Σ τ_j·g_j. Double precision only.
#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

namespace filtap::borel {

/// Closed interval; an endpoint may be infinite. A point is lo == hi.
struct Interval {
  double lo = 0;
  double hi = 0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  double dist(double x) const;
};

/// Uniform grid on [a, b] with n samples.
struct Grid1D {
  double a = -1;
  double b = 1;
  std::size_t n = 4097;

  static Grid1D over(double a, double b, std::size_t n);
  double step() const { return (b - a) / static_cast<double>(n - 1); }
  double x(std::size_t i) const;
};

struct CutoffSpec {
  Interval Z;
  Interval U;  // read as the open interval (U.lo, U.hi)
  std::vector<double> widths;  // strictly decreasing, positive
};

struct SampledFunction {
  Grid1D grid;
  std::vector<double> values;

  void validate() const;
};

SampledFunction sample(const Grid1D& grid, const std::function<double(double)>& f);

/// Distance from Z to the complement of U.
double clearance(const Interval& Z, const Interval& U);

/// Stage 0 is the indicator of a neighbourhood of Z; stage l is stage l-1
/// convolved with the normalized box of width widths[l-1].
std::vector<SampledFunction> cutoff_stages(const CutoffSpec& spec, const Grid1D& grid);
SampledFunction build_cutoff(const CutoffSpec& spec, const Grid1D& grid);

/// Central k-th difference quotient; NaN where the stencil leaves the grid.
std::vector<double> finite_difference(const SampledFunction& f, unsigned k);

struct DerivativeBound {
  unsigned k = 0;
  double max_abs = 0;
  double ratio = 0;        // max|τ^(k)|·d_1···d_k / C^k
  double sharp_ratio = 0;  // same with C^(k-1), the exact ramp gives 1
  bool ok = false;
};

struct DerivativeReport {
  double constant = 2;
  double tolerance = 0.15;
  std::vector<DerivativeBound> orders;
  double margin = 0;  // 1 + tolerance - worst ratio
  bool ok = false;
};

DerivativeReport check_derivative_bounds(const SampledFunction& tau, const CutoffSpec& spec, unsigned k_max);

struct FlatOrder {
  unsigned k = 0;
  double constant = 0;  // smallest C with |g^(k)| ≤ C·dist^(j-k), 32 steps clear of Z
  double slope = 0;     // log-log slope of |g^(k)| against dist near Z
  std::size_t fit_points = 0;
  bool ok = false;
};

struct FlatReport {
  unsigned order = 0;
  double slope_margin = 0.25;
  double window = 0;  // slope fitted on dist ≤ window
  std::vector<FlatOrder> orders;
  double constant = 0;  // max over k
  bool ok = false;
};

FlatReport check_flat_bounds(const SampledFunction& g, const Interval& Z, unsigned j, unsigned k_max);

struct FlatTerm {
  SampledFunction g;
  unsigned order = 1;
};

struct BorelOptions {
  unsigned k_max = 1;  // derivative orders the ε-condition is enforced for
  double shrink = 0.5;  // ε_{j+1} ≤ shrink·ε_j
  double slope_margin = 0.25;
  unsigned bisection_steps = 60;
};

struct VanishingFit {
  unsigned N = 0;
  double window = 0;
  double slope = std::numeric_limits<double>::infinity();
  double constant = 0;  // max |f - S_N| / dist^(N+1) on the window
  std::size_t fit_points = 0;
  bool identically_zero = false;
  bool ok = false;
};

struct BorelResult {
  SampledFunction f;
  std::vector<double> eps;  // one per term, then the inner radius of the last cutoff
  std::vector<CutoffSpec> cutoff_specs;
  std::vector<SampledFunction> cutoffs;
  std::vector<FlatReport> flat;
  std::vector<VanishingFit> fits;
  std::size_t plateau_points = 0;  // grid points where every τ_j is 1
  bool plateau_exact = false;      // f == Σ g_j there, bit for bit
  BorelOptions options;
};

BorelResult assemble_borel(const std::vector<FlatTerm>& terms, const Interval& Z, const Interval& U,
                           const BorelOptions& options = {});

/// Two columns with a header line "x,value"; values round-trip exactly.
void write_csv(std::ostream& out, const SampledFunction& f);
SampledFunction read_csv(std::istream& in);

}  // namespace filtap::borel
