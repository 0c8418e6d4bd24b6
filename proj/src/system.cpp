#include "filtap/system.hpp"

#include "filtap/error.hpp"

namespace filtap {

PolySystem::PolySystem(ContextPtr ctx, std::vector<Jet> equations, std::optional<MonomialIdeal> quotient)
    : ctx_(std::move(ctx)), eqs_(std::move(equations)), quotient_(std::move(quotient)) {
  if (eqs_.empty()) throw Error(Errc::InvalidInput, "a system needs at least one equation");
  for (const auto& e : eqs_) {
    require_same_context(e.context(), ctx_, "system equation");
    if (!e.exact()) throw Error(Errc::InvalidInput, "system equations must be polynomials");
  }
  if (quotient_) require_same_context(quotient_->context(), ctx_, "system quotient");
}

std::vector<Jet> evaluate(const PolySystem& sys, std::span<const Jet> y_assign) {
  if (y_assign.size() != sys.unknown_count())
    throw Error(Errc::InvalidInput, "expected " + std::to_string(sys.unknown_count()) + " y values");
  for (const auto& y : y_assign) require_same_context(y.context(), sys.context(), "evaluate");
  std::vector<Jet> out;
  for (const auto& f : sys.equations()) {
    Jet r = substitute(f, y_assign);
    out.push_back(sys.quotient() ? reduce_mod(r, *sys.quotient()) : r);
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  if (m.empty()) return {};
  Matrix t(m.front().size(), std::vector<Jet>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.empty() || b.empty() || a.front().size() != b.size())
    throw Error(Errc::InvalidInput, "matrix shapes do not match");
  Matrix out(a.size(), std::vector<Jet>(b.front().size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.front().size(); ++j) {
      Jet acc = mul_exact(a[i][0], b[0][j]);
      for (std::size_t k = 1; k < b.size(); ++k) acc += mul_exact(a[i][k], b[k][j]);
      out[i][j] = acc;
    }
  return out;
}

namespace {

Matrix minor_of(const Matrix& m, std::size_t row, std::size_t col) {
  Matrix out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i == row) continue;
    std::vector<Jet> r;
    for (std::size_t j = 0; j < m.size(); ++j)
      if (j != col) r.push_back(m[i][j]);
    out.push_back(std::move(r));
  }
  return out;
}

void require_square(const Matrix& m) {
  if (m.empty()) throw Error(Errc::InvalidInput, "empty matrix");
  for (const auto& r : m)
    if (r.size() != m.size()) throw Error(Errc::InvalidInput, "matrix is not square");
  if (m.size() > 4) throw Error(Errc::SystemTooLarge, "determinants are limited to 4x4");
}

Jet det_rec(const Matrix& m) {
  if (m.size() == 1) return m[0][0];
  Jet acc;
  for (std::size_t j = 0; j < m.size(); ++j) {
    Jet term = mul_exact(m[0][j], det_rec(minor_of(m, 0, j)));
    if (j == 0)
      acc = term;
    else if (j % 2)
      acc -= term;
    else
      acc += term;
  }
  return acc;
}

}  // namespace

Jet determinant(const Matrix& m) {
  require_square(m);
  return det_rec(m);
}

Matrix adjugate(const Matrix& m) {
  require_square(m);
  const std::size_t n = m.size();
  Matrix adj(n, std::vector<Jet>(n));
  if (n == 1) {
    adj[0][0] = Jet::constant(m[0][0].context(), 1, m[0][0].order());
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Jet c = det_rec(minor_of(m, j, i));
      adj[i][j] = (i + j) % 2 ? -c : c;
    }
  return adj;
}

Matrix scaled_identity(const Jet& diagonal, std::size_t size) {
  Matrix out(size, std::vector<Jet>(size, Jet::zero(diagonal.context(), diagonal.order())));
  for (std::size_t i = 0; i < size; ++i) out[i][i] = diagonal;
  return out;
}

bool matrices_equal(const Matrix& a, const Matrix& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      unsigned o = std::min(a[i][j].order(), b[i][j].order());
      if (!agree_to_order(a[i][j], b[i][j], o)) return false;
    }
  }
  return true;
}

JacobianData jacobian_y(const PolySystem& sys, std::span<const Jet> y_assign) {
  const std::size_t s = sys.equation_count(), n = sys.unknown_count();
  if (s > 4) throw Error(Errc::SystemTooLarge, "at most 4 equations are supported");
  if (n == 0) throw Error(Errc::InvalidInput, "the system has no unknowns");
  if (y_assign.size() != n) throw Error(Errc::InvalidInput, "expected " + std::to_string(n) + " y values");
  JacobianData d;
  d.jacobian.assign(s, std::vector<Jet>(n));
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      Jet partial = partial_derivative(sys.equations()[i], sys.context()->y_index(k));
      d.jacobian[i][k] = substitute(partial, y_assign);
    }
  d.gram = multiply(d.jacobian, transpose(d.jacobian));
  d.h = determinant(d.gram);
  d.adjugate = adjugate(d.gram);
  if (!matrices_equal(multiply(d.gram, d.adjugate), scaled_identity(d.h, s)))
    throw Error(Errc::InvalidInput, "internal: adjugate identity failed");
  return d;
}

FormalCheck formal_solution_check(const PolySystem& sys, std::span<const Jet> y_assign, const Filtration& filt,
                                  unsigned N) {
  const MonomialIdeal& ideal = filt.ideal_at(N);
  auto residuals = evaluate(sys, y_assign);
  FormalCheck out;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    auto mem = contains_jet(ideal, residuals[i]);
    if (!mem) {
      out.failed_equation = i;
      out.offending = mem.offending;
      return out;
    }
    out.certificates.push_back(std::move(*mem.certificate));
  }
  return out;
}

PolySystem quotient_unfold(const PolySystem& sys) {
  if (!sys.quotient() || sys.quotient()->is_zero()) throw Error(Errc::NoQuotient, "the system has no quotient");
  const VarContext& c = *sys.context();
  const auto& gens = sys.quotient()->generators();
  const std::size_t s = sys.equation_count();

  auto taken = [&](const std::string& name) { return c.index_of(name).has_value(); };
  std::string stem = "z";
  for (bool clash = true; clash;) {
    clash = false;
    for (std::size_t i = 0; i < s && !clash; ++i)
      for (std::size_t a = 0; a < gens.size() && !clash; ++a) {
        std::string name = s == 1 ? stem + std::to_string(a + 1)
                                  : stem + std::to_string(i + 1) + "_" + std::to_string(a + 1);
        clash = taken(name);
      }
    if (clash) stem += "z";
  }
  std::vector<std::string> ys = c.y_vars();
  std::vector<std::string> znames;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t a = 0; a < gens.size(); ++a)
      znames.push_back(s == 1 ? stem + std::to_string(a + 1)
                              : stem + std::to_string(i + 1) + "_" + std::to_string(a + 1));
  ys.insert(ys.end(), znames.begin(), znames.end());
  auto target = make_context(c.x_vars(), ys, c.t_var());

  std::vector<Jet> eqs;
  for (std::size_t i = 0; i < s; ++i) {
    Jet e = embed(sys.equations()[i], target);
    for (std::size_t a = 0; a < gens.size(); ++a) {
      Monomial gz = embed(Jet::monomial(sys.context(), gens[a]), target).terms().begin()->first.times(
          Monomial::variable(*target, *target->index_of(znames[i * gens.size() + a])));
      e -= Jet::monomial(target, gz);
    }
    eqs.push_back(Jet::polynomial(target, e.terms()));
  }
  return PolySystem(target, std::move(eqs));
}

}  // namespace filtap
