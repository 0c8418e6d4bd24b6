#include <algorithm>
#include <set>

#include "filtap/error.hpp"
#include "filtap/monomial.hpp"
#include "filtap/rational.hpp"

namespace filtap {

std::string to_string(const Rational& value) { return value.get_str(); }

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto valid = [](const std::string& part, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && i < part.size() && (part[i] == '-' || part[i] == '+')) ++i;
    if (i == part.size()) return false;
    return std::all_of(part.begin() + static_cast<long>(i), part.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
  };
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid(num, true) || !valid(den, false)) throw Error(Errc::SyntaxError, "bad rational '" + s + "'");
  if (!num.empty() && num[0] == '+') num.erase(0, 1);
  mpz_class n(num), d(den);
  if (d == 0) throw Error(Errc::SyntaxError, "zero denominator in '" + s + "'");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

Rational factorial(unsigned n) {
  mpz_class f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return Rational(f);
}

bool VarContext::valid_name(const std::string& name) {
  if (name.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(name[0])) return false;
  return std::all_of(name.begin(), name.end(), [&](char c) { return alpha(c) || digit(c) || c == '_'; });
}

VarContext::VarContext(std::vector<std::string> x_vars, std::vector<std::string> y_vars,
                       std::optional<std::string> t_var)
    : x_(std::move(x_vars)), y_(std::move(y_vars)), t_(std::move(t_var)) {
  std::set<std::string> seen;
  auto check = [&](const std::string& n) {
    if (!valid_name(n)) throw Error(Errc::InvalidInput, "invalid variable name '" + n + "'");
    if (!seen.insert(n).second) throw Error(Errc::InvalidInput, "duplicate variable name '" + n + "'");
  };
  for (const auto& n : x_) check(n);
  for (const auto& n : y_) check(n);
  if (t_) check(*t_);
}

std::optional<std::size_t> VarContext::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < x_.size(); ++i)
    if (x_[i] == name) return i;
  for (std::size_t i = 0; i < y_.size(); ++i)
    if (y_[i] == name) return x_.size() + i;
  if (t_ && *t_ == name) return x_.size() + y_.size();
  return std::nullopt;
}

const std::string& VarContext::name(std::size_t index) const {
  if (index < x_.size()) return x_[index];
  if (index < x_.size() + y_.size()) return y_[index - x_.size()];
  return *t_;
}

unsigned VarContext::weight(std::size_t index) const noexcept {
  return (t_ && index == x_.size() + y_.size()) ? 0U : 1U;
}

ContextPtr make_context(std::vector<std::string> x_vars, std::vector<std::string> y_vars,
                        std::optional<std::string> t_var) {
  return std::make_shared<const VarContext>(std::move(x_vars), std::move(y_vars), std::move(t_var));
}

bool same_context(const ContextPtr& a, const ContextPtr& b) {
  return a == b || (a && b && *a == *b);
}

void require_same_context(const ContextPtr& a, const ContextPtr& b, const char* where) {
  if (!same_context(a, b)) throw Error(Errc::ContextMismatch, where);
}

// --- Monomial ---------------------------------------------------------------

Monomial::Monomial(const VarContext& ctx, std::vector<unsigned> exponents) : exps_(std::move(exponents)) {
  if (exps_.size() != ctx.size()) throw Error(Errc::ContextMismatch, "monomial length");
  for (std::size_t i = 0; i < exps_.size(); ++i) degree_ += ctx.weight(i) * exps_[i];
}

Monomial Monomial::one(const VarContext& ctx) { return Monomial(ctx, std::vector<unsigned>(ctx.size(), 0)); }

Monomial Monomial::variable(const VarContext& ctx, std::size_t index, unsigned power) {
  std::vector<unsigned> e(ctx.size(), 0);
  e.at(index) = power;
  return Monomial(ctx, std::move(e));
}

bool Monomial::is_one() const noexcept {
  return std::all_of(exps_.begin(), exps_.end(), [](unsigned e) { return e == 0; });
}

Monomial Monomial::times(const Monomial& other) const {
  Monomial out = *this;
  for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] += other.exps_[i];
  out.degree_ = degree_ + other.degree_;
  return out;
}

bool Monomial::divides(const Monomial& other, const VarContext& ctx) const {
  for (std::size_t i = 0; i < exps_.size(); ++i)
    if (ctx.weight(i) != 0 && exps_[i] > other.exps_[i]) return false;
  return true;
}

Monomial Monomial::cofactor_in(const Monomial& other, const VarContext& ctx) const {
  std::vector<unsigned> e(other.exps_);
  for (std::size_t i = 0; i < e.size(); ++i)
    if (ctx.weight(i) != 0) e[i] -= exps_[i];
  return Monomial(ctx, std::move(e));
}

Monomial Monomial::lcm(const Monomial& other, const VarContext& ctx) const {
  std::vector<unsigned> e(exps_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::max(exps_[i], other.exps_[i]);
  return Monomial(ctx, std::move(e));
}

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const noexcept {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  // Within a degree: larger leading exponents come first.
  return a.exponents() > b.exponents();
}

}  // namespace filtap
