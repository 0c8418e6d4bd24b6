#include "filtap/filtration.hpp"

#include <algorithm>
#include <cctype>

#include "filtap/error.hpp"
#include "filtap/expr.hpp"

namespace filtap {

unsigned AffineIndex::at(unsigned j) const {
  long v = slope * static_cast<long>(j) + offset;
  return v < 0 ? 0u : static_cast<unsigned>(v);
}

std::string AffineIndex::to_string() const {
  std::string out;
  if (slope != 0) out = (slope == 1 ? "" : slope == -1 ? "-" : std::to_string(slope) + "*") + std::string("j");
  if (offset != 0 || out.empty()) {
    if (!out.empty()) out += offset < 0 ? "-" : "+";
    out += std::to_string(out.empty() ? offset : std::labs(offset));
  }
  return out;
}

MonomialIdeal FiltrationRule::evaluate(unsigned j) const {
  switch (kind) {
    case Kind::Powers: return power(base, exponent.at(j));
    case Kind::Fixed: return base;
    case Kind::Scaled: return product(scale, power(base, exponent.at(j)));
    case Kind::Sum:
    case Kind::Product:
    case Kind::Cap: {
      MonomialIdeal acc = children.front()->evaluate(j);
      for (std::size_t i = 1; i < children.size(); ++i) {
        MonomialIdeal next = children[i]->evaluate(j);
        acc = kind == Kind::Sum ? sum(acc, next) : kind == Kind::Product ? product(acc, next) : intersection(acc, next);
      }
      return acc;
    }
  }
  return base;
}

namespace {

std::string ideal_text(const MonomialIdeal& i) { return "[" + to_expr(i) + "]"; }

}  // namespace

std::string FiltrationRule::to_string() const {
  switch (kind) {
    case Kind::Powers: return "powers(" + ideal_text(base) + ", " + exponent.to_string() + ")";
    case Kind::Fixed: return "fixed(" + ideal_text(base) + ")";
    case Kind::Scaled:
      return "scaled(" + ideal_text(scale) + ", " + ideal_text(base) + ", " + exponent.to_string() + ")";
    default: break;
  }
  std::string out = kind == Kind::Sum ? "sum(" : kind == Kind::Product ? "prod(" : "cap(";
  for (std::size_t i = 0; i < children.size(); ++i) out += (i ? ", " : "") + children[i]->to_string();
  return out + ")";
}

Filtration::Filtration(ContextPtr ctx, RulePtr rule, unsigned j_max) : ctx_(std::move(ctx)), rule_(std::move(rule)) {
  ideals_.reserve(j_max + 1);
  for (unsigned j = 0; j <= j_max; ++j) {
    ideals_.push_back(rule_->evaluate(j));
    if (!same_context(ideals_.back().context(), ctx_))
      throw Error(Errc::ContextMismatch, "filtration rule built in another context");
    if (j > 0 && !contains_ideal(ideals_[j - 1], ideals_[j]))
      throw Error(Errc::NotDescending, "ideal at index " + std::to_string(j) + " is not inside the one before");
  }
}

Filtration Filtration::powers(const MonomialIdeal& base, unsigned j_max, AffineIndex exponent) {
  auto r = std::make_shared<FiltrationRule>();
  r->kind = FiltrationRule::Kind::Powers;
  r->base = base;
  r->exponent = exponent;
  return Filtration(base.context(), r, j_max);
}

const MonomialIdeal& Filtration::ideal_at(unsigned j) const {
  if (j >= ideals_.size())
    throw Error(Errc::InvalidInput,
                "filtration index " + std::to_string(j) + " beyond j_max " + std::to_string(j_max()));
  return ideals_[j];
}

namespace {

RulePtr embed_rule(const FiltrationRule& r, const ContextPtr& target) {
  auto out = std::make_shared<FiltrationRule>(r);
  if (r.base.context()) out->base = embed(r.base, target);
  if (r.scale.context()) out->scale = embed(r.scale, target);
  for (auto& c : out->children) c = embed_rule(*c, target);
  return out;
}

}  // namespace

Filtration Filtration::embedded(const ContextPtr& target) const {
  return Filtration(target, embed_rule(*rule_, target), j_max());
}

namespace {

class RuleParser {
public:
  RuleParser(std::string_view src, ContextPtr ctx) : src_(src), ctx_(std::move(ctx)) {}

  RulePtr parse() {
    RulePtr r = rule();
    skip();
    if (pos_ != src_.size()) fail("trailing input");
    return r;
  }

private:
  [[noreturn]] void fail(const std::string& what) const { throw Error(Errc::SyntaxError, what, pos_); }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string word() {
    skip();
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  long integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_ || pos_ - start > 6) {
      pos_ = start;
      fail("expected a small integer");
    }
    return std::stol(std::string(src_.substr(start, pos_ - start)));
  }

  MonomialIdeal ideal() {
    skip();
    MonomialIdeal base;
    if (accept('[')) {
      std::size_t start = pos_;
      std::size_t close = src_.find(']', start);
      if (close == std::string_view::npos) fail("unterminated '['");
      try {
        base = parse_monomial_ideal(src_.substr(start, close - start), ctx_);
      } catch (const Error& e) {
        throw Error(e.code(), e.detail(), start + e.position().value_or(0));
      }
      pos_ = close + 1;
    } else {
      std::size_t start = pos_;
      if (word() != "m") {
        pos_ = start;
        fail("expected an ideal '[...]' or 'm'");
      }
      base = MonomialIdeal::maximal(ctx_);
    }
    if (accept('^')) base = power(base, static_cast<unsigned>(integer()));
    return base;
  }

  // term := INT ('*' 'j')? | 'j' ('*' INT)?
  AffineIndex affine() {
    AffineIndex a{0, 0};
    bool first = true;
    for (;;) {
      long sign = 1;
      if (accept('-'))
        sign = -1;
      else if (!first && !accept('+'))
        break;
      else
        accept('+');
      skip();
      if (pos_ < src_.size() && src_[pos_] == 'j') {
        ++pos_;
        long k = accept('*') ? integer() : 1;
        a.slope += sign * k;
      } else {
        long k = integer();
        if (accept('*')) {
          if (word() != "j") fail("expected 'j'");
          a.slope += sign * k;
        } else {
          a.offset += sign * k;
        }
      }
      first = false;
    }
    return a;
  }

  RulePtr rule() {
    std::size_t start = (skip(), pos_);
    std::string name = word();
    auto r = std::make_shared<FiltrationRule>();
    expect('(');
    if (name == "powers") {
      r->kind = FiltrationRule::Kind::Powers;
      r->base = ideal();
      expect(',');
      r->exponent = affine();
    } else if (name == "fixed") {
      r->kind = FiltrationRule::Kind::Fixed;
      r->base = ideal();
    } else if (name == "scaled") {
      r->kind = FiltrationRule::Kind::Scaled;
      r->scale = ideal();
      expect(',');
      r->base = ideal();
      expect(',');
      r->exponent = affine();
    } else if (name == "sum" || name == "prod" || name == "cap") {
      r->kind = name == "sum"    ? FiltrationRule::Kind::Sum
                : name == "prod" ? FiltrationRule::Kind::Product
                                 : FiltrationRule::Kind::Cap;
      do r->children.push_back(rule());
      while (accept(','));
    } else {
      pos_ = start;
      fail("unknown filtration rule '" + name + "'");
    }
    expect(')');
    return r;
  }

  std::string_view src_;
  ContextPtr ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

RulePtr parse_filtration_rule(std::string_view src, const ContextPtr& ctx) { return RuleParser(src, ctx).parse(); }

FGCertificate weak_fg_check(const Filtration& f, unsigned N, unsigned search_limit) {
  if (N + search_limit > f.j_max())
    throw Error(Errc::InvalidInput, "weak_fg_check needs the filtration materialized to N + search_limit");
  const MonomialIdeal& base = f.ideal_at(N);
  MonomialIdeal generated(f.context(), base.generators());
  for (unsigned extra = 0; extra <= search_limit; ++extra)
    if (contains_ideal(generated, f.ideal_at(N + extra))) return FGCertificate{N, extra, base.generators()};
  throw Error(Errc::SearchExhausted, "no index up to the search limit is covered");
}

CofinalTable filtrations_cofinal(const Filtration& a, const Filtration& b, unsigned range) {
  CofinalTable out;
  auto scan = [&](const Filtration& from, const Filtration& into, std::vector<unsigned>& table, const char* dir) {
    unsigned d = 0;
    for (unsigned j = 0; j <= range; ++j) {
      const MonomialIdeal& target = into.ideal_at(j);
      // least d is monotone in j for descending filtrations
      while (d <= from.j_max() && !contains_ideal(target, from.ideal_at(d))) ++d;
      if (d > from.j_max()) {
        out.failed_direction = dir;
        out.failed_at = j;
        return false;
      }
      table.push_back(d);
    }
    return true;
  };
  if (!scan(a, b, out.a_into_b, "A->B")) return out;
  scan(b, a, out.b_into_a, "B->A");
  return out;
}

}  // namespace filtap
