#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace filtap {

/// Ordered variable names for one computation: x (base variables), y
/// (unknowns) and an optional homotopy parameter t.
///
/// Variables are indexed x first, then y, then t. Every x and y variable
/// has weight 1; t has weight 0, so orders and monomial ideals ignore it.
class VarContext {
public:
  VarContext(std::vector<std::string> x_vars, std::vector<std::string> y_vars,
             std::optional<std::string> t_var = std::nullopt);

  const std::vector<std::string>& x_vars() const noexcept { return x_; }
  const std::vector<std::string>& y_vars() const noexcept { return y_; }
  const std::optional<std::string>& t_var() const noexcept { return t_; }

  std::size_t x_count() const noexcept { return x_.size(); }
  std::size_t y_count() const noexcept { return y_.size(); }
  std::size_t size() const noexcept { return x_.size() + y_.size() + (t_ ? 1 : 0); }

  std::size_t y_index(std::size_t k) const noexcept { return x_.size() + k; }
  std::optional<std::size_t> t_index() const noexcept {
    return t_ ? std::optional<std::size_t>(x_.size() + y_.size()) : std::nullopt;
  }

  std::optional<std::size_t> index_of(const std::string& name) const;
  const std::string& name(std::size_t index) const;
  unsigned weight(std::size_t index) const noexcept;
  bool is_x(std::size_t index) const noexcept { return index < x_.size(); }
  bool is_y(std::size_t index) const noexcept {
    return index >= x_.size() && index < x_.size() + y_.size();
  }

  friend bool operator==(const VarContext& a, const VarContext& b) {
    return a.x_ == b.x_ && a.y_ == b.y_ && a.t_ == b.t_;
  }

  static bool valid_name(const std::string& name);

private:
  std::vector<std::string> x_;
  std::vector<std::string> y_;
  std::optional<std::string> t_;
};

using ContextPtr = std::shared_ptr<const VarContext>;

ContextPtr make_context(std::vector<std::string> x_vars, std::vector<std::string> y_vars = {},
                        std::optional<std::string> t_var = std::nullopt);

bool same_context(const ContextPtr& a, const ContextPtr& b);

/// Throws Error(ContextMismatch) unless same_context(a, b).
void require_same_context(const ContextPtr& a, const ContextPtr& b, const char* where);

}  // namespace filtap
