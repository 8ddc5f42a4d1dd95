#pragma once

// States over a finite support, and expressions and formulas compiled to
// slot-indexed trees for fast repeated evaluation.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cbv/model.hpp"
#include "cbv/syntax.hpp"

namespace cbv {

/// An ordered set of variables; slot i holds the i-th variable in sorted order.
class Support {
 public:
  Support() = default;
  explicit Support(const VarSet& vars);

  const VarList& vars() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  /// Slot of `var`, or size() if absent.
  std::size_t find(std::string_view var) const;
  bool contains(std::string_view var) const { return find(var) != size(); }

  friend bool operator==(const Support& a, const Support& b) { return a.vars_ == b.vars_; }

 private:
  VarList vars_;
};

using Valuation = std::vector<Elem>;

/// A total valuation: variables outside the support take the default
/// element 0.
class State {
 public:
  State() : support_(std::make_shared<const Support>()) {}
  State(std::shared_ptr<const Support> support, Valuation values);
  /// All variables of `support` set to the default element.
  explicit State(std::shared_ptr<const Support> support);

  const Support& support() const { return *support_; }
  const std::shared_ptr<const Support>& supportPtr() const { return support_; }
  const Valuation& values() const { return values_; }
  Valuation& values() { return values_; }

  Elem get(std::string_view var) const;
  void set(std::string_view var, Elem value);

  friend bool operator==(const State& a, const State& b) {
    return a.support() == b.support() && a.values_ == b.values_;
  }

 private:
  std::shared_ptr<const Support> support_;
  Valuation values_;
};

/// "x = 1, y = 0" using canonical constants.
std::string toString(const State& s, const Interpretation& I);

/// Number of states over `vars` variables, as a double to survive overflow.
double stateCount(const Interpretation& I, std::size_t vars);

/// Mixed-radix encoding of valuations; slot 0 is least significant.
std::uint64_t encode(const Valuation& v, std::size_t base);
void decode(std::uint64_t code, std::size_t base, Valuation& out);

namespace detail {
struct ExprNode;
struct FormulaNode;
}  // namespace detail

class CompiledExpr {
 public:
  CompiledExpr(const Expr& t, const Interpretation& I, const Support& support);
  Elem eval(const Elem* env) const;

 private:
  std::shared_ptr<const detail::ExprNode> root_;
  std::size_t base_;
};

/// A formula compiled against a support. Bound variables use scratch slots
/// after the support, so evaluation needs a frame of `frameSize()` elements
/// whose prefix is the valuation.
class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const Interpretation& I, const Support& support);

  std::size_t frameSize() const { return frameSize_; }
  bool eval(Elem* frame) const;
  /// Convenience: copies `v` into a private frame.
  bool holds(const Valuation& v) const;

 private:
  std::shared_ptr<const detail::FormulaNode> root_;
  std::size_t base_;
  std::size_t frameSize_;
};

Elem evalExpr(const Interpretation& I, const State& s, const Expr& t);
bool holds(const Interpretation& I, const State& s, const Formula& p);

}  // namespace cbv
