#pragma once

// Validity of assertions in a fixed finite interpretation.

#include <cstddef>
#include <optional>
#include <string>

#include "cbv/evaluator.hpp"
#include "cbv/model.hpp"
#include "cbv/semantics.hpp"
#include "cbv/syntax.hpp"

namespace cbv {

struct ValidityVerdict {
  enum class Kind { Valid, Invalid, OverBudget };
  Kind kind = Kind::Valid;
  /// Present exactly when kind is Invalid.
  std::optional<State> counterexample;
  /// States that enumeration would need, for OverBudget.
  double required = 0;

  bool valid() const { return kind == Kind::Valid; }
};

std::string toString(const ValidityVerdict& v, const Interpretation& I);

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual ValidityVerdict isValid(const Formula& p) const = 0;
  ValidityVerdict entails(const Formula& p, const Formula& q) const {
    return isValid(Formula::implies(p, q));
  }
};

/// Enumerates every valuation of free(p).
class BruteForceOracle : public Oracle {
 public:
  BruteForceOracle(Interpretation I, std::size_t budget = kDefaultStateBudget) : I_(std::move(I)), budget_(budget) {}

  ValidityVerdict isValid(const Formula& p) const override;

 private:
  Interpretation I_;
  std::size_t budget_;
};

}  // namespace cbv
