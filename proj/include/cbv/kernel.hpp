#pragma once

// The trusted checker for CBV derivations. Side conditions are decided
// syntactically; consequence obligations go to an oracle.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cbv/evaluator.hpp"
#include "cbv/oracle.hpp"
#include "cbv/proof.hpp"
#include "cbv/syntax.hpp"

namespace cbv {

/// Assumptions about generic calls available to a subsidiary proof.
using AssumptionContext = std::vector<Triple>;

struct NodeFailure {
  /// Child indices from the root.
  std::vector<std::size_t> path;
  Rule rule = Rule::Skip;
  /// Stable identifier such as "block.locals-free-in-post".
  std::string condition;
  std::string message;
  /// The nonempty intersection that violates a disjointness condition.
  VarSet offending;
  std::optional<State> counterexample;
};

struct CheckReport {
  std::vector<NodeFailure> failures;
  std::size_t ruleCount = 0;
  std::size_t obligations = 0;

  bool accepted() const { return failures.empty(); }
};

CheckReport checkDerivation(const Program& prog, const Oracle& oracle, const AssumptionContext& phi,
                            const Derivation& d);

/// Number of rule and axiom applications; assumption leaves are free.
std::size_t ruleCount(const Derivation& d);

std::string toString(const CheckReport& r, const Interpretation& I);

}  // namespace cbv
