#pragma once

// Proof synthesis for true triples over a finite interpretation, following
// the relative-completeness construction: most general correctness
// specifications as recursion assumptions, exact strongest postconditions as
// intermediate assertions, and exact reachable sets as loop invariants.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cbv/analysis.hpp"
#include "cbv/errors.hpp"
#include "cbv/proof.hpp"
#include "cbv/semantics.hpp"

namespace cbv {

struct Mgcs {
  std::string procedure;
  VarList formals;
  /// change(D) \ formals.
  VarList changed;
  /// Fresh copies of `changed` and `formals`.
  VarList initial;
  VarList actuals;
  Triple spec;
};

/// G(D), allocating fresh names from `freshCounter` upwards.
std::vector<Mgcs> buildMgcs(const Semantics& sem, std::size_t& freshCounter);

class SynthesisError : public Error {
 public:
  enum class Kind { GoalFalse, Internal };
  SynthesisError(Kind kind, const std::string& message, std::optional<State> counterexample = std::nullopt)
      : Error(message), kind_(kind), counterexample_(std::move(counterexample)) {}

  Kind kind() const { return kind_; }
  const std::optional<State>& counterexample() const { return counterexample_; }

 private:
  Kind kind_;
  std::optional<State> counterexample_;
};

struct SynthesisTrace {
  Derivation proof;
  std::vector<Mgcs> mgcs;
  std::size_t ruleCount = 0;
  /// Rule applications in each premise of the root: main first, then one
  /// per declaration.
  std::vector<std::size_t> premiseCounts;
  Metrics mainMetrics;
  std::vector<Metrics> bodyMetrics;
  /// m(T) + Σ m(S_i) + 1.
  std::size_t bound = 0;
  bool boundHolds = false;
  /// l(D | T).
  std::size_t programLength = 0;
  std::size_t obligations = 0;
};

SynthesisTrace synthesize(const Semantics& sem, const Triple& goal);

struct BoundCheck {
  bool holds = true;
  std::vector<std::string> violations;
};

/// Per premise: count ≤ m of its statement; total ≤ m(T) + Σ m(S_i) + 1;
/// and m < 13·l for every component.
BoundCheck certifyLinearBound(const Program& prog, const SynthesisTrace& trace);

}  // namespace cbv
