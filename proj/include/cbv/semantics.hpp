#pragma once

// Denotational meaning of programs over a finite interpretation. Procedure
// calls follow the copy rule under dynamic scope; recursion is resolved by
// Kleene iteration over the finite space of var(D)-valuations, so a call
// diverges exactly when its least-fixpoint entry is undefined.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cbv/evaluator.hpp"
#include "cbv/model.hpp"
#include "cbv/syntax.hpp"

namespace cbv {

constexpr std::size_t kDefaultStateBudget = 10'000'000;

/// nullopt means the run diverges.
using Outcome = std::optional<State>;

/// An explicit set of states over a common support, kept as sorted codes.
class StateSet {
 public:
  StateSet(std::shared_ptr<const Support> support, std::size_t base, std::vector<std::uint64_t> codes);

  const Support& support() const { return *support_; }
  const std::shared_ptr<const Support>& supportPtr() const { return support_; }
  std::size_t size() const { return codes_.size(); }
  bool empty() const { return codes_.empty(); }
  const std::vector<std::uint64_t>& codes() const { return codes_; }
  bool contains(const Valuation& v) const;
  std::vector<State> states() const;

 private:
  std::shared_ptr<const Support> support_;
  std::size_t base_;
  std::vector<std::uint64_t> codes_;
};

struct TripleVerdict {
  bool holds = true;
  /// First initial state (in enumeration order) that satisfies the
  /// precondition and ends in a state violating the postcondition.
  std::optional<State> counterexample;
  std::optional<State> finalState;
  std::size_t statesChecked = 0;
};

/// The least-fixpoint meaning of every declared procedure body, as a table
/// over codes of var(D)-valuations. -1 marks divergence.
struct ProcEnv {
  std::shared_ptr<const Support> support;
  std::vector<std::vector<std::int64_t>> tables;
  /// Kleene passes that added at least one entry.
  std::size_t productiveIterations = 0;
};

class Semantics {
 public:
  Semantics(Program prog, Interpretation I, std::size_t budget = kDefaultStateBudget);
  ~Semantics();
  Semantics(const Semantics&) = delete;
  Semantics& operator=(const Semantics&) = delete;

  const Program& program() const { return prog_; }
  const Interpretation& interpretation() const { return interp_; }
  std::size_t budget() const { return budget_; }

  /// Computed on first use.
  const ProcEnv& procEnv() const;

  /// M[[s]](sigma). The support of sigma must cover var(D | s).
  Outcome meaning(const Stmt& s, const State& sigma) const;
  Outcome run(const State& sigma) const { return meaning(prog_.main(), sigma); }

  /// var(D | S) ∪ free(p) ∪ free(q).
  VarSet tripleSupport(const Triple& t) const;
  TripleVerdict tripleHolds(const Triple& t) const;

  /// sp(p, s) over var(D | s) ∪ free(p) ∪ extra.
  StateSet strongestPost(const Formula& p, const Stmt& s, const VarSet& extra = {}) const;
  /// A formula defining strongestPost(p, s, extra) exactly.
  Formula spFormula(const Formula& p, const Stmt& s, const VarSet& extra = {}) const;
  /// States reachable at the head of `loop` from states satisfying p.
  StateSet loopReachable(const Formula& p, const Stmt& loop, const VarSet& extra = {}) const;

  /// Disjunction of `x = c` conjunctions, after dropping every variable in
  /// which the set is a full cylinder. Empty set: falsum; full set: true.
  Formula define(const StateSet& set) const;

  /// Throws BudgetExceeded when |domain|^vars exceeds the budget.
  void requireBudget(std::size_t vars) const;

 private:
  struct Machine;
  std::unique_ptr<Machine> compile(const Stmt& s, std::shared_ptr<const Support> support) const;

  Program prog_;
  Interpretation interp_;
  std::size_t budget_;
  mutable std::unique_ptr<ProcEnv> env_;
};

/// Direct evaluation with an environment of locations, bounded by call
/// depth. Static scope runs bodies in the declaration environment (the
/// globals); dynamic scope runs them in the caller's.
enum class Scope { Dynamic, Static };

struct FuelRun {
  enum class Status { Terminated, Diverged, OutOfFuel };
  Status status = Status::Terminated;
  State final;
  std::size_t maxDepth = 0;
};

FuelRun runWithFuel(const Program& prog, const Interpretation& I, const Stmt& s, const State& sigma,
                    Scope scope, std::size_t fuel);

}  // namespace cbv
