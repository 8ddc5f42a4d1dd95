#pragma once

// Seeded random programs, assertions and true triples for property tests.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cbv/semantics.hpp"
#include "cbv/syntax.hpp"

namespace cbv::gen {

struct Config {
  VarList globals{"x", "y", "z"};
  std::size_t maxProcs = 2;
  std::size_t maxFormals = 1;
  /// Nesting depth of statements, leaves at depth 1.
  std::size_t maxDepth = 5;
  bool loops = true;
  bool blocks = true;
  /// Locals and formals get names that never occur globally.
  bool clashFree = false;
  /// Probability of a procedure call at a leaf.
  double callRate = 0.3;
};

class Generator {
 public:
  Generator(std::uint64_t seed, Config config = {});

  Program program();
  Stmt stmt(std::size_t depth, const VarList& scope);
  Expr expr(const VarList& vars, std::size_t depth = 2);
  Formula guard(const VarList& vars);
  /// Assertion with connectives and the occasional quantifier.
  Formula assertion(const VarList& vars, std::size_t depth = 2);
  /// A precondition: `true`, or a conjunction of up to two atoms.
  Formula precondition(const VarList& vars);

  /// {p} main {q} that holds, with q derived from the strongest
  /// postcondition by weakening, projection or a lucky random guess.
  Triple trueTriple(const Semantics& sem);

  std::size_t uniform(std::size_t lo, std::size_t hi);
  bool chance(double p);
  std::mt19937_64& engine() { return rng_; }
  const Config& config() const { return config_; }

 private:
  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[uniform(0, xs.size() - 1)];
  }
  Expr constant();

  std::mt19937_64 rng_;
  Config config_;
  std::vector<ProcDecl> decls_;
};

/// All states over `support`, in enumeration order (slot 0 fastest).
std::vector<State> allStates(const VarSet& support, std::size_t domainSize);

}  // namespace cbv::gen
