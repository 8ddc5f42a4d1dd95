#pragma once

// Purely syntactic analyses: variable sets, substitution, occurrence
// classification, change sets, purification, inlining and length metrics.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbv/syntax.hpp"

namespace cbv {

VarSet freeVars(const Formula& p);
/// Free and bound variables.
VarSet allVars(const Formula& p);
VarSet exprVars(const Expr& t);
VarSet exprVars(std::span<const Expr> terms);
/// var(S): every variable occurring in S, guards and block locals included.
VarSet stmtVars(const Stmt& s);
/// var(D): formals and body variables of every declaration.
VarSet declVars(const Program& prog);
/// var(D | S).
VarSet programVars(const Program& prog, const Stmt& s);

/// Smallest k such that no `$j` with j >= k occurs in `vars`.
std::size_t nextFreshIndex(const VarSet& vars);

Expr substExpr(const Expr& t, const Substitution& s);
/// Simultaneous, capture-avoiding substitution. A bound variable that would
/// capture a variable of an inserted term is renamed to the smallest `$k`
/// unused in the formula and the substitution.
Formula substAssertion(const Formula& p, const Substitution& s);

/// Equality up to consistent renaming of bound variables.
bool alphaEquivalent(const Formula& a, const Formula& b);

enum class OccurrenceKind { Local, Global };

struct Occurrence {
  std::string variable;
  /// "main" or the name of the declaring procedure.
  std::string scope;
  /// Left-to-right position among the variable occurrences of the scope.
  std::size_t index;
  OccurrenceKind kind;
};

/// Every variable occurrence of the program, declarations first (in
/// declaration order, formals included), then main.
std::vector<Occurrence> classifyOccurrences(const Program& prog);

struct Clash {
  std::string variable;
  Occurrence local;
  Occurrence global;
};

/// A variable with a local occurrence somewhere and a global occurrence in a
/// procedure body, or nullopt if the program is clash-free.
std::optional<Clash> findClash(const Program& prog);
inline bool isClashFree(const Program& prog) { return !findClash(prog).has_value(); }

/// change(D): union of change(∅ | S_i) over all bodies.
VarSet declChangeSet(const Program& prog);
/// change(D | s).
VarSet changeSet(const Program& prog, const Stmt& s);

bool isGenericCall(const Program& prog, const Stmt& s);
/// Replace every non-generic call P(t̄) by ⟨local ū := t̄; P(ū)⟩.
Stmt purify(const Program& prog, const Stmt& s);
Program purify(const Program& prog);

std::size_t countCalls(const Stmt& s);
/// Replace the call with preorder index `callIndex` in `s` by
/// ⟨local ū := t̄; body⟩, without renaming.
Stmt inlineOnce(const Program& prog, const Stmt& s, std::size_t callIndex);

struct Metrics {
  std::size_t l = 0;
  /// Parallel assignments, `skip` (the empty assignment) included; block
  /// initialisations are not counted.
  std::size_t assignments = 0;
  std::size_t blocks = 0;
  std::size_t calls = 0;
  std::size_t loops = 0;
  std::size_t m = 0;
};

Metrics metrics(const Stmt& s);
/// l(D | S) = Σ l(S_i) + l(S).
std::size_t programLength(const Program& prog, const Stmt& s);

}  // namespace cbv
