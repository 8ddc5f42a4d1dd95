#pragma once

// Abstract syntax of the toy language: expressions, assertions, statements,
// procedure declarations and programs. All nodes are immutable and shared;
// copying a handle is cheap and equality is structural.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cbv {

using VarSet = std::set<std::string>;
using VarList = std::vector<std::string>;

/// Machine-generated variables live in a reserved namespace `$0, $1, ...`
/// that source programs may not use.
bool isFreshName(std::string_view name);
std::string freshName(std::size_t index);
/// Index of a fresh name, or nullopt for source names.
std::optional<std::size_t> freshIndex(std::string_view name);

class Expr {
 public:
  enum class Kind : std::uint8_t { Var, Const, Apply };

  static Expr var(std::string name);
  static Expr constant(std::string symbol);
  static Expr apply(std::string function, std::vector<Expr> args);

  Kind kind() const;
  bool isVar() const { return kind() == Kind::Var; }
  /// Variable name, constant symbol or function symbol.
  const std::string& name() const;
  std::span<const Expr> args() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

using ExprList = std::vector<Expr>;

/// First-order formula. Boolean expressions (guards) are the
/// quantifier-free formulas; `isQuantifierFree` is enforced where a guard is
/// required.
class Formula {
 public:
  enum class Kind : std::uint8_t { True, False, Atom, Not, And, Or, Implies, Exists, Forall };

  static Formula truth();
  static Formula falsity();
  static Formula atom(std::string relation, std::vector<Expr> args);
  static Formula eq(Expr lhs, Expr rhs);
  static Formula negation(Formula f);
  /// n-ary connectives; at least two operands.
  static Formula conj(std::vector<Formula> operands);
  static Formula disj(std::vector<Formula> operands);
  static Formula implies(Formula lhs, Formula rhs);
  /// Bound lists must be nonempty and duplicate-free.
  static Formula exists(VarList vars, Formula body);
  static Formula forall(VarList vars, Formula body);

  Kind kind() const;
  const std::string& relation() const;
  std::span<const Expr> terms() const;
  std::span<const Formula> operands() const;
  const VarList& bound() const;
  const Formula& body() const;

  bool isQuantifierFree() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// `true` for no operands, the operand itself for one, an n-ary node otherwise.
Formula conjoin(std::vector<Formula> operands);
Formula disjoin(std::vector<Formula> operands);
/// x1 = t1 & ... & xn = tn, `true` when empty.
Formula equalities(std::span<const Expr> lhs, std::span<const Expr> rhs);
ExprList varExprs(const VarList& vars);

class Stmt {
 public:
  enum class Kind : std::uint8_t { Skip, Assign, Call, Seq, If, While, Block };

  static Stmt skip();
  /// Parallel assignment; an empty target list yields `skip`.
  static Stmt assign(VarList targets, ExprList sources);
  static Stmt call(std::string procedure, ExprList args);
  static Stmt seq(Stmt first, Stmt second);
  static Stmt ifThenElse(Formula cond, Stmt thenBranch, Stmt elseBranch);
  static Stmt loop(Formula cond, Stmt body);
  static Stmt block(VarList locals, ExprList inits, Stmt body);

  Kind kind() const;
  /// Assignment targets or block locals.
  const VarList& vars() const;
  /// Assignment sources, block initialisers or call arguments.
  std::span<const Expr> exprs() const;
  const std::string& procedure() const;
  const Formula& condition() const;
  /// seq: first; if: then-branch; while/block: body.
  const Stmt& first() const;
  /// seq: second; if: else-branch.
  const Stmt& second() const;
  const Stmt& body() const { return first(); }

  /// The statement `x̄ := t̄; S` that a block `<local x̄ := t̄; S>` stands for
  /// (with `skip` for an empty local list).
  Stmt blockPremise() const;

  friend bool operator==(const Stmt& a, const Stmt& b);

 private:
  struct Node;
  explicit Stmt(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct ProcDecl {
  std::string name;
  VarList formals;
  Stmt body;

  friend bool operator==(const ProcDecl&, const ProcDecl&) = default;
};

/// (D | S): a set of declarations, kept in declaration order, and a main
/// statement. The constructor enforces the program invariants.
class Program {
 public:
  Program(std::vector<ProcDecl> decls, Stmt main);

  const std::vector<ProcDecl>& decls() const { return decls_; }
  const Stmt& main() const { return main_; }
  const ProcDecl* find(std::string_view name) const;
  const ProcDecl& decl(std::string_view name) const;

  /// Same declarations, different main statement (validated).
  Program withMain(Stmt main) const;
  /// Checks that every call in `s` targets a declared procedure with the
  /// right arity.
  void validateStmt(const Stmt& s) const;

  friend bool operator==(const Program& a, const Program& b);

 private:
  std::vector<ProcDecl> decls_;
  std::map<std::string, std::size_t, std::less<>> index_;
  Stmt main_;
};

/// Simultaneous substitution [x̄ := t̄] with distinct domain variables.
class Substitution {
 public:
  Substitution() = default;
  Substitution(VarList vars, ExprList terms);

  static Substitution renaming(const VarList& from, const VarList& to);

  bool empty() const { return vars_.empty(); }
  std::size_t size() const { return vars_.size(); }
  const VarList& vars() const { return vars_; }
  const ExprList& terms() const { return terms_; }
  const Expr* lookup(std::string_view var) const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  VarList vars_;
  ExprList terms_;
};

/// Partial correctness formula {pre} stmt {post}.
struct Triple {
  Formula pre = Formula::truth();
  Stmt stmt = Stmt::skip();
  Formula post = Formula::truth();

  friend bool operator==(const Triple&, const Triple&) = default;
};

std::string toString(const Expr& e);
std::string toString(const Formula& f);
std::string toString(const Stmt& s);
std::string toString(const ProcDecl& d);
std::string toString(const Program& p);
std::string toString(const Triple& t);
std::string toString(const Substitution& s);
std::string joinVars(const VarList& vars);
std::string toString(const VarSet& vars);

std::ostream& operator<<(std::ostream& os, const Expr& e);
std::ostream& operator<<(std::ostream& os, const Formula& f);
std::ostream& operator<<(std::ostream& os, const Stmt& s);
std::ostream& operator<<(std::ostream& os, const Program& p);
std::ostream& operator<<(std::ostream& os, const Triple& t);

}  // namespace cbv
