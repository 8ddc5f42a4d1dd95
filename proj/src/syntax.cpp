#include "cbv/syntax.hpp"

#include <algorithm>
#include <charconv>

#include "cbv/errors.hpp"

namespace cbv {

namespace {

template <typename T>
void requireDistinct(const std::vector<T>& items, const char* what) {
  std::set<T> seen;
  for (const auto& item : items) {
    if (!seen.insert(item).second) {
      throw ProgramError(std::string("duplicate variable '") + item + "' in " + what);
    }
  }
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& found,
                       std::vector<std::string> expected)
    : Error([&] {
        std::string msg = std::to_string(line) + ":" + std::to_string(column) +
                          ": syntax error at '" + found + "'";
        if (!expected.empty()) {
          msg += ", expected ";
          for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
            msg += expected[i];
          }
        }
        return msg;
      }()),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

BudgetExceeded::BudgetExceeded(double required, std::size_t budget)
    : Error("state budget exceeded: " + std::to_string(static_cast<long double>(required)) +
            " states needed, budget is " + std::to_string(budget)),
      required_(required),
      budget_(budget) {}

bool isFreshName(std::string_view name) { return freshIndex(name).has_value(); }

std::string freshName(std::size_t index) { return "$" + std::to_string(index); }

std::optional<std::size_t> freshIndex(std::string_view name) {
  if (name.size() < 2 || name[0] != '$') return std::nullopt;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), value);
  if (ec != std::errc() || ptr != name.data() + name.size()) return std::nullopt;
  return value;
}

// ---------------------------------------------------------------------------
// Expr

struct Expr::Node {
  Kind kind;
  std::string name;
  std::vector<Expr> args;
};

Expr Expr::var(std::string name) {
  return Expr(std::make_shared<const Node>(Node{Kind::Var, std::move(name), {}}));
}

Expr Expr::constant(std::string symbol) {
  return Expr(std::make_shared<const Node>(Node{Kind::Const, std::move(symbol), {}}));
}

Expr Expr::apply(std::string function, std::vector<Expr> args) {
  return Expr(std::make_shared<const Node>(Node{Kind::Apply, std::move(function), std::move(args)}));
}

Expr::Kind Expr::kind() const { return node_->kind; }
const std::string& Expr::name() const { return node_->name; }
std::span<const Expr> Expr::args() const { return node_->args; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  return a.node_->kind == b.node_->kind && a.node_->name == b.node_->name &&
         a.node_->args == b.node_->args;
}

ExprList varExprs(const VarList& vars) {
  ExprList out;
  out.reserve(vars.size());
  for (const auto& v : vars) out.push_back(Expr::var(v));
  return out;
}

// ---------------------------------------------------------------------------
// Formula

struct Formula::Node {
  Kind kind;
  std::string relation;
  std::vector<Expr> terms;
  std::vector<Formula> operands;
  VarList bound;
  bool quantifierFree;
};

namespace {

bool operandsQuantifierFree(const std::vector<Formula>& ops) {
  return std::all_of(ops.begin(), ops.end(), [](const Formula& f) { return f.isQuantifierFree(); });
}

}  // namespace

Formula Formula::truth() {
  static const Formula t(std::make_shared<const Node>(Node{Kind::True, {}, {}, {}, {}, true}));
  return t;
}

Formula Formula::falsity() {
  static const Formula f(std::make_shared<const Node>(Node{Kind::False, {}, {}, {}, {}, true}));
  return f;
}

Formula Formula::atom(std::string relation, std::vector<Expr> args) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::Atom, std::move(relation), std::move(args), {}, {}, true}));
}

Formula Formula::eq(Expr lhs, Expr rhs) { return atom("=", {std::move(lhs), std::move(rhs)}); }

Formula Formula::negation(Formula f) {
  bool qf = f.isQuantifierFree();
  return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, {}, {std::move(f)}, {}, qf}));
}

Formula Formula::conj(std::vector<Formula> operands) {
  if (operands.size() < 2) throw std::invalid_argument("conjunction needs at least two operands");
  bool qf = operandsQuantifierFree(operands);
  return Formula(std::make_shared<const Node>(Node{Kind::And, {}, {}, std::move(operands), {}, qf}));
}

Formula Formula::disj(std::vector<Formula> operands) {
  if (operands.size() < 2) throw std::invalid_argument("disjunction needs at least two operands");
  bool qf = operandsQuantifierFree(operands);
  return Formula(std::make_shared<const Node>(Node{Kind::Or, {}, {}, std::move(operands), {}, qf}));
}

Formula Formula::implies(Formula lhs, Formula rhs) {
  bool qf = lhs.isQuantifierFree() && rhs.isQuantifierFree();
  return Formula(std::make_shared<const Node>(
      Node{Kind::Implies, {}, {}, {std::move(lhs), std::move(rhs)}, {}, qf}));
}

namespace {

void checkBound(const VarList& vars) {
  if (vars.empty()) throw std::invalid_argument("quantifier with empty variable list");
  requireDistinct(vars, "quantifier prefix");
}

}  // namespace

Formula Formula::exists(VarList vars, Formula body) {
  checkBound(vars);
  return Formula(std::make_shared<const Node>(
      Node{Kind::Exists, {}, {}, {std::move(body)}, std::move(vars), false}));
}

Formula Formula::forall(VarList vars, Formula body) {
  checkBound(vars);
  return Formula(std::make_shared<const Node>(
      Node{Kind::Forall, {}, {}, {std::move(body)}, std::move(vars), false}));
}

Formula::Kind Formula::kind() const { return node_->kind; }
const std::string& Formula::relation() const { return node_->relation; }
std::span<const Expr> Formula::terms() const { return node_->terms; }
std::span<const Formula> Formula::operands() const { return node_->operands; }
const VarList& Formula::bound() const { return node_->bound; }
const Formula& Formula::body() const { return node_->operands.front(); }
bool Formula::isQuantifierFree() const { return node_->quantifierFree; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.relation == y.relation && x.bound == y.bound && x.terms == y.terms &&
         x.operands == y.operands;
}

Formula conjoin(std::vector<Formula> operands) {
  if (operands.empty()) return Formula::truth();
  if (operands.size() == 1) return operands.front();
  return Formula::conj(std::move(operands));
}

Formula disjoin(std::vector<Formula> operands) {
  if (operands.empty()) return Formula::falsity();
  if (operands.size() == 1) return operands.front();
  return Formula::disj(std::move(operands));
}

Formula equalities(std::span<const Expr> lhs, std::span<const Expr> rhs) {
  if (lhs.size() != rhs.size()) throw std::invalid_argument("equalities: length mismatch");
  std::vector<Formula> eqs;
  for (std::size_t i = 0; i < lhs.size(); ++i) eqs.push_back(Formula::eq(lhs[i], rhs[i]));
  return conjoin(std::move(eqs));
}

// ---------------------------------------------------------------------------
// Stmt

struct Stmt::Node {
  Kind kind;
  VarList vars;
  std::vector<Expr> exprs;
  std::string procedure;
  std::optional<Formula> cond;
  std::vector<Stmt> children;
};

Stmt Stmt::skip() {
  static const Stmt s(std::make_shared<const Node>(Node{Kind::Skip, {}, {}, {}, {}, {}}));
  return s;
}

Stmt Stmt::assign(VarList targets, ExprList sources) {
  if (targets.size() != sources.size()) {
    throw ProgramError("parallel assignment: " + std::to_string(targets.size()) + " targets but " +
                       std::to_string(sources.size()) + " expressions");
  }
  if (targets.empty()) return skip();
  requireDistinct(targets, "assignment targets");
  return Stmt(std::make_shared<const Node>(
      Node{Kind::Assign, std::move(targets), std::move(sources), {}, {}, {}}));
}

Stmt Stmt::call(std::string procedure, ExprList args) {
  return Stmt(std::make_shared<const Node>(
      Node{Kind::Call, {}, std::move(args), std::move(procedure), {}, {}}));
}

Stmt Stmt::seq(Stmt first, Stmt second) {
  return Stmt(std::make_shared<const Node>(
      Node{Kind::Seq, {}, {}, {}, {}, {std::move(first), std::move(second)}}));
}

namespace {

void requireGuard(const Formula& cond) {
  if (!cond.isQuantifierFree()) throw ProgramError("guard must be a quantifier-free formula");
}

}  // namespace

Stmt Stmt::ifThenElse(Formula cond, Stmt thenBranch, Stmt elseBranch) {
  requireGuard(cond);
  return Stmt(std::make_shared<const Node>(
      Node{Kind::If, {}, {}, {}, std::move(cond), {std::move(thenBranch), std::move(elseBranch)}}));
}

Stmt Stmt::loop(Formula cond, Stmt body) {
  requireGuard(cond);
  return Stmt(std::make_shared<const Node>(
      Node{Kind::While, {}, {}, {}, std::move(cond), {std::move(body)}}));
}

Stmt Stmt::block(VarList locals, ExprList inits, Stmt body) {
  if (locals.size() != inits.size()) {
    throw ProgramError("block: " + std::to_string(locals.size()) + " locals but " +
                       std::to_string(inits.size()) + " initialisers");
  }
  requireDistinct(locals, "block locals");
  return Stmt(std::make_shared<const Node>(
      Node{Kind::Block, std::move(locals), std::move(inits), {}, {}, {std::move(body)}}));
}

Stmt::Kind Stmt::kind() const { return node_->kind; }
const VarList& Stmt::vars() const { return node_->vars; }
std::span<const Expr> Stmt::exprs() const { return node_->exprs; }
const std::string& Stmt::procedure() const { return node_->procedure; }
const Formula& Stmt::condition() const { return *node_->cond; }
const Stmt& Stmt::first() const { return node_->children.at(0); }
const Stmt& Stmt::second() const { return node_->children.at(1); }

Stmt Stmt::blockPremise() const {
  if (kind() != Kind::Block) throw std::logic_error("blockPremise on a non-block statement");
  return seq(assign(vars(), ExprList(exprs().begin(), exprs().end())), body());
}

bool operator==(const Stmt& a, const Stmt& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.vars == y.vars && x.procedure == y.procedure &&
         x.exprs == y.exprs && x.cond == y.cond && x.children == y.children;
}

// ---------------------------------------------------------------------------
// Program

Program::Program(std::vector<ProcDecl> decls, Stmt main) : decls_(std::move(decls)), main_(std::move(main)) {
  for (std::size_t i = 0; i < decls_.size(); ++i) {
    if (!index_.emplace(decls_[i].name, i).second) {
      throw ProgramError("duplicate declaration of procedure '" + decls_[i].name + "'");
    }
    requireDistinct(decls_[i].formals, ("formals of " + decls_[i].name).c_str());
  }
  for (const auto& d : decls_) validateStmt(d.body);
  validateStmt(main_);
}

const ProcDecl* Program::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &decls_[it->second];
}

const ProcDecl& Program::decl(std::string_view name) const {
  const ProcDecl* d = find(name);
  if (d == nullptr) throw ProgramError("undeclared procedure '" + std::string(name) + "'");
  return *d;
}

Program Program::withMain(Stmt main) const { return Program(decls_, std::move(main)); }

void Program::validateStmt(const Stmt& s) const {
  switch (s.kind()) {
    case Stmt::Kind::Call: {
      const ProcDecl& d = decl(s.procedure());
      if (d.formals.size() != s.exprs().size()) {
        throw ProgramError("call of '" + d.name + "' with " + std::to_string(s.exprs().size()) +
                           " arguments, declared with " + std::to_string(d.formals.size()));
      }
      break;
    }
    case Stmt::Kind::Seq:
    case Stmt::Kind::If:
      validateStmt(s.first());
      validateStmt(s.second());
      break;
    case Stmt::Kind::While:
    case Stmt::Kind::Block:
      validateStmt(s.body());
      break;
    case Stmt::Kind::Skip:
    case Stmt::Kind::Assign:
      break;
  }
}

bool operator==(const Program& a, const Program& b) {
  return a.decls_ == b.decls_ && a.main_ == b.main_;
}

// ---------------------------------------------------------------------------
// Substitution

Substitution::Substitution(VarList vars, ExprList terms) : vars_(std::move(vars)), terms_(std::move(terms)) {
  if (vars_.size() != terms_.size()) throw std::invalid_argument("substitution: length mismatch");
  requireDistinct(vars_, "substitution domain");
}

Substitution Substitution::renaming(const VarList& from, const VarList& to) {
  return Substitution(from, varExprs(to));
}

const Expr* Substitution::lookup(std::string_view var) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i] == var) return &terms_[i];
  }
  return nullptr;
}

}  // namespace cbv
