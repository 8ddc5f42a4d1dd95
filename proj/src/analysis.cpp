#include "cbv/analysis.hpp"

#include <algorithm>
#include <map>

#include "cbv/errors.hpp"

namespace cbv {

namespace {

void collectExprVars(const Expr& t, VarSet& out) {
  if (t.kind() == Expr::Kind::Var) {
    out.insert(t.name());
    return;
  }
  for (const auto& a : t.args()) collectExprVars(a, out);
}

void collectFree(const Formula& p, const VarSet& bound, VarSet& out) {
  using K = Formula::Kind;
  switch (p.kind()) {
    case K::True:
    case K::False:
      return;
    case K::Atom: {
      VarSet vs;
      for (const auto& t : p.terms()) collectExprVars(t, vs);
      for (const auto& v : vs) {
        if (!bound.count(v)) out.insert(v);
      }
      return;
    }
    case K::Not:
    case K::And:
    case K::Or:
    case K::Implies:
      for (const auto& op : p.operands()) collectFree(op, bound, out);
      return;
    case K::Exists:
    case K::Forall: {
      VarSet inner = bound;
      inner.insert(p.bound().begin(), p.bound().end());
      collectFree(p.body(), inner, out);
      return;
    }
  }
}

void collectAll(const Formula& p, VarSet& out) {
  using K = Formula::Kind;
  switch (p.kind()) {
    case K::True:
    case K::False:
      return;
    case K::Atom:
      for (const auto& t : p.terms()) collectExprVars(t, out);
      return;
    case K::Exists:
    case K::Forall:
      out.insert(p.bound().begin(), p.bound().end());
      collectAll(p.body(), out);
      return;
    default:
      for (const auto& op : p.operands()) collectAll(op, out);
      return;
  }
}

void collectStmtVars(const Stmt& s, VarSet& out) {
  using K = Stmt::Kind;
  switch (s.kind()) {
    case K::Skip:
      return;
    case K::Assign:
    case K::Block:
      out.insert(s.vars().begin(), s.vars().end());
      for (const auto& t : s.exprs()) collectExprVars(t, out);
      if (s.kind() == K::Block) collectStmtVars(s.body(), out);
      return;
    case K::Call:
      for (const auto& t : s.exprs()) collectExprVars(t, out);
      return;
    case K::Seq:
      collectStmtVars(s.first(), out);
      collectStmtVars(s.second(), out);
      return;
    case K::If:
      collectAll(s.condition(), out);
      collectStmtVars(s.first(), out);
      collectStmtVars(s.second(), out);
      return;
    case K::While:
      collectAll(s.condition(), out);
      collectStmtVars(s.body(), out);
      return;
  }
}

}  // namespace

VarSet freeVars(const Formula& p) {
  VarSet out;
  collectFree(p, {}, out);
  return out;
}

VarSet allVars(const Formula& p) {
  VarSet out;
  collectAll(p, out);
  return out;
}

VarSet exprVars(const Expr& t) {
  VarSet out;
  collectExprVars(t, out);
  return out;
}

VarSet exprVars(std::span<const Expr> terms) {
  VarSet out;
  for (const auto& t : terms) collectExprVars(t, out);
  return out;
}

VarSet stmtVars(const Stmt& s) {
  VarSet out;
  collectStmtVars(s, out);
  return out;
}

VarSet declVars(const Program& prog) {
  VarSet out;
  for (const auto& d : prog.decls()) {
    out.insert(d.formals.begin(), d.formals.end());
    collectStmtVars(d.body, out);
  }
  return out;
}

VarSet programVars(const Program& prog, const Stmt& s) {
  VarSet out = declVars(prog);
  collectStmtVars(s, out);
  return out;
}

std::size_t nextFreshIndex(const VarSet& vars) {
  std::size_t next = 0;
  for (const auto& v : vars) {
    if (auto k = freshIndex(v)) next = std::max(next, *k + 1);
  }
  return next;
}

// ---------------------------------------------------------------------------
// Substitution

Expr substExpr(const Expr& t, const Substitution& s) {
  switch (t.kind()) {
    case Expr::Kind::Var:
      if (const Expr* r = s.lookup(t.name())) return *r;
      return t;
    case Expr::Kind::Const:
      return t;
    case Expr::Kind::Apply: {
      ExprList args;
      args.reserve(t.args().size());
      for (const auto& a : t.args()) args.push_back(substExpr(a, s));
      return Expr::apply(t.name(), std::move(args));
    }
  }
  return t;
}

namespace {

class Substituter {
 public:
  explicit Substituter(const Formula& p, const Substitution& s) {
    collectAll(p, taken_);
    for (std::size_t i = 0; i < s.size(); ++i) {
      taken_.insert(s.vars()[i]);
      collectExprVars(s.terms()[i], taken_);
    }
  }

  Formula apply(const Formula& p, const Substitution& s) {
    if (s.empty()) return p;
    using K = Formula::Kind;
    switch (p.kind()) {
      case K::True:
      case K::False:
        return p;
      case K::Atom: {
        ExprList terms;
        for (const auto& t : p.terms()) terms.push_back(substExpr(t, s));
        return Formula::atom(p.relation(), std::move(terms));
      }
      case K::Not:
        return Formula::negation(apply(p.operands()[0], s));
      case K::And:
      case K::Or: {
        std::vector<Formula> ops;
        for (const auto& op : p.operands()) ops.push_back(apply(op, s));
        return p.kind() == K::And ? Formula::conj(std::move(ops)) : Formula::disj(std::move(ops));
      }
      case K::Implies:
        return Formula::implies(apply(p.operands()[0], s), apply(p.operands()[1], s));
      case K::Exists:
      case K::Forall:
        return quantifier(p, s);
    }
    return p;
  }

 private:
  Formula quantifier(const Formula& p, const Substitution& s) {
    const VarList& bound = p.bound();
    VarSet bodyFree = freeVars(p.body());
    VarList vars;
    ExprList terms;
    VarSet inserted;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& x = s.vars()[i];
      if (std::find(bound.begin(), bound.end(), x) != bound.end() || !bodyFree.count(x)) continue;
      vars.push_back(x);
      terms.push_back(s.terms()[i]);
      collectExprVars(s.terms()[i], inserted);
    }
    if (vars.empty()) return p;
    VarList newBound = bound;
    for (auto& b : newBound) {
      if (!inserted.count(b)) continue;
      std::string fresh = nextFresh();
      vars.push_back(b);
      terms.push_back(Expr::var(fresh));
      b = fresh;
    }
    Formula body = apply(p.body(), Substitution(std::move(vars), std::move(terms)));
    return p.kind() == Formula::Kind::Exists ? Formula::exists(std::move(newBound), std::move(body))
                                             : Formula::forall(std::move(newBound), std::move(body));
  }

  std::string nextFresh() {
    while (taken_.count(freshName(counter_))) ++counter_;
    std::string name = freshName(counter_++);
    taken_.insert(name);
    return name;
  }

  VarSet taken_;
  std::size_t counter_ = 0;
};

}  // namespace

Formula substAssertion(const Formula& p, const Substitution& s) {
  if (s.empty()) return p;
  Substituter sub(p, s);
  return sub.apply(p, s);
}

// ---------------------------------------------------------------------------
// Alpha equivalence

namespace {

using BoundMap = std::map<std::string, std::vector<std::size_t>, std::less<>>;

struct AlphaScope {
  BoundMap left;
  BoundMap right;
  std::size_t depth = 0;
};

bool alphaExpr(const Expr& a, const Expr& b, const AlphaScope& sc) {
  if (a.kind() != b.kind()) return false;
  if (a.kind() == Expr::Kind::Var) {
    auto la = sc.left.find(a.name());
    auto rb = sc.right.find(b.name());
    bool boundA = la != sc.left.end() && !la->second.empty();
    bool boundB = rb != sc.right.end() && !rb->second.empty();
    if (boundA != boundB) return false;
    if (boundA) return la->second.back() == rb->second.back();
    return a.name() == b.name();
  }
  if (a.name() != b.name() || a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (!alphaExpr(a.args()[i], b.args()[i], sc)) return false;
  }
  return true;
}

bool alphaFormula(const Formula& a, const Formula& b, AlphaScope& sc) {
  using K = Formula::Kind;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case K::True:
    case K::False:
      return true;
    case K::Atom:
      if (a.relation() != b.relation() || a.terms().size() != b.terms().size()) return false;
      for (std::size_t i = 0; i < a.terms().size(); ++i) {
        if (!alphaExpr(a.terms()[i], b.terms()[i], sc)) return false;
      }
      return true;
    case K::Exists:
    case K::Forall: {
      if (a.bound().size() != b.bound().size()) return false;
      std::size_t n = a.bound().size();
      for (std::size_t i = 0; i < n; ++i) {
        sc.left[a.bound()[i]].push_back(sc.depth + i);
        sc.right[b.bound()[i]].push_back(sc.depth + i);
      }
      sc.depth += n;
      bool ok = alphaFormula(a.body(), b.body(), sc);
      sc.depth -= n;
      for (std::size_t i = 0; i < n; ++i) {
        sc.left[a.bound()[i]].pop_back();
        sc.right[b.bound()[i]].pop_back();
      }
      return ok;
    }
    default:
      if (a.operands().size() != b.operands().size()) return false;
      for (std::size_t i = 0; i < a.operands().size(); ++i) {
        if (!alphaFormula(a.operands()[i], b.operands()[i], sc)) return false;
      }
      return true;
  }
}

}  // namespace

bool alphaEquivalent(const Formula& a, const Formula& b) {
  if (a == b) return true;
  AlphaScope sc;
  return alphaFormula(a, b, sc);
}

// ---------------------------------------------------------------------------
// Occurrences

namespace {

class OccurrenceWalker {
 public:
  OccurrenceWalker(std::string scope, std::vector<Occurrence>& out)
      : scope_(std::move(scope)), out_(out) {}

  void note(const std::string& var, const VarSet& bound) {
    out_.push_back({var, scope_, index_++, bound.count(var) ? OccurrenceKind::Local : OccurrenceKind::Global});
  }

  void expr(const Expr& t, const VarSet& bound) {
    if (t.kind() == Expr::Kind::Var) {
      note(t.name(), bound);
      return;
    }
    for (const auto& a : t.args()) expr(a, bound);
  }

  void formula(const Formula& p, const VarSet& bound) {
    if (p.kind() == Formula::Kind::Atom) {
      for (const auto& t : p.terms()) expr(t, bound);
      return;
    }
    if (p.kind() == Formula::Kind::True || p.kind() == Formula::Kind::False) return;
    for (const auto& op : p.operands()) formula(op, bound);
  }

  void stmt(const Stmt& s, const VarSet& bound) {
    using K = Stmt::Kind;
    switch (s.kind()) {
      case K::Skip:
        return;
      case K::Assign:
        for (const auto& v : s.vars()) note(v, bound);
        for (const auto& t : s.exprs()) expr(t, bound);
        return;
      case K::Call:
        for (const auto& t : s.exprs()) expr(t, bound);
        return;
      case K::Seq:
        stmt(s.first(), bound);
        stmt(s.second(), bound);
        return;
      case K::If:
        formula(s.condition(), bound);
        stmt(s.first(), bound);
        stmt(s.second(), bound);
        return;
      case K::While:
        formula(s.condition(), bound);
        stmt(s.body(), bound);
        return;
      case K::Block: {
        VarSet inner = bound;
        inner.insert(s.vars().begin(), s.vars().end());
        for (const auto& v : s.vars()) note(v, inner);
        for (const auto& t : s.exprs()) expr(t, bound);
        stmt(s.body(), inner);
        return;
      }
    }
  }

 private:
  std::string scope_;
  std::vector<Occurrence>& out_;
  std::size_t index_ = 0;
};

}  // namespace

std::vector<Occurrence> classifyOccurrences(const Program& prog) {
  std::vector<Occurrence> out;
  for (const auto& d : prog.decls()) {
    OccurrenceWalker w(d.name, out);
    VarSet formals(d.formals.begin(), d.formals.end());
    for (const auto& u : d.formals) w.note(u, formals);
    w.stmt(d.body, formals);
  }
  OccurrenceWalker w("main", out);
  w.stmt(prog.main(), {});
  return out;
}

std::optional<Clash> findClash(const Program& prog) {
  auto occs = classifyOccurrences(prog);
  std::map<std::string, const Occurrence*> firstLocal;
  for (const auto& o : occs) {
    if (o.kind == OccurrenceKind::Local) firstLocal.emplace(o.variable, &o);
  }
  for (const auto& o : occs) {
    if (o.kind != OccurrenceKind::Global || o.scope == "main") continue;
    auto it = firstLocal.find(o.variable);
    if (it != firstLocal.end()) return Clash{o.variable, *it->second, o};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Change sets

namespace {

void collectChange(const Program* prog, const VarSet* declChange, const Stmt& s, VarSet& out) {
  using K = Stmt::Kind;
  switch (s.kind()) {
    case K::Skip:
      return;
    case K::Assign:
      out.insert(s.vars().begin(), s.vars().end());
      return;
    case K::Call: {
      if (prog == nullptr) return;
      const ProcDecl* d = prog->find(s.procedure());
      if (d == nullptr) return;
      for (const auto& v : *declChange) {
        if (std::find(d->formals.begin(), d->formals.end(), v) == d->formals.end()) out.insert(v);
      }
      return;
    }
    case K::Seq:
    case K::If:
      collectChange(prog, declChange, s.first(), out);
      collectChange(prog, declChange, s.second(), out);
      return;
    case K::While:
      collectChange(prog, declChange, s.body(), out);
      return;
    case K::Block: {
      VarSet inner;
      collectChange(prog, declChange, s.body(), inner);
      for (const auto& v : s.vars()) inner.erase(v);
      out.insert(inner.begin(), inner.end());
      return;
    }
  }
}

}  // namespace

VarSet declChangeSet(const Program& prog) {
  VarSet out;
  for (const auto& d : prog.decls()) collectChange(nullptr, nullptr, d.body, out);
  return out;
}

VarSet changeSet(const Program& prog, const Stmt& s) {
  VarSet dc = declChangeSet(prog);
  VarSet out;
  collectChange(&prog, &dc, s, out);
  return out;
}

// ---------------------------------------------------------------------------
// Purification and inlining

bool isGenericCall(const Program& prog, const Stmt& s) {
  if (s.kind() != Stmt::Kind::Call) return false;
  const ProcDecl& d = prog.decl(s.procedure());
  if (d.formals.size() != s.exprs().size()) return false;
  for (std::size_t i = 0; i < d.formals.size(); ++i) {
    const Expr& t = s.exprs()[i];
    if (t.kind() != Expr::Kind::Var || t.name() != d.formals[i]) return false;
  }
  return true;
}

namespace {

template <typename F>
Stmt rebuild(const Stmt& s, F&& leaf) {
  using K = Stmt::Kind;
  switch (s.kind()) {
    case K::Skip:
    case K::Assign:
    case K::Call:
      return leaf(s);
    case K::Seq:
      return Stmt::seq(rebuild(s.first(), leaf), rebuild(s.second(), leaf));
    case K::If:
      return Stmt::ifThenElse(s.condition(), rebuild(s.first(), leaf), rebuild(s.second(), leaf));
    case K::While:
      return Stmt::loop(s.condition(), rebuild(s.body(), leaf));
    case K::Block:
      return Stmt::block(s.vars(), ExprList(s.exprs().begin(), s.exprs().end()), rebuild(s.body(), leaf));
  }
  return s;
}

}  // namespace

Stmt purify(const Program& prog, const Stmt& s) {
  return rebuild(s, [&](const Stmt& leaf) {
    if (leaf.kind() != Stmt::Kind::Call || isGenericCall(prog, leaf)) return leaf;
    const ProcDecl& d = prog.decl(leaf.procedure());
    return Stmt::block(d.formals, ExprList(leaf.exprs().begin(), leaf.exprs().end()),
                       Stmt::call(d.name, varExprs(d.formals)));
  });
}

Program purify(const Program& prog) {
  std::vector<ProcDecl> decls;
  for (const auto& d : prog.decls()) decls.push_back({d.name, d.formals, purify(prog, d.body)});
  return Program(std::move(decls), purify(prog, prog.main()));
}

std::size_t countCalls(const Stmt& s) {
  std::size_t n = 0;
  rebuild(s, [&](const Stmt& leaf) {
    if (leaf.kind() == Stmt::Kind::Call) ++n;
    return leaf;
  });
  return n;
}

Stmt inlineOnce(const Program& prog, const Stmt& s, std::size_t callIndex) {
  std::size_t seen = 0;
  bool done = false;
  Stmt out = rebuild(s, [&](const Stmt& leaf) {
    if (leaf.kind() != Stmt::Kind::Call) return leaf;
    if (seen++ != callIndex) return leaf;
    done = true;
    const ProcDecl& d = prog.decl(leaf.procedure());
    return Stmt::block(d.formals, ExprList(leaf.exprs().begin(), leaf.exprs().end()), d.body);
  });
  if (!done) {
    throw ProgramError("no call with index " + std::to_string(callIndex) + " (statement has " +
                       std::to_string(seen) + " calls)");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

void addMetrics(const Stmt& s, Metrics& acc) {
  using K = Stmt::Kind;
  switch (s.kind()) {
    case K::Skip:
    case K::Assign:
      acc.l += 1;
      acc.assignments += 1;
      return;
    case K::Call:
      acc.l += 1;
      acc.calls += 1;
      return;
    case K::Seq:
    case K::If:
      acc.l += 1;
      addMetrics(s.first(), acc);
      addMetrics(s.second(), acc);
      return;
    case K::While:
      acc.l += 1;
      acc.loops += 1;
      addMetrics(s.body(), acc);
      return;
    case K::Block:
      // l(<local x := t; S>) = l(x := t; S) + 1 = l(S) + 3
      acc.l += 3;
      acc.blocks += 1;
      addMetrics(s.body(), acc);
      return;
  }
}

}  // namespace

Metrics metrics(const Stmt& s) {
  Metrics m;
  addMetrics(s, m);
  m.m = m.l + m.assignments + 3 * m.blocks + 6 * m.calls + m.loops;
  return m;
}

std::size_t programLength(const Program& prog, const Stmt& s) {
  std::size_t l = metrics(s).l;
  for (const auto& d : prog.decls()) l += metrics(d.body).l;
  return l;
}

}  // namespace cbv
