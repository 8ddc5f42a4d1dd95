#include "cbv/synth.hpp"

#include <algorithm>
#include <iterator>

#include "cbv/kernel.hpp"
#include "cbv/oracle.hpp"

namespace cbv {

namespace {

VarList sortedList(const VarSet& s) { return VarList(s.begin(), s.end()); }

VarList freshList(std::size_t n, std::size_t& counter) {
  VarList out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(freshName(counter++));
  return out;
}

VarSet intersect(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

bool disjoint(const VarSet& a, const VarList& b) {
  return std::none_of(b.begin(), b.end(), [&](const std::string& v) { return a.count(v) > 0; });
}

VarList concat(const VarList& a, const VarList& b) {
  VarList out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Derivation node(Rule rule, Formula pre, const Stmt& s, Formula post, std::vector<Derivation> children = {}) {
  return Derivation{rule, Triple{std::move(pre), s, std::move(post)}, std::move(children), std::nullopt};
}

/// The exact precondition of a chain of assignments, if `s` is one.
std::optional<Formula> naturalPre(const Stmt& s, const Formula& q) {
  switch (s.kind()) {
    case Stmt::Kind::Skip:
      return q;
    case Stmt::Kind::Assign:
      return substAssertion(q, Substitution(s.vars(), ExprList(s.exprs().begin(), s.exprs().end())));
    case Stmt::Kind::Seq: {
      auto mid = naturalPre(s.second(), q);
      if (!mid) return std::nullopt;
      return naturalPre(s.first(), *mid);
    }
    default:
      return std::nullopt;
  }
}

class Synthesizer {
 public:
  Synthesizer(const Semantics& sem, std::vector<Mgcs> mgcs, std::size_t& counter)
      : sem_(sem), prog_(sem.program()), oracle_(sem.interpretation(), sem.budget()), mgcs_(std::move(mgcs)),
        counter_(counter) {}

  std::size_t obligations() const { return obligations_; }

  Derivation prove(const Formula& p, const Stmt& s, const Formula& q) {
    switch (s.kind()) {
      case Stmt::Kind::Skip:
        if (alphaEquivalent(p, q)) return node(Rule::Skip, p, s, q);
        return cons(p, q, node(Rule::Skip, q, s, q));
      case Stmt::Kind::Assign: {
        Formula w = *naturalPre(s, q);
        if (alphaEquivalent(p, w)) return node(Rule::Assign, p, s, q);
        return cons(p, q, node(Rule::Assign, w, s, q));
      }
      case Stmt::Kind::Seq:
        return seq(p, s, q);
      case Stmt::Kind::If: {
        const Formula& b = s.condition();
        std::vector<Derivation> kids;
        kids.push_back(prove(Formula::conj({p, b}), s.first(), q));
        kids.push_back(prove(Formula::conj({p, Formula::negation(b)}), s.second(), q));
        return node(Rule::If, p, s, q, std::move(kids));
      }
      case Stmt::Kind::While: {
        Formula inv = sem_.define(sem_.loopReachable(p, s));
        const Formula& b = s.condition();
        Derivation body = prove(Formula::conj({inv, b}), s.body(), inv);
        Derivation loop = node(Rule::While, inv, s, Formula::conj({inv, Formula::negation(b)}));
        loop.children.push_back(std::move(body));
        return cons(p, q, std::move(loop));
      }
      case Stmt::Kind::Block:
        return block(p, s, q);
      case Stmt::Kind::Call:
        return call(p, s, q);
    }
    throw SynthesisError(SynthesisError::Kind::Internal, "unknown statement kind");
  }

 private:
  Derivation seq(const Formula& p, const Stmt& s, const Formula& q) {
    const Stmt& s1 = s.first();
    const Stmt& s2 = s.second();
    Formula mid = p;
    if (s1.kind() != Stmt::Kind::Skip) {
      if (auto w = naturalPre(s2, q)) {
        mid = *w;
      } else {
        mid = sem_.spFormula(p, s1);
      }
    }
    std::vector<Derivation> kids;
    kids.push_back(prove(p, s1, mid));
    kids.push_back(prove(mid, s2, q));
    return node(Rule::Comp, p, s, q, std::move(kids));
  }

  Derivation block(const Formula& p, const Stmt& s, const Formula& q) {
    const VarList& locals = s.vars();
    if (disjoint(freeVars(q), locals)) {
      Derivation d = node(Rule::Block, p, s, q);
      d.children.push_back(prove(p, s.blockPremise(), q));
      return d;
    }
    VarList copies = freshList(locals.size(), counter_);
    ExprList localExprs = varExprs(locals);
    ExprList copyExprs = varExprs(copies);
    Formula pre = Formula::conj({p, equalities(localExprs, copyExprs)});
    Formula post = substAssertion(q, Substitution(locals, copyExprs));
    Derivation inner = node(Rule::Block, pre, s, post);
    inner.children.push_back(prove(pre, s.blockPremise(), post));
    Substitution back(copies, localExprs);
    Derivation renamed = node(Rule::Subst, substAssertion(pre, back), s, substAssertion(post, back));
    renamed.map = back;
    renamed.children.push_back(std::move(inner));
    return cons(p, q, std::move(renamed));
  }

  Derivation call(const Formula& p, const Stmt& s, const Formula& q) {
    const ProcDecl& decl = prog_.decl(s.procedure());
    auto it = std::find_if(mgcs_.begin(), mgcs_.end(), [&](const Mgcs& m) { return m.procedure == decl.name; });
    const Mgcs& g = *it;
    ExprList args(s.exprs().begin(), s.exprs().end());

    VarList z = g.initial;
    VarList v = g.actuals;
    Derivation spec{Rule::Assume, g.spec, {}, std::nullopt};
    VarSet used = freeVars(p);
    used.merge(freeVars(q));
    used.merge(exprVars(args));
    if (!disjoint(used, z) || !disjoint(used, v)) {
      VarList from = concat(z, v);
      z = freshList(z.size(), counter_);
      v = freshList(v.size(), counter_);
      Substitution ren = Substitution::renaming(from, concat(z, v));
      Derivation renamed = node(Rule::Subst, substAssertion(g.spec.pre, ren), g.spec.stmt,
                                substAssertion(g.spec.post, ren));
      renamed.map = ren;
      renamed.children.push_back(std::move(spec));
      spec = std::move(renamed);
    }
    const Formula specPre = spec.conclusion.pre;
    const Formula specPost = spec.conclusion.post;

    Formula callPre = substAssertion(specPre, Substitution(decl.formals, args));
    Derivation called = node(Rule::Call, callPre, s, specPost);
    called.children.push_back(std::move(spec));

    std::vector<Formula> parts{p};
    if (!args.empty()) parts.push_back(equalities(args, varExprs(v)));
    Formula inv = substAssertion(conjoin(parts), Substitution::renaming(g.changed, z));
    Derivation framed = node(Rule::Inv, Formula::conj({inv, callPre}), s, Formula::conj({inv, specPost}));
    framed.children.push_back(std::move(called));

    VarList witnesses = concat(v, z);
    if (witnesses.empty()) return cons(p, q, std::move(framed));
    Formula framedPre = framed.conclusion.pre;
    Derivation weakened = cons(framedPre, q, std::move(framed));
    Formula lifted = Formula::exists(witnesses, weakened.conclusion.pre);
    Derivation hidden = node(Rule::Exists, lifted, s, q);
    hidden.children.push_back(std::move(weakened));
    return cons(p, q, std::move(hidden));
  }

  /// CONS from `premise` to {p} S {q}, discharging both obligations.
  Derivation cons(const Formula& p, const Formula& q, Derivation premise) {
    require(p, premise.conclusion.pre);
    require(premise.conclusion.post, q);
    Derivation d = node(Rule::Cons, p, premise.conclusion.stmt, q);
    d.children.push_back(std::move(premise));
    return d;
  }

  void require(const Formula& lhs, const Formula& rhs) {
    if (alphaEquivalent(lhs, rhs)) return;
    ++obligations_;
    ValidityVerdict v = oracle_.entails(lhs, rhs);
    if (v.kind == ValidityVerdict::Kind::OverBudget) throw BudgetExceeded(v.required, sem_.budget());
    if (!v.valid()) {
      throw SynthesisError(SynthesisError::Kind::Internal,
                           "synthesised implication is not valid: " + toString(Formula::implies(lhs, rhs)),
                           v.counterexample);
    }
  }

  const Semantics& sem_;
  const Program& prog_;
  BruteForceOracle oracle_;
  std::vector<Mgcs> mgcs_;
  std::size_t& counter_;
  std::size_t obligations_ = 0;
};

}  // namespace

std::vector<Mgcs> buildMgcs(const Semantics& sem, std::size_t& freshCounter) {
  const Program& prog = sem.program();
  VarSet change = declChangeSet(prog);
  VarSet dvars = declVars(prog);
  std::vector<Mgcs> out;
  for (const auto& d : prog.decls()) {
    Mgcs g;
    g.procedure = d.name;
    g.formals = d.formals;
    VarSet formals(d.formals.begin(), d.formals.end());
    for (const auto& x : change) {
      if (formals.count(x) == 0) g.changed.push_back(x);
    }
    g.initial = freshList(g.changed.size(), freshCounter);
    g.actuals = freshList(g.formals.size(), freshCounter);
    Formula pre = equalities(varExprs(concat(g.changed, g.formals)), varExprs(concat(g.initial, g.actuals)));
    Stmt generic = Stmt::call(d.name, varExprs(d.formals));
    VarSet extra = dvars;
    extra.insert(g.initial.begin(), g.initial.end());
    extra.insert(g.actuals.begin(), g.actuals.end());
    Formula sp = sem.spFormula(pre, d.body, extra);
    VarSet hidden = intersect(formals, freeVars(sp));
    Formula post = hidden.empty() ? sp : Formula::exists(sortedList(hidden), sp);
    g.spec = Triple{pre, generic, post};
    out.push_back(std::move(g));
  }
  return out;
}

SynthesisTrace synthesize(const Semantics& sem, const Triple& goal) {
  const Program& prog = sem.program();
  prog.validateStmt(goal.stmt);
  TripleVerdict verdict = sem.tripleHolds(goal);
  if (!verdict.holds) {
    throw SynthesisError(SynthesisError::Kind::GoalFalse, "the triple does not hold: " + toString(goal),
                         verdict.counterexample);
  }

  VarSet names = programVars(prog, goal.stmt);
  names.merge(allVars(goal.pre));
  names.merge(allVars(goal.post));
  std::size_t counter = nextFreshIndex(names);

  SynthesisTrace trace;
  trace.mgcs = buildMgcs(sem, counter);
  Synthesizer synth(sem, trace.mgcs, counter);

  Derivation root = node(Rule::Recursion, goal.pre, goal.stmt, goal.post);
  root.children.push_back(synth.prove(goal.pre, goal.stmt, goal.post));
  for (std::size_t i = 0; i < prog.decls().size(); ++i) {
    const Mgcs& g = trace.mgcs[i];
    root.children.push_back(synth.prove(g.spec.pre, prog.decls()[i].body, g.spec.post));
  }

  trace.ruleCount = ruleCount(root);
  for (const auto& c : root.children) trace.premiseCounts.push_back(ruleCount(c));
  trace.mainMetrics = metrics(goal.stmt);
  trace.bound = trace.mainMetrics.m + 1;
  for (const auto& d : prog.decls()) {
    trace.bodyMetrics.push_back(metrics(d.body));
    trace.bound += trace.bodyMetrics.back().m;
  }
  trace.boundHolds = trace.ruleCount <= trace.bound;
  trace.programLength = programLength(prog, goal.stmt);
  trace.obligations = synth.obligations();
  trace.proof = std::move(root);
  return trace;
}

BoundCheck certifyLinearBound(const Program& prog, const SynthesisTrace& trace) {
  BoundCheck out;
  auto violate = [&](std::string msg) {
    out.holds = false;
    out.violations.push_back(std::move(msg));
  };
  const Derivation& root = trace.proof;
  if (root.rule != Rule::Recursion || root.children.size() != prog.decls().size() + 1) {
    violate("root is not a RECURSION node over every declaration");
    return out;
  }
  std::vector<Metrics> ms{metrics(root.conclusion.stmt)};
  std::vector<std::string> names{"main"};
  for (const auto& d : prog.decls()) {
    ms.push_back(metrics(d.body));
    names.push_back(d.name);
  }
  std::size_t bound = 1;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    std::size_t count = ruleCount(root.children[i]);
    if (count > ms[i].m) {
      violate(names[i] + ": " + std::to_string(count) + " rules exceed m = " + std::to_string(ms[i].m));
    }
    if (ms[i].m >= 13 * ms[i].l) {
      violate(names[i] + ": m = " + std::to_string(ms[i].m) + " is not below 13 l = " +
              std::to_string(13 * ms[i].l));
    }
    bound += ms[i].m;
  }
  std::size_t total = ruleCount(root);
  if (total > bound) {
    violate("total " + std::to_string(total) + " rules exceed " + std::to_string(bound));
  }
  return out;
}

}  // namespace cbv
