#include "cbv/kernel.hpp"

#include <algorithm>

#include "cbv/analysis.hpp"
#include "cbv/errors.hpp"

namespace cbv {

namespace {

VarSet intersect(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

VarSet toSet(const VarList& vars) { return VarSet(vars.begin(), vars.end()); }

class Checker {
 public:
  Checker(const Program& prog, const Oracle& oracle) : prog_(prog), oracle_(oracle) {}

  CheckReport report;

  void check(const Derivation& d, const AssumptionContext& phi) {
    if (d.rule != Rule::Assume) ++report.ruleCount;
    node_ = &d;
    try {
      prog_.validateStmt(d.conclusion.stmt);
    } catch (const ProgramError& e) {
      fail("statement.ill-formed", e.what());
      checkChildren(d, phi);
      return;
    }
    if (d.map && d.rule != Rule::Subst) fail("data.unexpected", "only SUBST nodes carry a map");
    std::size_t want = arity(d.rule);
    if (d.children.size() != want) {
      fail("arity", std::string(ruleName(d.rule)) + " takes " + std::to_string(want) + " premises, found " +
                        std::to_string(d.children.size()));
      checkChildren(d, phi);
      return;
    }
    switch (d.rule) {
      case Rule::Recursion:
        recursion(d);
        return;
      case Rule::Recursion1:
        recursion1(d);
        return;
      default:
        break;
    }
    rule(d, phi);
    checkChildren(d, phi);
  }

 private:
  std::size_t arity(Rule r) const {
    switch (r) {
      case Rule::Skip:
      case Rule::Assign:
      case Rule::Assume:
        return 0;
      case Rule::Comp:
      case Rule::If:
        return 2;
      case Rule::Recursion:
        return prog_.decls().size() + 1;
      default:
        return 1;
    }
  }

  void checkChildren(const Derivation& d, const AssumptionContext& phi) {
    for (std::size_t i = 0; i < d.children.size(); ++i) {
      path_.push_back(i);
      check(d.children[i], phi);
      path_.pop_back();
    }
    node_ = &d;
  }

  void fail(std::string condition, std::string message, VarSet offending = {},
            std::optional<State> counterexample = std::nullopt) {
    report.failures.push_back({path_, node_->rule, std::move(condition), std::move(message),
                               std::move(offending), std::move(counterexample)});
  }

  bool same(const Formula& a, const Formula& b) const { return alphaEquivalent(a, b); }

  void expectFormula(const Formula& found, const Formula& want, const char* condition, const char* what) {
    if (!same(found, want)) {
      fail(condition, std::string(what) + ": expected " + toString(want) + ", found " + toString(found));
    }
  }

  void expectStmt(const Stmt& found, const Stmt& want, const char* condition, const char* what) {
    if (!(found == want)) {
      fail(condition, std::string(what) + ": expected " + toString(want) + ", found " + toString(found));
    }
  }

  void disjoint(const VarSet& a, const VarSet& b, const char* condition, const std::string& what) {
    VarSet common = intersect(a, b);
    if (!common.empty()) fail(condition, what + " share " + toString(common), common);
  }

  void obligation(const Formula& p, const Formula& q, const char* condition) {
    if (same(p, q)) return;
    ++report.obligations;
    ValidityVerdict v = oracle_.entails(p, q);
    if (v.valid()) return;
    std::string msg = toString(p) + " -> " + toString(q) + " is not valid";
    if (v.kind == ValidityVerdict::Kind::OverBudget) {
      fail(condition, msg + " (oracle over budget)");
    } else {
      fail(condition, msg, {}, v.counterexample);
    }
  }

  void rule(const Derivation& d, const AssumptionContext& phi) {
    const Triple& c = d.conclusion;
    const Stmt& s = c.stmt;
    using K = Stmt::Kind;
    switch (d.rule) {
      case Rule::Skip:
        if (s.kind() != K::Skip) return fail("skip.statement", "SKIP applies to skip only");
        expectFormula(c.post, c.pre, "skip.schema", "postcondition");
        return;
      case Rule::Assign: {
        if (s.kind() != K::Assign) return fail("assign.statement", "ASSIGN applies to assignments only");
        Substitution sub(s.vars(), ExprList(s.exprs().begin(), s.exprs().end()));
        expectFormula(c.pre, substAssertion(c.post, sub), "assign.schema", "precondition");
        return;
      }
      case Rule::Comp: {
        if (s.kind() != K::Seq) return fail("comp.statement", "COMP applies to S1 ; S2 only");
        const Triple& a = d.children[0].conclusion;
        const Triple& b = d.children[1].conclusion;
        expectStmt(a.stmt, s.first(), "comp.schema", "first premise statement");
        expectStmt(b.stmt, s.second(), "comp.schema", "second premise statement");
        expectFormula(a.pre, c.pre, "comp.schema", "first premise precondition");
        expectFormula(b.post, c.post, "comp.schema", "second premise postcondition");
        expectFormula(b.pre, a.post, "comp.schema", "intermediate assertion");
        return;
      }
      case Rule::If: {
        if (s.kind() != K::If) return fail("if.statement", "IF applies to conditionals only");
        const Triple& a = d.children[0].conclusion;
        const Triple& b = d.children[1].conclusion;
        expectStmt(a.stmt, s.first(), "if.schema", "then premise statement");
        expectStmt(b.stmt, s.second(), "if.schema", "else premise statement");
        expectFormula(a.pre, Formula::conj({c.pre, s.condition()}), "if.schema", "then premise precondition");
        expectFormula(b.pre, Formula::conj({c.pre, Formula::negation(s.condition())}), "if.schema",
                      "else premise precondition");
        expectFormula(a.post, c.post, "if.schema", "then premise postcondition");
        expectFormula(b.post, c.post, "if.schema", "else premise postcondition");
        return;
      }
      case Rule::While: {
        if (s.kind() != K::While) return fail("while.statement", "WHILE applies to loops only");
        const Triple& a = d.children[0].conclusion;
        expectStmt(a.stmt, s.body(), "while.schema", "premise statement");
        expectFormula(c.post, Formula::conj({c.pre, Formula::negation(s.condition())}), "while.schema",
                      "postcondition");
        expectFormula(a.pre, Formula::conj({c.pre, s.condition()}), "while.schema", "premise precondition");
        expectFormula(a.post, c.pre, "while.schema", "premise postcondition");
        return;
      }
      case Rule::Cons: {
        const Triple& a = d.children[0].conclusion;
        expectStmt(a.stmt, s, "consequence.schema", "premise statement");
        obligation(c.pre, a.pre, "consequence.pre");
        obligation(a.post, c.post, "consequence.post");
        return;
      }
      case Rule::Block: {
        if (s.kind() != K::Block) return fail("block.statement", "BLOCK applies to blocks only");
        const Triple& a = d.children[0].conclusion;
        expectStmt(a.stmt, s.blockPremise(), "block.schema", "premise statement");
        expectFormula(a.pre, c.pre, "block.schema", "premise precondition");
        expectFormula(a.post, c.post, "block.schema", "premise postcondition");
        disjoint(toSet(s.vars()), freeVars(c.post), "block.locals-free-in-post",
                 "block locals and free(postcondition)");
        return;
      }
      case Rule::Call: {
        if (s.kind() != K::Call) return fail("call.statement", "CALL applies to procedure calls only");
        const ProcDecl& decl = prog_.decl(s.procedure());
        const Triple& a = d.children[0].conclusion;
        expectStmt(a.stmt, Stmt::call(decl.name, varExprs(decl.formals)), "call.schema",
                   "premise statement (generic call)");
        Substitution sub(decl.formals, ExprList(s.exprs().begin(), s.exprs().end()));
        expectFormula(c.pre, substAssertion(a.pre, sub), "call.schema", "precondition");
        expectFormula(a.post, c.post, "call.schema", "premise postcondition");
        disjoint(toSet(decl.formals), freeVars(c.post), "call.formals-free-in-post",
                 "formals of " + decl.name + " and free(postcondition)");
        return;
      }
      case Rule::Subst: {
        if (!d.map) return fail("subst.missing-map", "SUBST needs map=[x := y]");
        VarSet range;
        for (const auto& t : d.map->terms()) {
          if (t.kind() != Expr::Kind::Var) {
            return fail("subst.targets-not-variables", "SUBST renames to variables, found " + toString(t));
          }
          range.insert(t.name());
        }
        const Triple& a = d.children[0].conclusion;
        expectStmt(a.stmt, s, "subst.schema", "premise statement");
        expectFormula(c.pre, substAssertion(a.pre, *d.map), "subst.schema", "precondition");
        expectFormula(c.post, substAssertion(a.post, *d.map), "subst.schema", "postcondition");
        disjoint(toSet(d.map->vars()), programVars(prog_, s), "subst.domain-in-program",
                 "substituted variables and var(D | S)");
        disjoint(range, changeSet(prog_, s), "subst.range-changed", "substituted-in variables and change(D | S)");
        return;
      }
      case Rule::Inv: {
        if (c.pre.kind() != Formula::Kind::And || c.pre.operands().size() != 2 ||
            c.post.kind() != Formula::Kind::And || c.post.operands().size() != 2) {
          return fail("invariance.schema", "INV needs {I & r} S {I & q}");
        }
        const Formula& inv = c.pre.operands()[0];
        const Triple& a = d.children[0].conclusion;
        expectFormula(c.post.operands()[0], inv, "invariance.schema", "invariant in postcondition");
        expectStmt(a.stmt, s, "invariance.schema", "premise statement");
        expectFormula(a.pre, c.pre.operands()[1], "invariance.schema", "premise precondition");
        expectFormula(a.post, c.post.operands()[1], "invariance.schema", "premise postcondition");
        disjoint(freeVars(inv), changeSet(prog_, s), "invariance.changed-free", "free(invariant) and change(D | S)");
        return;
      }
      case Rule::Exists: {
        if (c.pre.kind() != Formula::Kind::Exists) return fail("exists.schema", "EXISTS needs {exists x: p} S {q}");
        const Triple& a = d.children[0].conclusion;
        expectStmt(a.stmt, s, "exists.schema", "premise statement");
        expectFormula(a.pre, c.pre.body(), "exists.schema", "premise precondition");
        expectFormula(a.post, c.post, "exists.schema", "premise postcondition");
        VarSet scope = programVars(prog_, s);
        for (const auto& v : freeVars(c.post)) scope.insert(v);
        disjoint(toSet(c.pre.bound()), scope, "exists.bound-in-program",
                 "quantified variables and var(D | S) ∪ free(postcondition)");
        return;
      }
      case Rule::Assume:
        if (std::find(phi.begin(), phi.end(), c) == phi.end()) {
          fail("assume.not-in-context", "assumption " + toString(c) + " is not in the context");
        }
        return;
      case Rule::Recursion:
      case Rule::Recursion1:
        return;
    }
  }

  void recursion(const Derivation& d) {
    const Triple& c = d.conclusion;
    AssumptionContext inner;
    for (std::size_t i = 0; i < prog_.decls().size(); ++i) {
      const ProcDecl& decl = prog_.decls()[i];
      const Triple& premise = d.children[i + 1].conclusion;
      expectStmt(premise.stmt, decl.body, "recursion.schema", ("body premise for " + decl.name).c_str());
      disjoint(toSet(decl.formals), freeVars(premise.post), "recursion.formals-free-in-post",
               "formals of " + decl.name + " and free(q_" + std::to_string(i + 1) + ")");
      inner.push_back({premise.pre, Stmt::call(decl.name, varExprs(decl.formals)), premise.post});
    }
    const Triple& main = d.children[0].conclusion;
    expectStmt(main.stmt, c.stmt, "recursion.schema", "main premise statement");
    expectFormula(main.pre, c.pre, "recursion.schema", "main premise precondition");
    expectFormula(main.post, c.post, "recursion.schema", "main premise postcondition");
    checkChildren(d, inner);
  }

  void recursion1(const Derivation& d) {
    const Triple& c = d.conclusion;
    if (prog_.decls().size() != 1) {
      fail("recursion1.single-declaration",
           "RECURSION1 needs exactly one declaration, program has " + std::to_string(prog_.decls().size()));
      checkChildren(d, {});
      return;
    }
    const ProcDecl& decl = prog_.decls()[0];
    expectStmt(c.stmt, Stmt::call(decl.name, varExprs(decl.formals)), "recursion1.schema",
               "conclusion statement (generic call)");
    const Triple& premise = d.children[0].conclusion;
    expectStmt(premise.stmt, decl.body, "recursion1.schema", "premise statement");
    expectFormula(premise.pre, c.pre, "recursion1.schema", "premise precondition");
    expectFormula(premise.post, c.post, "recursion1.schema", "premise postcondition");
    disjoint(toSet(decl.formals), freeVars(c.post), "recursion1.formals-free-in-post",
             "formals of " + decl.name + " and free(postcondition)");
    checkChildren(d, {c});
  }

  const Program& prog_;
  const Oracle& oracle_;
  std::vector<std::size_t> path_;
  const Derivation* node_ = nullptr;
};

}  // namespace

CheckReport checkDerivation(const Program& prog, const Oracle& oracle, const AssumptionContext& phi,
                            const Derivation& d) {
  Checker checker(prog, oracle);
  checker.check(d, phi);
  return std::move(checker.report);
}

std::size_t ruleCount(const Derivation& d) {
  std::size_t n = d.rule == Rule::Assume ? 0 : 1;
  for (const auto& c : d.children) n += ruleCount(c);
  return n;
}

std::string toString(const CheckReport& r, const Interpretation& I) {
  if (r.accepted()) {
    return "accepted: " + std::to_string(r.ruleCount) + " rule applications, " + std::to_string(r.obligations) +
           " oracle obligations\n";
  }
  std::string out = "rejected: " + std::to_string(r.failures.size()) + " failure(s)\n";
  for (const auto& f : r.failures) {
    std::string path = "/";
    for (std::size_t i = 0; i < f.path.size(); ++i) path += (i ? "/" : "") + std::to_string(f.path[i]);
    out += "  at " + path + " " + std::string(ruleName(f.rule)) + ": " + f.condition + ": " + f.message;
    if (f.counterexample) out += " [counterexample: " + toString(*f.counterexample, I) + "]";
    out += "\n";
  }
  return out;
}

}  // namespace cbv
