#include <gtest/gtest.h>

#include "cbv/analysis.hpp"
#include "cbv/errors.hpp"
#include "cbv/parser.hpp"
#include "cbv/semantics.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

namespace cbv {
namespace {

State stateOf(std::initializer_list<std::pair<const char*, Elem>> bindings, VarSet support = {}) {
  for (const auto& [v, _] : bindings) support.insert(v);
  State s(std::make_shared<const Support>(support));
  for (const auto& [v, e] : bindings) s.set(v, e);
  return s;
}

TEST(Model, Zmod) {
  Interpretation I = Interpretation::zmod(5);
  EXPECT_EQ(I.size(), 5u);
  EXPECT_EQ(*I.constant("3"), 3);
  EXPECT_EQ(I.function("+")->table[4 * 5 + 3], 2);
  EXPECT_EQ(I.function("-")->table[1 * 5 + 3], 3);
  EXPECT_TRUE(I.relation("<=")->table[1 * 5 + 4]);
  EXPECT_FALSE(I.relation("<=")->table[4 * 5 + 1]);
  EXPECT_EQ(toString(I.falsum()), "0 = 1");
}

TEST(Model, File) {
  Interpretation I = Interpretation::parse(
      "domain: a b\n"
      "const 0 = a\nconst 1 = b\n"
      "fun + : a a -> a\nfun + : a b -> b\nfun + : b a -> b\nfun + : b b -> a\n"
      "rel R : a b\n");
  EXPECT_EQ(I.size(), 2u);
  State s = stateOf({{"x", 1}});
  EXPECT_EQ(evalExpr(I, s, parseExpr("x + 1")), 0);
  EXPECT_TRUE(holds(I, stateOf({{"x", 0}, {"y", 1}}), parseFormula("R(x, y)")));
  EXPECT_FALSE(holds(I, stateOf({{"x", 1}, {"y", 0}}), parseFormula("R(x, y)")));
  Interpretation Z = Interpretation::parse("zmod 3\nrel E/1\n");
  EXPECT_EQ(Z.size(), 3u);
  EXPECT_NE(Z.relation("E"), nullptr);
}

TEST(Model, FileErrors) {
  EXPECT_THROW(Interpretation::parse("domain: a b\nconst 0 = c\n"), ModelError);
  EXPECT_THROW(Interpretation::parse("domain: a b\nconst 0 = a\n"), ModelError);
  EXPECT_THROW(Interpretation::parse("domain: a\nconst 0 = a\nfun + : a -> \n"), ModelError);
  EXPECT_THROW(Interpretation::load("zmod:0"), ModelError);
}

TEST(Semantics, Eval) {
  Interpretation Z5 = Interpretation::zmod(5);
  EXPECT_EQ(evalExpr(Z5, stateOf({{"x", 2}}), parseExpr("x + 1")), 3);
  EXPECT_EQ(evalExpr(Z5, stateOf({{"x", 2}}), parseExpr("0")), 0);
  EXPECT_EQ(evalExpr(Z5, stateOf({{"x", 4}}), parseExpr("x")), 4);
  Interpretation Z2 = Interpretation::zmod(2);
  EXPECT_TRUE(holds(Z2, stateOf({{"x", 1}}), parseFormula("x = 1")));
  EXPECT_TRUE(holds(Z2, stateOf({{"x", 1}}), parseFormula("exists u: u = x")));
  EXPECT_TRUE(holds(Z2, State(), parseFormula("forall x: x + x = 0")));
  EXPECT_FALSE(holds(Interpretation::zmod(3), State(), parseFormula("forall x: x + x = 0")));
}

TEST(Semantics, ScopePair) {
  for (std::size_t n : {2, 3}) {
    Interpretation I = Interpretation::zmod(n);
    Semantics dyn(fixtures::program("scope/dynamic.cbv"), I);
    Semantics ren(fixtures::program("scope/renamed.cbv"), I);
    for (const State& s : gen::allStates({"x", "y"}, n)) {
      Outcome a = dyn.run(s);
      ASSERT_TRUE(a);
      EXPECT_EQ(a->get("y"), 1);
      EXPECT_EQ(a->get("x"), 0);
      State r = s;
      Outcome b = ren.run(stateOf({{"x", s.get("x")}, {"y", s.get("y")}}, {"xr"}));
      ASSERT_TRUE(b);
      EXPECT_EQ(b->get("y"), 0);
    }
  }
}

TEST(Semantics, Divergence) {
  Semantics sem(parseProgram("main: while 0 = 0 do skip od"), Interpretation::zmod(2));
  EXPECT_FALSE(sem.run(State()));
  Semantics self(parseProgram("P() :: P() main: P()"), Interpretation::zmod(2));
  for (const auto& t : self.procEnv().tables) {
    for (auto e : t) EXPECT_EQ(e, -1);
  }
  EXPECT_FALSE(self.run(State()));
}

TEST(Semantics, NonRecursiveFixpoint) {
  Semantics sem(fixtures::program("example1/add.cbv"), Interpretation::zmod(3));
  EXPECT_EQ(sem.procEnv().productiveIterations, 1u);
  Outcome o = sem.run(stateOf({{"sum", 2}, {"u", 0}}));
  ASSERT_TRUE(o);
  EXPECT_EQ(o->get("sum"), 1);
}

TEST(Semantics, MutualRecursionMatchesBoundedInlining) {
  Program p = fixtures::program("mutual/evenodd.cbv");
  for (std::size_t n : {2, 3, 4}) {
    Interpretation I = Interpretation::zmod(n);
    Semantics sem(p, I);
    for (const State& s : gen::allStates({"n", "r"}, n)) {
      Outcome a = sem.run(s);
      FuelRun b = runWithFuel(p, I, p.main(), s, Scope::Dynamic, n + 2);
      ASSERT_TRUE(a);
      ASSERT_EQ(b.status, FuelRun::Status::Terminated);
      EXPECT_EQ(*a, b.final);
      EXPECT_EQ(a->get("r"), s.get("n") % 2 == 0 ? 1 : 0);
    }
  }
}

TEST(Semantics, TripleHolds) {
  Interpretation Z3 = Interpretation::zmod(3);
  Semantics add(fixtures::program("example1/add.cbv"), Z3);
  EXPECT_TRUE(add.tripleHolds(parseTriple("{sum = z} add(sum) {sum = z + z}")).holds);
  Semantics loop(parseProgram("main: while 0 = 0 do skip od"), Z3);
  EXPECT_TRUE(loop.tripleHolds(parseTriple("{true} while 0 = 0 do skip od {false}")).holds);
  Semantics local(fixtures::program("local/local.cbv"), Z3);
  EXPECT_TRUE(local.tripleHolds(Triple{Formula::truth(), local.program().main(), parseFormula("x = y")}).holds);
  TripleVerdict v = local.tripleHolds(parseTriple("{true} x := 0 {x = 1}"));
  EXPECT_FALSE(v.holds);
  ASSERT_TRUE(v.counterexample);
  EXPECT_EQ(v.finalState->get("x"), 0);
}

TEST(Semantics, Budget) {
  Semantics sem(parseProgram("main: a, b, c, d, e := 0, 0, 0, 0, 0"), Interpretation::zmod(3), 100);
  EXPECT_THROW(sem.tripleHolds(Triple{Formula::truth(), sem.program().main(), Formula::truth()}), BudgetExceeded);
  Semantics loop(parseProgram("main: while 0 = 0 do skip od"), Interpretation::zmod(3), 100);
  EXPECT_NO_THROW(loop.tripleHolds(Triple{Formula::truth(), loop.program().main(), Formula::falsity()}));
}

TEST(Semantics, StrongestPost) {
  Interpretation Z3 = Interpretation::zmod(3);
  Semantics sem(parseProgram("main: skip"), Z3);
  StateSet a = sem.strongestPost(Formula::truth(), parseStmt("x := 0"), {"y"});
  EXPECT_EQ(a.size(), 3u);
  for (const State& s : a.states()) EXPECT_EQ(s.get("x"), 0);
  EXPECT_TRUE(sem.strongestPost(Formula::falsity(), parseStmt("x := 0")).empty());
  StateSet c = sem.strongestPost(parseFormula("x = 0"), parseStmt("while !x = 1 do x := x + 1 od"));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.states()[0].get("x"), 1);
}

TEST(Semantics, SpFormula) {
  Interpretation Z3 = Interpretation::zmod(3);
  Semantics sem(parseProgram("main: skip"), Z3);
  EXPECT_EQ(toString(sem.spFormula(Formula::falsity(), parseStmt("x := 0"))), "0 = 1");
  EXPECT_EQ(sem.spFormula(parseFormula("y = 0"), parseStmt("x := 1")), parseFormula("x = 1 & y = 0"));
  Formula sp = sem.spFormula(Formula::truth(), parseStmt("x := 0"));
  for (const State& s : gen::allStates({"x"}, 3)) {
    EXPECT_EQ(holds(Z3, s, sp), holds(Z3, s, parseFormula("x = 0")));
  }
}

TEST(Semantics, Determinism) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    gen::Generator g(seed);
    Program p = g.program();
    Semantics a(p, Interpretation::zmod(2));
    Semantics b(p, Interpretation::zmod(2));
    for (const State& s : gen::allStates(programVars(p, p.main()), 2)) ASSERT_EQ(a.run(s), b.run(s));
  }
}

TEST(Semantics, CallRuleSchema) {
  Interpretation Z2 = Interpretation::zmod(2);
  std::size_t compared = 0;
  for (std::uint64_t seed = 0; seed < 200 && compared < 100; ++seed) {
    gen::Generator g(seed);
    Program p = g.program();
    for (const auto& d : p.decls()) {
      if (d.formals.empty()) continue;
      ExprList args;
      for (std::size_t i = 0; i < d.formals.size(); ++i) args.push_back(g.expr({"x", "y", "z"}));
      Stmt call = Stmt::call(d.name, args);
      Stmt unfolded = Stmt::seq(Stmt::assign(d.formals, args), d.body);
      Formula pre = g.precondition({"x", "y", "z"});
      Formula post = g.assertion({"x", "y", "z"});
      if (!freeVars(post).empty() && std::any_of(d.formals.begin(), d.formals.end(), [&](const auto& u) {
            return freeVars(post).count(u) > 0;
          })) {
        continue;
      }
      Semantics sem(p, Z2);
      EXPECT_EQ(sem.tripleHolds(Triple{pre, call, post}).holds, sem.tripleHolds(Triple{pre, unfolded, post}).holds)
          << toString(p) << "\n" << toString(pre) << " / " << toString(post);
      ++compared;
    }
  }
  EXPECT_GE(compared, 50u);
}

}  // namespace
}  // namespace cbv
