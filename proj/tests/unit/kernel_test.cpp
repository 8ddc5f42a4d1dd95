#include <algorithm>
#include <fstream>

#include <gtest/gtest.h>

#include "cbv/errors.hpp"
#include "cbv/kernel.hpp"
#include "cbv/oracle.hpp"
#include "cbv/parser.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

namespace cbv {
namespace {

TEST(Oracle, Validity) {
  Interpretation Z2 = Interpretation::zmod(2);
  BruteForceOracle o2(Z2);
  EXPECT_TRUE(o2.isValid(parseFormula("x = x")).valid());
  ValidityVerdict v = o2.isValid(parseFormula("x = 0"));
  ASSERT_EQ(v.kind, ValidityVerdict::Kind::Invalid);
  EXPECT_EQ(v.counterexample->get("x"), 1);
  BruteForceOracle o3(Interpretation::zmod(3));
  EXPECT_TRUE(o3.isValid(parseFormula("x = 1 & x = 1 -> x = 1 + 0")).valid());
  EXPECT_TRUE(o3.entails(Formula::falsity(), parseFormula("x = y")).valid());
  EXPECT_TRUE(o3.entails(parseFormula("sum = z & sum = z"), parseFormula("sum = z")).valid());
  EXPECT_FALSE(o3.entails(Formula::truth(), parseFormula("x = 0")).valid());
}

TEST(Oracle, Budget) {
  Interpretation Z3 = Interpretation::zmod(3);
  BruteForceOracle small(Z3, 10);
  ValidityVerdict v = small.isValid(parseFormula("a = b | c = d"));
  EXPECT_EQ(v.kind, ValidityVerdict::Kind::OverBudget);
  EXPECT_FALSE(v.counterexample);
}

TEST(Oracle, AgreesWithEnumeration) {
  Interpretation Z3 = Interpretation::zmod(3);
  BruteForceOracle o(Z3);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    gen::Generator g(seed);
    Formula p = g.assertion({"x", "y"}, 3);
    bool all = true;
    for (const State& s : gen::allStates({"x", "y"}, 3)) all = all && holds(Z3, s, p);
    ValidityVerdict v = o.isValid(p);
    ASSERT_EQ(v.valid(), all) << toString(p);
    if (!all) ASSERT_FALSE(holds(Z3, *v.counterexample, p));
  }
}

const char* kGoldens[][2] = {
    {"example1/block.cbv", "example1/block.cbvproof"},
    {"example1/add.cbv", "example1/add.cbvproof"},
    {"local/local.cbv", "local/local.cbvproof"},
    {"recursion/twice.cbv", "recursion/twice.cbvproof"},
    {"hoare/reset.cbv", "hoare/reset.cbvproof"},
};

TEST(Kernel, GoldensAccepted) {
  for (std::size_t n : {2, 3}) {
    Interpretation I = Interpretation::zmod(n);
    BruteForceOracle o(I);
    for (const auto& [prog, proof] : kGoldens) {
      CheckReport r = checkDerivation(fixtures::program(prog), o, {}, fixtures::proof(proof));
      EXPECT_TRUE(r.accepted()) << proof << "\n" << toString(r, I);
      EXPECT_EQ(r.ruleCount, ruleCount(fixtures::proof(proof)));
    }
  }
}

TEST(Kernel, RuleCounts) {
  EXPECT_EQ(ruleCount(fixtures::proof("example1/add.cbvproof")), 6u);
  EXPECT_EQ(ruleCount(fixtures::proof("example1/block.cbvproof")), 6u);
  EXPECT_EQ(ruleCount(fixtures::proof("local/local.cbvproof")), 16u);
  EXPECT_EQ(ruleCount(parseProof("(SKIP {true} skip {true})")), 1u);
  Derivation twice = fixtures::proof("recursion/twice.cbvproof");
  ASSERT_EQ(twice.rule, Rule::Recursion);
  std::size_t sum = 1;
  for (const auto& c : twice.children) sum += ruleCount(c);
  EXPECT_EQ(ruleCount(twice), sum);
}

TEST(Kernel, Mutations) {
  std::istringstream in(fixtures::read("mutations/manifest.txt"));
  std::string line;
  std::set<std::string> conditions;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string name, prog, expected;
    row >> name >> prog >> expected;
    Interpretation I = Interpretation::zmod(3);
    BruteForceOracle o(I);
    CheckReport r = checkDerivation(fixtures::program(prog), o, {}, fixtures::proof("mutations/" + name + ".cbvproof"));
    EXPECT_FALSE(r.accepted()) << name;
    bool found = std::any_of(r.failures.begin(), r.failures.end(),
                             [&](const NodeFailure& f) { return f.condition == expected; });
    EXPECT_TRUE(found) << name << "\n" << toString(r, I);
    conditions.insert(expected);
  }
  EXPECT_GE(conditions.size(), 12u);
}

TEST(Kernel, BlockWithLocalInPost) {
  Program p = parseProgram("main: begin local u := t ; x := u end");
  Derivation d = parseProof(
      "(BLOCK {true} begin local u := t ; x := u end {x = u}"
      "  (COMP {true} u := t ; x := u {x = u}"
      "    (ASSIGN {true} u := t {u = u})"
      "    (CONS {u = u} x := u {x = u} (ASSIGN {u = u} x := u {x = u}))))");
  BruteForceOracle o(Interpretation::zmod(2));
  CheckReport r = checkDerivation(p, o, {}, d);
  ASSERT_FALSE(r.accepted());
  const NodeFailure& f = r.failures.front();
  EXPECT_EQ(f.condition, "block.locals-free-in-post");
  EXPECT_EQ(f.offending, VarSet{"u"});
  EXPECT_TRUE(f.path.empty());
}

TEST(Kernel, ObligationCounterexample) {
  Program p = parseProgram("main: x := 0");
  Derivation d = parseProof("(CONS {true} x := 0 {x = 1} (ASSIGN {0 = 0} x := 0 {x = 0}))");
  BruteForceOracle o(Interpretation::zmod(2));
  CheckReport r = checkDerivation(p, o, {}, d);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].condition, "consequence.post");
  EXPECT_TRUE(r.failures[0].counterexample);
}

TEST(Kernel, AssumptionContext) {
  Program p = fixtures::program("example1/add.cbv");
  Triple spec = parseTriple("{sum = z & u = v} add(u) {sum = z + v}");
  Derivation leaf{Rule::Assume, spec, {}, std::nullopt};
  BruteForceOracle o(Interpretation::zmod(2));
  EXPECT_TRUE(checkDerivation(p, o, {spec}, leaf).accepted());
  EXPECT_FALSE(checkDerivation(p, o, {}, leaf).accepted());
  EXPECT_EQ(ruleCount(leaf), 0u);
}

TEST(Proof, RoundTrip) {
  for (const auto& [prog, proof] : kGoldens) {
    Derivation d = fixtures::proof(proof);
    EXPECT_EQ(parseProof(renderProof(d)), d) << proof;
  }
}

TEST(Proof, FileRoundTrip) {
  Derivation d = fixtures::proof("local/local.cbvproof");
  std::string path = testing::TempDir() + "/local.cbvproof";
  writeProofFile(path, d);
  EXPECT_EQ(readProofFile(path), d);
}

TEST(Proof, Malformed) {
  EXPECT_THROW(parseProof("(FOO {true} skip {true})"), ParseError);
  EXPECT_THROW(parseProof("(SKIP {true} skip {true}"), ParseError);
  EXPECT_THROW(parseProof("(SUBST {true} skip {true} map=[x := 1 +])"), ParseError);
}

}  // namespace
}  // namespace cbv
