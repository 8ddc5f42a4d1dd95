// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cbv/analysis.hpp"
#include "cbv/cli.hpp"
#include "cbv/kernel.hpp"
#include "cbv/parser.hpp"
#include "cbv/synth.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

namespace {

using namespace cbv;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x, int digits = 3) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

// Traces collected by criteria 3 and 7 and re-examined by criterion 8.
std::vector<std::pair<Program, SynthesisTrace>> traces;

Verdict scopeExamples() {
  auto t0 = Clock::now();
  Verdict o;
  for (const char* model : {"zmod:2", "zmod:3"}) {
    for (auto [file, expected] : {std::pair{"scope/dynamic.cbv", "1"}, std::pair{"scope/renamed.cbv", "0"}}) {
      JobSpec j;
      j.command = Command::Run;
      j.programPath = fixtures::path(file);
      j.model = model;
      Report r = execute(j);
      if (r.exitCode != kExitOk || r.data["final"]["y"] != expected) {
        o.pass = false;
        o.detail += std::string(file) + " on " + model + " gave " + r.human();
      }
    }
  }
  double s = since(t0);
  if (s >= 1.0) o.pass = false;
  o.detail = "y = 1 (dynamic) and y = 0 (renamed) on zmod:2 and zmod:3 in " + fmt(s) + " s" + o.detail;
  return o;
}

Verdict goldenProofs() {
  auto t0 = Clock::now();
  Verdict o;
  BruteForceOracle oracle(Interpretation::zmod(3));
  const char* goldens[][2] = {{"example1/block.cbv", "example1/block.cbvproof"},
                              {"example1/add.cbv", "example1/add.cbvproof"},
                              {"local/local.cbv", "local/local.cbvproof"},
                              {"recursion/twice.cbv", "recursion/twice.cbvproof"},
                              {"hoare/reset.cbv", "hoare/reset.cbvproof"}};
  std::size_t accepted = 0, rejected = 0, total = 0;
  for (const auto& [prog, proof] : goldens) {
    if (checkDerivation(fixtures::program(prog), oracle, {}, fixtures::proof(proof)).accepted()) {
      ++accepted;
    } else {
      o.pass = false;
      o.detail += "; golden " + std::string(proof) + " rejected";
    }
  }
  std::istringstream manifest(fixtures::read("mutations/manifest.txt"));
  for (std::string line; std::getline(manifest, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string name, prog, expected;
    row >> name >> prog >> expected;
    ++total;
    CheckReport r =
        checkDerivation(fixtures::program(prog), oracle, {}, fixtures::proof("mutations/" + name + ".cbvproof"));
    bool named = false;
    for (const auto& f : r.failures) named = named || f.condition == expected;
    if (!r.accepted() && named) {
      ++rejected;
    } else {
      o.pass = false;
      o.detail += "; mutation " + name + " not rejected with " + expected;
    }
  }
  double s = since(t0);
  if (total < 12 || s >= 1.0) o.pass = false;
  o.detail = std::to_string(accepted) + " goldens accepted, " + std::to_string(rejected) + "/" +
             std::to_string(total) + " mutations rejected with the named condition, " + fmt(s) + " s" + o.detail;
  return o;
}

void collectTriples(const Derivation& d, std::vector<Triple>& out) {
  if (d.rule != Rule::Assume) out.push_back(d.conclusion);
  for (const auto& c : d.children) collectTriples(c, out);
}

Derivation* nodeAt(Derivation& d, std::size_t& index) {
  if (index == 0) return &d;
  --index;
  for (auto& c : d.children) {
    if (Derivation* n = nodeAt(c, index)) return n;
  }
  return nullptr;
}

std::size_t nodeCount(const Derivation& d) {
  std::size_t n = 1;
  for (const auto& c : d.children) n += nodeCount(c);
  return n;
}

Verdict soundness() {
  auto t0 = Clock::now();
  Verdict o;
  Interpretation Z3 = Interpretation::zmod(3);
  BruteForceOracle oracle(Z3);
  std::size_t proofs = 0, triples = 0, violations = 0, rejectedProofs = 0, mutants = 0, acceptedMutants = 0,
              mutantViolations = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    gen::Generator g(1000 + seed);
    Program p = g.program();
    Semantics sem(p, Z3);
    Triple goal = g.trueTriple(sem);
    SynthesisTrace t = synthesize(sem, goal);
    Derivation d = parseProof(renderProof(t.proof));
    if (!checkDerivation(p, oracle, {}, d).accepted()) {
      ++rejectedProofs;
      continue;
    }
    ++proofs;
    traces.emplace_back(p, std::move(t));
    std::vector<Triple> all;
    collectTriples(d, all);
    for (const auto& tr : all) {
      ++triples;
      if (!sem.tripleHolds(tr).holds) ++violations;
    }
    Derivation m = d;
    std::size_t index = g.uniform(0, nodeCount(m) - 1);
    Derivation* node = nodeAt(m, index);
    Formula junk = g.assertion({"x", "y", "z"});
    if (g.chance(0.5)) {
      node->conclusion.post = junk;
    } else {
      node->conclusion.pre = junk;
    }
    ++mutants;
    if (checkDerivation(p, oracle, {}, m).accepted()) {
      ++acceptedMutants;
      if (!sem.tripleHolds(m.conclusion).holds) ++mutantViolations;
    }
  }
  double s = since(t0);
  o.pass = rejectedProofs == 0 && violations == 0 && mutantViolations == 0 && s < 300;
  o.detail = std::to_string(proofs) + " synthesised proofs accepted (" + std::to_string(rejectedProofs) +
             " rejected), " + std::to_string(triples) + " derived triples checked, " + std::to_string(violations) +
             " counterexamples; " + std::to_string(acceptedMutants) + "/" + std::to_string(mutants) +
             " random mutants accepted, " + std::to_string(mutantViolations) + " of them false; " + fmt(s) + " s";
  return o;
}

constexpr std::size_t kEnumerationCap = 3 * 3 * 3 * 3 * 3 * 3 * 3 * 3;

Verdict accessAndChange() {
  Interpretation Z3 = Interpretation::zmod(3);
  std::size_t programs = 0, states = 0, violations = 0;
  for (std::uint64_t seed = 0; programs < 200; ++seed) {
    gen::Generator g(2000 + seed);
    Program p = g.program();
    VarSet vars = programVars(p, p.main());
    if (stateCount(Z3, vars.size()) > kEnumerationCap) continue;
    ++programs;
    Semantics sem(p, Z3);
    VarSet changed = changeSet(p, p.main());
    for (const State& s : gen::allStates(vars, 3)) {
      ++states;
      cbv::Outcome out = sem.run(s);
      if (!out) continue;
      for (const auto& v : vars) {
        if (!changed.count(v) && out->get(v) != s.get(v)) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(programs) + " programs, " + std::to_string(states) + " states, " +
                               std::to_string(violations) + " variables changed outside change(D | S)"};
}

Verdict inlining() {
  Interpretation Z3 = Interpretation::zmod(3);
  std::size_t sites = 0, states = 0, violations = 0;
  for (std::uint64_t seed = 0; sites < 100; ++seed) {
    gen::Generator g(3000 + seed);
    Program p = g.program();
    if (p.decls().empty()) continue;
    const ProcDecl& d = p.decls()[g.uniform(0, p.decls().size() - 1)];
    ExprList args;
    for (std::size_t i = 0; i < d.formals.size(); ++i) args.push_back(g.expr({"x", "y", "z"}));
    Stmt call = Stmt::call(d.name, args);
    Stmt generic = Stmt::block(d.formals, args, Stmt::call(d.name, varExprs(d.formals)));
    Stmt inlined = inlineOnce(p, call, 0);
    VarSet vars = programVars(p, call);
    if (stateCount(Z3, vars.size()) > kEnumerationCap) continue;
    ++sites;
    Semantics sem(p, Z3);
    for (const State& s : gen::allStates(vars, 3)) {
      ++states;
      auto a = sem.meaning(call, s);
      if (a != sem.meaning(generic, s) || a != sem.meaning(inlined, s)) ++violations;
    }
  }
  return {violations == 0, std::to_string(sites) + " call sites, " + std::to_string(states) + " states, " +
                               std::to_string(violations) + " disagreements among P(t), its generic block and the "
                               "inlined body"};
}

bool agrees(const cbv::Outcome& denot, const FuelRun& run) {
  if (run.status == FuelRun::Status::Terminated) return denot && *denot == run.final;
  return !denot;
}

Verdict scopeCoincidence() {
  Interpretation Z2 = Interpretation::zmod(2);
  gen::Config cfg;
  cfg.clashFree = true;
  std::size_t programs = 0, states = 0, violations = 0, clashing = 0;
  for (std::uint64_t seed = 0; programs < 200; ++seed) {
    gen::Generator g(4000 + seed, cfg);
    Program p = g.program();
    if (!isClashFree(p)) {
      ++clashing;
      continue;
    }
    ++programs;
    Semantics sem(p, Z2);
    VarSet vars = programVars(p, p.main());
    for (const State& s : gen::allStates(vars, 2)) {
      ++states;
      if (!agrees(sem.run(s), runWithFuel(p, Z2, p.main(), s, Scope::Static, 256))) ++violations;
    }
  }
  Program scope = fixtures::program("scope/dynamic.cbv");
  State s0(std::make_shared<const Support>(VarSet{"x", "y"}));
  Semantics sem(scope, Z2);
  auto dyn = sem.run(s0);
  FuelRun stat = runWithFuel(scope, Z2, scope.main(), s0, Scope::Static, 16);
  bool differs = dyn && stat.status == FuelRun::Status::Terminated && dyn->get("y") == 1 && stat.final.get("y") == 0;
  return {violations == 0 && differs,
          std::to_string(programs) + " clash-free programs, " + std::to_string(states) + " states, " +
              std::to_string(violations) + " dynamic/static disagreements; the clashing scope example gives y = " +
              (dyn ? std::to_string(dyn->get("y")) : "?") + " dynamically and y = " +
              std::to_string(stat.final.get("y")) + " statically"};
}

Verdict completeness() {
  std::size_t goals = 0, failures = 0;
  std::string first;
  for (std::size_t n : {2, 3}) {
    Interpretation I = Interpretation::zmod(n);
    BruteForceOracle oracle(I);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      gen::Generator g(5000 + 100 * n + seed);
      Program p = g.program();
      Semantics sem(p, I);
      Triple goal = g.trueTriple(sem);
      if (!sem.tripleHolds(goal).holds) continue;
      ++goals;
      try {
        SynthesisTrace t = synthesize(sem, goal);
        if (!checkDerivation(p, oracle, {}, parseProof(renderProof(t.proof))).accepted()) {
          ++failures;
          if (first.empty()) first = toString(goal);
        }
        traces.emplace_back(p, std::move(t));
      } catch (const Error& e) {
        ++failures;
        if (first.empty()) first = toString(goal) + ": " + e.what();
      }
    }
  }
  return {failures == 0 && goals == 200, std::to_string(goals) + " true triples on zmod:2 and zmod:3, " +
                                             std::to_string(failures) + " synthesis or kernel failures" +
                                             (first.empty() ? "" : "; first: " + first)};
}

// ||y - ŷ|| / ||y|| for the least-squares line through (x, y).
double linearResidual(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double a = (sy - b * sx) / n;
  double err = 0, norm = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (a + b * x[i]);
    err += r * r;
    norm += y[i] * y[i];
  }
  return std::sqrt(err / norm);
}

Verdict lengthBound() {
  std::size_t violations = 0;
  for (const auto& [p, t] : traces) {
    if (!t.boundHolds || !certifyLinearBound(p, t).holds) ++violations;
  }
  Interpretation Z2 = Interpretation::zmod(2);
  // T_k for the impure family and its purified counterpart.
  auto family = [&](const std::string& file, std::vector<double>& lengths, std::vector<double>& counts,
                    std::vector<double>& quadratic, std::string& series) {
    Program base = fixtures::program(file);
    Stmt s = base.main();
    for (std::size_t k = 1; k <= 8; ++k) {
      if (k > 1) s = Stmt::seq(s, base.main());
      Program p = base.withMain(s);
      Semantics sem(p, Z2);
      SynthesisTrace t = synthesize(sem, Triple{Formula::truth(), s, Formula::truth()});
      if (!t.boundHolds || !certifyLinearBound(p, t).holds) ++violations;
      lengths.push_back(static_cast<double>(t.programLength));
      counts.push_back(static_cast<double>(t.ruleCount));
      quadratic.push_back(static_cast<double>((k + 1) * t.mainMetrics.m));
      series += (k > 1 ? "," : "") + std::to_string(t.ruleCount);
    }
  };
  std::vector<double> lengths, counts, quadratic, pureLengths, pureCounts, pureQuadratic;
  std::string series, pureSeries;
  family("length/family.cbv", lengths, counts, quadratic, series);
  family("length/family_pure.cbv", pureLengths, pureCounts, pureQuadratic, pureSeries);
  double residual = linearResidual(lengths, counts);
  double pureResidual = linearResidual(pureLengths, pureCounts);
  double comparison = linearResidual(lengths, quadratic);
  return {violations == 0 && residual < 0.05 && pureResidual < 0.05,
          std::to_string(traces.size() + 16) + " traces within m(T) + sum m(S_i) + 1 and m < 13 l (" +
              std::to_string(violations) + " violations); T_1..T_8 rule counts " + series +
              ", linear-fit residual " + fmt(residual) + "; purified family " + pureSeries + ", residual " +
              fmt(pureResidual) + "; the per-call-premise series (k+1) m(T_k) has residual " + fmt(comparison)};
}

Verdict metricsAndSp() {
  Verdict o;
  std::size_t rows = 0, mismatches = 0;
  std::istringstream in(fixtures::read("metrics.golden"));
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string file, stmt;
    std::size_t l, na, nb, np, nw, m;
    row >> file >> stmt >> l >> na >> nb >> np >> nw >> m;
    Program p = fixtures::program(file);
    Metrics got = metrics(stmt == "main" ? p.main() : p.decl(stmt).body);
    ++rows;
    if (got.l != l || got.assignments != na || got.blocks != nb || got.calls != np || got.loops != nw || got.m != m) {
      ++mismatches;
    }
  }
  Interpretation Z3 = Interpretation::zmod(3);
  std::size_t pairs = 0, spMismatches = 0;
  for (std::uint64_t seed = 0; pairs < 100; ++seed) {
    gen::Generator g(6000 + seed);
    Program p = g.program();
    Semantics sem(p, Z3);
    Formula pre = g.assertion({"x", "y", "z"});
    StateSet set = sem.strongestPost(pre, p.main());
    Formula sp = sem.spFormula(pre, p.main());
    ++pairs;
    for (const State& s : gen::allStates(VarSet(set.support().vars().begin(), set.support().vars().end()), 3)) {
      if (holds(Z3, s, sp) != set.contains(s.values())) {
        ++spMismatches;
        break;
      }
    }
  }
  return {mismatches == 0 && rows > 0 && spMismatches == 0,
          std::to_string(rows) + " golden metric rows, " + std::to_string(mismatches) + " mismatches; " +
              std::to_string(pairs) + " (p, S) pairs, " + std::to_string(spMismatches) +
              " where SP and sp differ"};
}

}  // namespace

int main() {
  std::vector<std::function<Verdict()>> criteria{scopeExamples, goldenProofs,      soundness,
                                                 accessAndChange, inlining,        scopeCoincidence,
                                                 completeness,  lengthBound,       metricsAndSp};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
