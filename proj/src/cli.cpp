#include "cbv/cli.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "cbv/analysis.hpp"
#include "cbv/errors.hpp"
#include "cbv/kernel.hpp"
#include "cbv/oracle.hpp"
#include "cbv/parser.hpp"
#include "cbv/proof.hpp"
#include "cbv/synth.hpp"

namespace cbv {

namespace {

using nlohmann::json;

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

ParseOptions sourceOptions(const JobSpec& job) { return ParseOptions{job.allowEmptyBlock, false}; }

Program loadProgram(const JobSpec& job) {
  if (job.programPath.empty()) throw Error("no program file given");
  return parseProgram(readFile(job.programPath), sourceOptions(job));
}

json varsJson(const VarSet& vars) { return json(VarList(vars.begin(), vars.end())); }

json stateJson(const State& s, const Interpretation& I) {
  json out = json::object();
  for (std::size_t i = 0; i < s.support().size(); ++i) out[s.support().vars()[i]] = I.constantFor(s.values()[i]);
  return out;
}

json metricsJson(const Metrics& m) {
  return json{{"l", m.l},         {"assignments", m.assignments}, {"blocks", m.blocks},
              {"calls", m.calls}, {"loops", m.loops},             {"m", m.m}};
}

std::string metricsLine(const std::string& what, const Metrics& m) {
  return what + ": l = " + std::to_string(m.l) + ", m = " + std::to_string(m.m) + " (n_a " +
         std::to_string(m.assignments) + ", n_b " + std::to_string(m.blocks) + ", n_p " + std::to_string(m.calls) +
         ", n_w " + std::to_string(m.loops) + ")";
}

/// The goal triple from --goal, --goal-file or --pre/--post over main.
std::optional<Triple> goalOf(const JobSpec& job, const Program& prog) {
  ParseOptions opts = sourceOptions(job);
  opts.allowFresh = true;
  std::optional<Triple> goal;
  if (job.goal) goal = parseTriple(*job.goal, opts);
  if (job.goalPath) goal = parseTriple(readFile(*job.goalPath), opts);
  if (job.pre || job.post) {
    if (goal) throw Error("give either a goal triple or --pre/--post, not both");
    Formula p = job.pre ? parseFormula(*job.pre, opts) : Formula::truth();
    Formula q = job.post ? parseFormula(*job.post, opts) : Formula::truth();
    goal = Triple{p, prog.main(), q};
  }
  if (goal) prog.validateStmt(goal->stmt);
  return goal;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

std::string Report::human() const {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string Report::json() const {
  nlohmann::json out = data;
  out["command"] = command;
  out["exit"] = exitCode;
  return out.dump(2) + "\n";
}

std::string commandName(Command c) {
  switch (c) {
    case Command::Run:
      return "run";
    case Command::Analyze:
      return "analyze";
    case Command::Check:
      return "check";
    case Command::Prove:
      return "prove";
  }
  return "?";
}

State parseState(std::string_view text, const Interpretation& I, const VarSet& support) {
  std::vector<std::pair<std::string, Elem>> bindings;
  VarSet vars = support;
  std::string body;
  for (std::string_view rest = text; !rest.empty();) {
    auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    line = line.substr(0, line.find('#'));
    body += std::string(line) + ",";
  }
  std::stringstream items(body);
  std::string item;
  while (std::getline(items, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("state binding '" + item + "' is not of the form x = c");
    std::string var = trim(item.substr(0, eq));
    std::string val = trim(item.substr(eq + 1));
    if (var.empty() || isFreshName(var)) throw Error("bad variable in state binding '" + item + "'");
    std::optional<Elem> e = I.constant(val);
    for (std::size_t i = 0; !e && i < I.size(); ++i) {
      if (I.elementName(static_cast<Elem>(i)) == val) e = static_cast<Elem>(i);
    }
    if (!e) throw Error("'" + val + "' denotes no element of model " + I.name());
    bindings.emplace_back(var, *e);
    vars.insert(var);
  }
  State s(std::make_shared<const Support>(vars));
  for (const auto& [var, e] : bindings) s.set(var, e);
  return s;
}

std::string traceSidecarPath(const std::string& proofPath) {
  const std::string ext = ".cbvproof";
  std::string stem = proofPath;
  if (stem.size() > ext.size() && stem.compare(stem.size() - ext.size(), ext.size(), ext) == 0) {
    stem.resize(stem.size() - ext.size());
  }
  return stem + ".trace.json";
}

Report cmdRun(const JobSpec& job) {
  Report r;
  r.command = "run";
  Program prog = loadProgram(job);
  Interpretation I = Interpretation::load(job.model);
  std::string text = job.statePath ? readFile(*job.statePath) : std::string();
  for (const auto& b : job.bindings) text += "\n" + b;
  State sigma = parseState(text, I, programVars(prog, prog.main()));
  Semantics sem(prog, I, job.budget);
  Outcome out = sem.run(sigma);
  r.data["model"] = I.name();
  r.data["initial"] = stateJson(sigma, I);
  r.lines.push_back("initial: " + toString(sigma, I));
  if (out) {
    r.lines.push_back("final: " + toString(*out, I));
    r.data["final"] = stateJson(*out, I);
    r.data["diverges"] = false;
  } else {
    r.lines.push_back("diverges");
    r.data["diverges"] = true;
  }
  if (job.fuel) {
    FuelRun fr = runWithFuel(prog, I, prog.main(), sigma, Scope::Dynamic, *job.fuel);
    bool agree = false;
    std::string verdict;
    switch (fr.status) {
      case FuelRun::Status::Terminated:
        agree = out && fr.final == *out;
        verdict = "terminated";
        break;
      case FuelRun::Status::Diverged:
        agree = !out;
        verdict = "diverged";
        break;
      case FuelRun::Status::OutOfFuel:
        agree = !out;
        verdict = "out of fuel";
        break;
    }
    r.lines.push_back("fuel cross-check (" + std::to_string(*job.fuel) + "): " + verdict + ", " +
                      (agree ? "agrees" : "DISAGREES"));
    r.data["fuelCheck"] = {{"fuel", *job.fuel}, {"status", verdict}, {"agrees", agree}};
    if (!agree) r.exitCode = kExitNegative;
  }
  return r;
}

Report cmdAnalyze(const JobSpec& job) {
  Report r;
  r.command = "analyze";
  Program prog = loadProgram(job);
  if (auto clash = findClash(prog)) {
    r.lines.push_back("not clash-free, variable " + clash->variable + ": local in " + clash->local.scope +
                      ", global in " + clash->global.scope);
    r.data["clashFree"] = false;
    r.data["clash"] = {{"variable", clash->variable},
                       {"localScope", clash->local.scope},
                       {"globalScope", clash->global.scope}};
  } else {
    r.lines.push_back("clash-free");
    r.data["clashFree"] = true;
  }
  VarSet mainChange = changeSet(prog, prog.main());
  r.lines.push_back("change(main) = " + toString(mainChange));
  r.data["change"]["main"] = varsJson(mainChange);
  VarSet dchange = declChangeSet(prog);
  r.lines.push_back("change(D) = " + toString(dchange));
  r.data["change"]["D"] = varsJson(dchange);
  for (const auto& d : prog.decls()) {
    VarSet c = changeSet(prog, d.body);
    r.lines.push_back("change(" + d.name + ") = " + toString(c));
    r.data["change"]["procedures"][d.name] = varsJson(c);
  }
  Metrics mm = metrics(prog.main());
  r.lines.push_back(metricsLine("main", mm));
  r.data["metrics"]["main"] = metricsJson(mm);
  for (const auto& d : prog.decls()) {
    Metrics dm = metrics(d.body);
    r.lines.push_back(metricsLine(d.name, dm));
    r.data["metrics"]["procedures"][d.name] = metricsJson(dm);
  }
  std::size_t total = programLength(prog, prog.main());
  r.lines.push_back("l(D | main) = " + std::to_string(total));
  r.data["programLength"] = total;
  if (job.purifyOut) {
    Program pure = purify(prog);
    writeFile(*job.purifyOut, toString(pure) + "\n");
    r.lines.push_back("purified program written to " + *job.purifyOut);
    r.data["purified"] = *job.purifyOut;
  }
  return r;
}

Report cmdCheck(const JobSpec& job) {
  Report r;
  r.command = "check";
  Program prog = loadProgram(job);
  Interpretation I = Interpretation::load(job.model);
  if (!job.proofPath) throw Error("no proof file given");
  Derivation d = readProofFile(*job.proofPath);
  BruteForceOracle oracle(I, job.budget);
  CheckReport cr = checkDerivation(prog, oracle, {}, d);
  std::string text = toString(cr, I);
  text.pop_back();
  std::stringstream lines(text);
  for (std::string l; std::getline(lines, l);) r.lines.push_back(l);
  r.data["accepted"] = cr.accepted();
  r.data["ruleCount"] = cr.ruleCount;
  r.data["obligations"] = cr.obligations;
  json failures = json::array();
  for (const auto& f : cr.failures) {
    json jf{{"path", f.path},
            {"rule", std::string(ruleName(f.rule))},
            {"condition", f.condition},
            {"message", f.message},
            {"offending", varsJson(f.offending)}};
    if (f.counterexample) jf["counterexample"] = stateJson(*f.counterexample, I);
    failures.push_back(jf);
  }
  r.data["failures"] = failures;
  if (!cr.accepted()) r.exitCode = kExitNegative;
  if (auto goal = goalOf(job, prog)) {
    bool match = alphaEquivalent(goal->pre, d.conclusion.pre) && goal->stmt == d.conclusion.stmt &&
                 alphaEquivalent(goal->post, d.conclusion.post);
    r.lines.push_back(std::string("conclusion ") + (match ? "matches" : "does not match") + " the goal " +
                      toString(*goal));
    r.data["goalMatches"] = match;
    if (!match) r.exitCode = kExitNegative;
  }
  return r;
}

Report cmdProve(const JobSpec& job) {
  Report r;
  r.command = "prove";
  Program prog = loadProgram(job);
  Interpretation I = Interpretation::load(job.model);
  auto goal = goalOf(job, prog);
  if (!goal) throw Error("no goal given (use --goal, --goal-file or --pre/--post)");
  std::string proofPath = job.proofPath ? *job.proofPath : job.programPath + ".cbvproof";
  r.data["goal"] = toString(*goal);
  r.lines.push_back("goal: " + toString(*goal));

  Semantics sem(prog, I, job.budget);
  SynthesisTrace trace;
  try {
    trace = synthesize(sem, *goal);
  } catch (const SynthesisError& e) {
    if (e.kind() != SynthesisError::Kind::GoalFalse) throw;
    r.exitCode = kExitNegative;
    r.lines.push_back("the goal does not hold in " + I.name());
    r.data["holds"] = false;
    if (e.counterexample()) {
      r.lines.push_back("counterexample: " + toString(*e.counterexample(), I));
      r.data["counterexample"] = stateJson(*e.counterexample(), I);
    }
    return r;
  }
  r.data["holds"] = true;
  writeProofFile(proofPath, trace.proof);

  Derivation reread = readProofFile(proofPath);
  BruteForceOracle oracle(I, job.budget);
  CheckReport cr = checkDerivation(prog, oracle, {}, reread);
  BoundCheck bound = certifyLinearBound(prog, trace);

  json premises = json::array();
  for (std::size_t i = 0; i < trace.premiseCounts.size(); ++i) {
    std::string name = i == 0 ? "main" : prog.decls()[i - 1].name;
    const Metrics& m = i == 0 ? trace.mainMetrics : trace.bodyMetrics[i - 1];
    premises.push_back({{"statement", name}, {"ruleCount", trace.premiseCounts[i]}, {"l", m.l}, {"m", m.m}});
  }
  json mgcs = json::array();
  for (const auto& g : trace.mgcs) mgcs.push_back({{"procedure", g.procedure}, {"spec", toString(g.spec)}});
  json sidecar{{"proof", proofPath},
               {"model", I.name()},
               {"ruleCount", trace.ruleCount},
               {"mMain", trace.mainMetrics.m},
               {"mBodies", trace.bound - 1 - trace.mainMetrics.m},
               {"bound", trace.bound},
               {"boundHolds", trace.boundHolds && bound.holds},
               {"boundViolations", bound.violations},
               {"programLength", trace.programLength},
               {"obligations", trace.obligations},
               {"premises", premises},
               {"mgcs", mgcs},
               {"kernelAccepted", cr.accepted()}};
  std::string sidecarPath = traceSidecarPath(proofPath);
  writeFile(sidecarPath, sidecar.dump(2) + "\n");

  r.lines.push_back("proof written to " + proofPath + " (trace " + sidecarPath + ")");
  r.lines.push_back("rule applications: " + std::to_string(trace.ruleCount) + " <= bound " +
                    std::to_string(trace.bound) + " = m(main) + sum of m(bodies) + 1");
  r.lines.push_back(std::string("kernel re-check: ") + (cr.accepted() ? "accepted" : "REJECTED"));
  for (const auto& f : cr.failures) r.lines.push_back("  " + f.condition + ": " + f.message);
  r.lines.push_back(std::string("linear bound: ") + (bound.holds && trace.boundHolds ? "certified" : "VIOLATED"));
  for (const auto& v : bound.violations) r.lines.push_back("  " + v);
  r.data["trace"] = sidecar;
  if (!cr.accepted() || !bound.holds || !trace.boundHolds) r.exitCode = kExitNegative;
  return r;
}

Report execute(const JobSpec& job) {
  Stopwatch clock;
  Report r;
  try {
    switch (job.command) {
      case Command::Run:
        r = cmdRun(job);
        break;
      case Command::Analyze:
        r = cmdAnalyze(job);
        break;
      case Command::Check:
        r = cmdCheck(job);
        break;
      case Command::Prove:
        r = cmdProve(job);
        break;
    }
  } catch (const BudgetExceeded& e) {
    r = Report{};
    r.exitCode = kExitBudget;
    r.lines.push_back(std::string("budget exceeded: ") + e.what());
    r.data["error"] = e.what();
  } catch (const SynthesisError& e) {
    r = Report{};
    r.exitCode = kExitNegative;
    r.lines.push_back(std::string("synthesis failed: ") + e.what());
    r.data["error"] = e.what();
  } catch (const Error& e) {
    r = Report{};
    r.exitCode = kExitUsage;
    r.lines.push_back(std::string("error: ") + e.what());
    r.data["error"] = e.what();
  }
  r.command = commandName(job.command);
  r.seconds = clock.seconds();
  return r;
}

}  // namespace cbv
