#include <iostream>

#include <CLI11.hpp>

#include "cbv/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cbv: run, analyse, check and prove programs with call-by-value procedures"};
  app.require_subcommand(1);
  app.fallthrough();

  cbv::JobSpec job;
  bool asJson = false;
  bool timing = false;
  app.add_flag("--json", asJson, "Print the machine-readable report");
  app.add_flag("--timing", timing, "Print the elapsed time");

  auto common = [&](CLI::App* sub, bool needsModel) {
    sub->add_option("program", job.programPath, "Program file (.cbv)")->required()->check(CLI::ExistingFile);
    if (needsModel) {
      sub->add_option("--model", job.model, "zmod:N or a model file")->capture_default_str();
      sub->add_option("--budget-states", job.budget, "Largest state space to enumerate")
          ->capture_default_str()
          ->check(CLI::PositiveNumber);
    }
    sub->add_option("--allow-empty-block", job.allowEmptyBlock, "Accept `begin local skip ; S end` in source")
        ->capture_default_str();
  };
  auto goalOptions = [&](CLI::App* sub) {
    sub->add_option("--goal", job.goal, "Triple {p} S {q}");
    sub->add_option("--goal-file", job.goalPath, "File holding the triple")->check(CLI::ExistingFile);
    sub->add_option("--pre", job.pre, "Precondition for the main statement");
    sub->add_option("--post", job.post, "Postcondition for the main statement");
  };

  auto* run = app.add_subcommand("run", "Execute the main statement");
  common(run, true);
  run->add_option("--state", job.statePath, "Initial state file of `x = c` lines")->check(CLI::ExistingFile);
  run->add_option("--set", job.bindings, "Initial binding x=c (repeatable)");
  run->add_option("--fuel", job.fuel, "Cross-check with the fuel-bounded evaluator")->check(CLI::PositiveNumber);

  auto* analyze = app.add_subcommand("analyze", "Clash-freeness, change sets and length metrics");
  common(analyze, false);
  analyze->add_option("--purify", job.purifyOut, "Write the purified program here");

  auto* check = app.add_subcommand("check", "Check a derivation with the kernel");
  common(check, true);
  check->add_option("proof", job.proofPath, "Proof file (.cbvproof)")->required()->check(CLI::ExistingFile);
  goalOptions(check);

  auto* prove = app.add_subcommand("prove", "Synthesise, write and re-check a derivation");
  common(prove, true);
  prove->add_option("-o,--output", job.proofPath, "Proof file to write (default: PROGRAM.cbvproof)");
  goalOptions(prove);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cbv::kExitUsage;
  }
  if (run->parsed()) job.command = cbv::Command::Run;
  if (analyze->parsed()) job.command = cbv::Command::Analyze;
  if (check->parsed()) job.command = cbv::Command::Check;
  if (prove->parsed()) job.command = cbv::Command::Prove;

  cbv::Report report = cbv::execute(job);
  std::ostream& out = report.exitCode == cbv::kExitUsage ? std::cerr : std::cout;
  out << (asJson ? report.json() : report.human());
  if (timing) std::cerr << "time: " << report.seconds << " s\n";
  return report.exitCode;
}
