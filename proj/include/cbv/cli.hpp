#pragma once

// Batch entry points shared by the `cbv` executable and the tests.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbv/model.hpp"
#include "cbv/semantics.hpp"

namespace cbv {

enum class Command { Run, Analyze, Check, Prove };

struct JobSpec {
  Command command = Command::Run;
  std::string programPath;
  /// "zmod:N" or a model-file path.
  std::string model = "zmod:3";
  /// run: file of `x = c` lines.
  std::optional<std::string> statePath;
  /// run: extra `x=c` bindings, applied after the state file.
  std::vector<std::string> bindings;
  /// prove/check: the full triple, or pre and post for the main statement.
  std::optional<std::string> goal;
  std::optional<std::string> goalPath;
  std::optional<std::string> pre;
  std::optional<std::string> post;
  /// check: proof to read; prove: proof to write.
  std::optional<std::string> proofPath;
  std::optional<std::string> purifyOut;
  std::size_t budget = kDefaultStateBudget;
  std::optional<std::size_t> fuel;
  bool allowEmptyBlock = true;
};

enum ExitCode { kExitOk = 0, kExitNegative = 1, kExitUsage = 2, kExitBudget = 3 };

struct Report {
  std::string command;
  int exitCode = kExitOk;
  std::vector<std::string> lines;
  nlohmann::json data = nlohmann::json::object();
  double seconds = 0;

  std::string human() const;
  std::string json() const;
};

Report cmdRun(const JobSpec& job);
Report cmdAnalyze(const JobSpec& job);
Report cmdCheck(const JobSpec& job);
Report cmdProve(const JobSpec& job);

/// Dispatches on job.command and maps errors to exit codes.
Report execute(const JobSpec& job);

std::string commandName(Command c);

/// `x = c` bindings, one per line or separated by `,`; `#` comments.
State parseState(std::string_view text, const Interpretation& I, const VarSet& support);

/// The `.trace.json` sidecar next to a proof file.
std::string traceSidecarPath(const std::string& proofPath);

}  // namespace cbv
