#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "agentrt/core/cancel.hpp"
#include "agentrt/datamodel/artifact.hpp"

namespace agentrt::exec {

enum class NetworkPolicy { Denied, AllowList };

struct SandboxLimits {
  std::chrono::milliseconds wall_clock = std::chrono::seconds(30);
  std::uint64_t memory = 1ull << 30;       // address space, bytes
  std::uint64_t output_cap = 64 * 1024;    // per stream, bytes
  NetworkPolicy network = NetworkPolicy::Denied;
  // Hosts the program may reach under AllowList. Only recorded: the process
  // sandbox cannot filter by host, so AllowList leaves networking open.
  std::vector<std::string> allow_hosts;

  // Throws InvalidArgument unless every limit is positive.
  void validate() const;
};

// A grounding file copied read-only into the workspace's inputs/ directory.
struct InputFile {
  std::string name;
  std::filesystem::path source;
};

enum class ExitKind { Ok, NonZero, Killed };

struct ExitStatus {
  ExitKind kind = ExitKind::Ok;
  int code = 0;                         // NonZero
  ErrorCategory limit = ErrorCategory::Internal;  // Killed: TimeLimit, MemoryLimit or OutputLimit
  bool operator==(const ExitStatus&) const = default;
};

std::string describe(const ExitStatus& s);

struct ExecutionResult {
  std::string stdout_text;
  std::string stderr_text;
  ExitStatus exit;
  std::vector<datamodel::Artifact> produced_artifacts;
  std::chrono::milliseconds elapsed{0};
};

struct SandboxOptions {
  std::string interpreter = "python3";
  // Parent for scoped workspaces; empty means the system temp directory.
  std::filesystem::path work_root;
  // Files at or below this size travel inline with their artifact.
  std::uint64_t inline_cap = 8ull << 20;
  std::chrono::milliseconds kill_grace = std::chrono::milliseconds(200);
};

// Runs `source` with the interpreter in a fresh process group inside a
// scoped temp workspace:
//   <ws>/inputs/   the grounding files, read-only
//   <ws>/outputs/  empty, for results
// The working directory is <ws>. Every regular file that exists after the
// run and did not exist before (outside inputs/) becomes an artifact:
// images -> Image, .csv -> Table (FileRef if unparsable), anything else
// FileRef. The whole process group is killed and the workspace removed
// before returning. Throws Interrupted if cancelled, InterpreterMissing if
// the interpreter cannot be started.
ExecutionResult run_sandboxed(const std::string& source, const SandboxLimits& limits,
                              const std::vector<InputFile>& inputs = {}, const SandboxOptions& opts = {},
                              const CancelToken& cancel = CancelToken::none());

// Fails fast with InterpreterMissing when the interpreter is unusable.
void probe_interpreter(const std::string& interpreter = "python3");

}  // namespace agentrt::exec
