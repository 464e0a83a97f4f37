#include "agentrt/exec/code.hpp"

#include "agentrt/core/text.hpp"

namespace agentrt::exec {

namespace {

constexpr const char* kSystem =
    "You write one self-contained Python 3 program that fulfils the user's request.\n"
    "Input files are in the inputs/ directory and are read-only. Save any file you create under outputs/.\n"
    "Print the results the user needs to stdout. The program has no network access.\n"
    "Reply with the program in a single ```python fenced block.";

}  // namespace

std::string extract_code(const std::string& reply) {
  if (auto block = text::fenced_block(reply, "python")) return *block;
  return std::string(text::trim(reply));
}

CodeRun build_and_run_code(const std::string& nl_query, const std::vector<GroundingInput>& grounding,
                           const llm::LlmClient& llm, const SandboxLimits& limits, const SandboxOptions& opts,
                           const CancelToken& cancel) {
  std::string user = "Request: " + nl_query + "\n";
  std::vector<InputFile> files;
  if (grounding.empty()) user += "\nNo input files.";
  for (const auto& g : grounding) {
    user += "\nFile inputs/" + g.file.name + ":\n" + g.preview + "\n";
    files.push_back(g.file);
  }
  const auto reply = llm.complete({{"system", kSystem}, {"user", user}}, kCodeChannel, cancel);
  if (reply.finish == llm::FinishReason::Cancelled) throw Error(ErrorCategory::Interrupted, "cancelled");
  CodeRun run;
  run.code = extract_code(reply.text);
  if (run.code.empty()) throw Error(ErrorCategory::LlmFormatError, "reply contains no program");
  run.result = run_sandboxed(run.code, limits, files, opts, cancel);
  return run;
}

}  // namespace agentrt::exec
