#pragma once

#include <string>
#include <vector>

#include "agentrt/exec/sandbox.hpp"
#include "agentrt/llm/client.hpp"

namespace agentrt::exec {

inline constexpr const char* kCodeChannel = "executor.code";

// A grounding file offered to generated code, with a short preview the
// model sees in place of the full content.
struct GroundingInput {
  InputFile file;
  std::string preview;
};

struct CodeRun {
  std::string code;
  ExecutionResult result;
};

// The Python program in a reply: its ```python block, else its first fenced
// block, else the whole reply.
std::string extract_code(const std::string& reply);

// One tool-embedded LLM call writes a program for `nl_query` given the
// grounding previews; the program then runs in the sandbox with the
// grounding files under inputs/.
CodeRun build_and_run_code(const std::string& nl_query, const std::vector<GroundingInput>& grounding,
                           const llm::LlmClient& llm, const SandboxLimits& limits, const SandboxOptions& opts = {},
                           const CancelToken& cancel = CancelToken::none());

}  // namespace agentrt::exec
