#include "agentrt/llm/types.hpp"

#include "agentrt/core/error.hpp"

namespace agentrt::llm {

void CompletionRequest::validate() const {
  if (messages.empty()) throw Error(ErrorCategory::InvalidArgument, "completion request has no messages");
  if (temperature < 0.0 || temperature > 2.0)
    throw Error(ErrorCategory::InvalidArgument, "temperature outside [0,2]");
  if (max_output_tokens < 1) throw Error(ErrorCategory::InvalidArgument, "max_output_tokens < 1");
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const auto& r = messages[i].role;
    if (r != "system" && r != "user" && r != "assistant")
      throw Error(ErrorCategory::InvalidArgument, "unknown message role: " + r);
    if (r == "system" && i != 0) throw Error(ErrorCategory::InvalidArgument, "system message must come first");
  }
}

std::string CompletionRequest::prompt_text() const {
  std::string out;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (i) out += '\n';
    out += messages[i].content;
  }
  return out;
}

std::string_view to_string(FinishReason f) {
  switch (f) {
    case FinishReason::Stop: return "stop";
    case FinishReason::Length: return "length";
    case FinishReason::Cancelled: return "cancelled";
    case FinishReason::ContentFilter: return "content_filter";
  }
  return "stop";
}

FinishReason finish_reason_from_string(std::string_view s) {
  if (s == "stop") return FinishReason::Stop;
  if (s == "length") return FinishReason::Length;
  if (s == "cancelled") return FinishReason::Cancelled;
  if (s == "content_filter") return FinishReason::ContentFilter;
  throw Error(ErrorCategory::InvalidArgument, "unknown finish reason: " + std::string(s));
}

nlohmann::json to_json(const ChatMessage& m) { return {{"role", m.role}, {"content", m.content}}; }

nlohmann::json to_json(const CompletionRequest& r) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : r.messages) msgs.push_back(to_json(m));
  nlohmann::json j = {{"model", r.model_id},
                      {"messages", msgs},
                      {"temperature", r.temperature},
                      {"stream", r.stream},
                      {"max_tokens", r.max_output_tokens}};
  if (!r.stop_sequences.empty()) j["stop"] = r.stop_sequences;
  return j;
}

}  // namespace agentrt::llm
