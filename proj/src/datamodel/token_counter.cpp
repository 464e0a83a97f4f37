#include "agentrt/datamodel/token_counter.hpp"

#include <algorithm>
#include <cmath>

#include "agentrt/core/error.hpp"

namespace agentrt::datamodel {

TokenCounter TokenCounter::approximate(double chars_per_token) {
  if (!(chars_per_token > 0)) throw Error(ErrorCategory::InvalidArgument, "chars_per_token must be positive");
  TokenCounter c;
  c.chars_per_token_ = chars_per_token;
  return c;
}

TokenCounter TokenCounter::pluggable(std::string tokenizer_id, Tokenizer tokenizer) {
  if (!tokenizer) throw Error(ErrorCategory::InvalidArgument, "tokenizer must be callable");
  TokenCounter c;
  c.tokenizer_id_ = std::move(tokenizer_id);
  c.tokenizer_ = std::move(tokenizer);
  return c;
}

std::size_t TokenCounter::count(std::string_view s) const {
  if (s.empty()) return 0;
  if (tokenizer_) return std::max<std::size_t>(1, tokenizer_(s));
  return static_cast<std::size_t>(std::ceil(static_cast<double>(s.size()) / chars_per_token_));
}

}  // namespace agentrt::datamodel
