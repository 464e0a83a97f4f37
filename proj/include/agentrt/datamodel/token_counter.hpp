#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace agentrt::datamodel {

// Counts tokens either approximately (ceil(bytes / chars_per_token)) or via
// an externally supplied tokenizer. count("") == 0 and count(s) >= 1 for any
// non-empty s.
class TokenCounter {
 public:
  using Tokenizer = std::function<std::size_t(std::string_view)>;

  static TokenCounter approximate(double chars_per_token = 4.0);
  static TokenCounter pluggable(std::string tokenizer_id, Tokenizer tokenizer);

  std::size_t count(std::string_view s) const;

  bool is_approximate() const { return !tokenizer_; }
  double chars_per_token() const { return chars_per_token_; }
  const std::string& tokenizer_id() const { return tokenizer_id_; }

 private:
  double chars_per_token_ = 4.0;
  std::string tokenizer_id_;
  Tokenizer tokenizer_;
};

}  // namespace agentrt::datamodel
