#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "agentrt/parse/role_event.hpp"

namespace agentrt::parse {

// Coarse automaton state, as observed from outside the parser.
enum class StateId { PlainText, FencePending, InJsonBlock, InThought, InActionTag, TagPending, Done };

std::string_view to_string(StateId state);

// Incremental role parser over a streamed completion.
//
// Input is consumed one byte at a time; every byte causes exactly one
// transition of a pushdown automaton whose stack records open constructs
// (code fence, JSON nesting, open tag). Events are emitted as soon as a
// byte's role is known, so the event sequence is independent of how the
// stream was chunked, up to the splitting of adjacent deltas (see
// coalesce()). Malformed constructs degrade to a ParseWarning followed by
// the raw text; no input byte is dropped except layout whitespace between
// WebotTags constructs.
class StreamParser {
 public:
  // Longest lookahead held before a construct is confirmed or rejected.
  static constexpr std::size_t kMaxPending = 256;
  static constexpr std::size_t kMaxActionName = 128;
  static constexpr std::size_t kMaxWebAction = 1024;
  static constexpr std::size_t kMaxStackDepth = 8;
  // Upper bound on buffer_size() for any input.
  static constexpr std::size_t kBufferBound = kMaxWebAction + 16;

  explicit StreamParser(Grammar grammar);

  // Precondition: !done(). Returns the events completed by `chunk`.
  std::vector<RoleEvent> feed(std::string_view chunk);
  // Flushes buffered input and moves to Done.
  std::vector<RoleEvent> finish();

  Grammar grammar() const { return grammar_; }
  StateId state() const;
  bool done() const { return done_; }
  std::size_t buffer_size() const;
  std::size_t stack_depth() const { return stack_.size(); }
  std::size_t position() const { return pos_; }

 private:
  enum class Chat { Text, Ticks, FenceInfo, OtherFence, Block, AfterAction };
  enum class Json {
    OpenBrace, KeyQuote, Key, Colon, NameQuote, Name, NameEscape, NameUnicode, Comma, InputKeyQuote, InputKey,
    InputColon, InputValue, InputString, InputEscape, InputUnicode, InputRaw, InputScalar, ObjectClose,
    FenceClose,
  };
  enum class Web { Layout, Text, TagOpen, Thought, ThoughtClose, Action, ActionClose };
  enum class Frame : char { Fence, Object, Array, Tag };

  void step(char c);
  void step_chat(char c);
  void step_block(char c);
  void step_web(char c);

  void emit_text(std::string_view s);
  void emit_thought(std::string_view s);
  void emit_input(std::string_view s);
  void emit(RoleEvent e);
  void warn(WarningCategory category, std::size_t begin, std::size_t end);

  void enter_other_fence();
  void degrade_block(WarningCategory category);
  void malformed_block();
  void end_action(bool well_formed);
  void flush_unicode_escape();
  void complete_web_action();

  Grammar grammar_;
  bool done_ = false;
  std::size_t pos_ = 0;
  std::vector<RoleEvent> out_;
  std::vector<Frame> stack_;

  // Lookahead for fences and tags.
  std::string pending_;
  std::size_t construct_start_ = 0;

  // ChatActions
  Chat chat_ = Chat::Text;
  Json json_ = Json::OpenBrace;
  bool committed_ = false;
  bool action_seen_ = false;
  bool name_emitted_ = false;
  int fence_ticks_ = 0;
  std::string block_raw_;
  std::string key_;
  std::string name_;
  std::string input_;
  std::string escape_;
  char32_t high_surrogate_ = 0;
  bool raw_in_string_ = false;
  bool raw_escape_ = false;

  // WebotTags
  Web web_ = Web::Layout;
  std::string action_raw_;
  char action_quote_ = 0;
  bool action_escape_ = false;
};

// Single-chunk convenience: feed(all) + finish().
std::vector<RoleEvent> parse_all(Grammar grammar, std::string_view input);

// Splits `raw_args` of a web action on top-level commas, honoring quotes and
// nested parentheses. Arguments are trimmed; quotes are kept.
std::vector<std::string> split_action_args(std::string_view raw_args);

}  // namespace agentrt::parse
