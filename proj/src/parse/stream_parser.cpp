#include "agentrt/parse/stream_parser.hpp"

#include <cctype>
#include <utility>

#include "agentrt/core/error.hpp"
#include "agentrt/core/text.hpp"

namespace agentrt::parse {
namespace {

constexpr std::string_view kJsonInfo = "json";
constexpr std::string_view kThoughtOpen = "<Thought>";
constexpr std::string_view kThoughtClose = "</Thought>";
constexpr std::string_view kActionOpen = "<Action>";
constexpr std::string_view kActionClose = "</Action>";

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Decoded form of a one-character JSON escape, or 0 if invalid.
char simple_escape(char c) {
  switch (c) {
    case '"': return '"';
    case '\\': return '\\';
    case '/': return '/';
    case 'b': return '\b';
    case 'f': return '\f';
    case 'n': return '\n';
    case 'r': return '\r';
    case 't': return '\t';
    default: return 0;
  }
}

bool is_prefix_of(std::string_view s, std::string_view full) {
  return s.size() <= full.size() && full.substr(0, s.size()) == s;
}

}  // namespace

std::string_view to_string(StateId state) {
  switch (state) {
    case StateId::PlainText: return "plain_text";
    case StateId::FencePending: return "fence_pending";
    case StateId::InJsonBlock: return "in_json_block";
    case StateId::InThought: return "in_thought";
    case StateId::InActionTag: return "in_action_tag";
    case StateId::TagPending: return "tag_pending";
    case StateId::Done: return "done";
  }
  return "plain_text";
}

StreamParser::StreamParser(Grammar grammar) : grammar_(grammar) {}

StateId StreamParser::state() const {
  if (done_) return StateId::Done;
  if (grammar_ == Grammar::ChatActions) {
    switch (chat_) {
      case Chat::Ticks:
      case Chat::FenceInfo: return StateId::FencePending;
      case Chat::Block: return StateId::InJsonBlock;
      default: return StateId::PlainText;
    }
  }
  switch (web_) {
    case Web::TagOpen:
    case Web::ThoughtClose:
    case Web::ActionClose: return StateId::TagPending;
    case Web::Thought: return StateId::InThought;
    case Web::Action: return StateId::InActionTag;
    default: return StateId::PlainText;
  }
}

std::size_t StreamParser::buffer_size() const {
  std::size_t n = pending_.size() + escape_.size();
  if (grammar_ == Grammar::ChatActions) {
    if (chat_ == Chat::Block && !committed_) n += block_raw_.size();
    n += key_.size();
    if (!name_emitted_) n += name_.size();
  } else {
    n += action_raw_.size();
  }
  return n;
}

std::vector<RoleEvent> StreamParser::feed(std::string_view chunk) {
  if (done_) throw Error(ErrorCategory::InvalidArgument, "feed() after finish()");
  out_.clear();
  for (char c : chunk) {
    step(c);
    ++pos_;
  }
  return std::exchange(out_, {});
}

void StreamParser::step(char c) {
  if (grammar_ == Grammar::ChatActions)
    step_chat(c);
  else
    step_web(c);
}

// ---------------------------------------------------------------------------
// Emission

void StreamParser::emit(RoleEvent e) { out_.push_back(std::move(e)); }

void StreamParser::emit_text(std::string_view s) {
  if (!out_.empty())
    if (auto* t = std::get_if<TextDelta>(&out_.back())) {
      t->text += s;
      return;
    }
  out_.emplace_back(TextDelta{std::string(s)});
}

void StreamParser::emit_thought(std::string_view s) {
  if (!out_.empty())
    if (auto* t = std::get_if<ThoughtDelta>(&out_.back())) {
      t->text += s;
      return;
    }
  out_.emplace_back(ThoughtDelta{std::string(s)});
}

void StreamParser::emit_input(std::string_view s) {
  input_ += s;
  if (!out_.empty())
    if (auto* t = std::get_if<ActionInputDelta>(&out_.back())) {
      t->text += s;
      return;
    }
  out_.emplace_back(ActionInputDelta{std::string(s)});
}

void StreamParser::warn(WarningCategory category, std::size_t begin, std::size_t end) {
  emit(ParseWarning{category, Span{begin, end}});
}

// ---------------------------------------------------------------------------
// ChatActions grammar

void StreamParser::enter_other_fence() {
  chat_ = Chat::OtherFence;
  fence_ticks_ = 0;
  if (stack_.empty()) stack_.push_back(Frame::Fence);
}

void StreamParser::step_chat(char c) {
  switch (chat_) {
    case Chat::AfterAction:
      if (is_ws(c)) {
        emit_text(std::string_view(&c, 1));
        return;
      }
      warn(WarningCategory::TrailingAfterAction, pos_, pos_ + 1);
      chat_ = Chat::Text;
      step_chat(c);
      return;

    case Chat::Text:
      if (c == '`') {
        pending_ = "`";
        construct_start_ = pos_;
        chat_ = Chat::Ticks;
        return;
      }
      emit_text(std::string_view(&c, 1));
      return;

    case Chat::Ticks:
      if (c == '`') {
        pending_ += c;
        if (pending_.size() == 3) chat_ = Chat::FenceInfo;
        return;
      }
      emit_text(pending_);
      pending_.clear();
      chat_ = Chat::Text;
      step_chat(c);
      return;

    case Chat::FenceInfo: {
      const auto info = std::string_view(pending_).substr(3);
      if (info.size() < kJsonInfo.size()) {
        if (!action_seen_ && c == kJsonInfo[info.size()]) {
          pending_ += c;
          return;
        }
        emit_text(pending_);
        pending_.clear();
        enter_other_fence();
        step_chat(c);
        return;
      }
      if (is_ws(c) || c == '{') {
        block_raw_ = std::exchange(pending_, {});
        chat_ = Chat::Block;
        json_ = Json::OpenBrace;
        committed_ = false;
        name_emitted_ = false;
        key_.clear();
        name_.clear();
        input_.clear();
        escape_.clear();
        stack_.assign(1, Frame::Fence);
        step_block(c);
        return;
      }
      emit_text(pending_);
      pending_.clear();
      enter_other_fence();
      step_chat(c);
      return;
    }

    case Chat::OtherFence:
      emit_text(std::string_view(&c, 1));
      if (c == '`') {
        if (++fence_ticks_ == 3) {
          chat_ = Chat::Text;
          fence_ticks_ = 0;
          stack_.clear();
        }
      } else {
        fence_ticks_ = 0;
      }
      return;

    case Chat::Block:
      step_block(c);
      return;
  }
}

// Pre-commit failure: the block was never an action. Re-emit what was held
// back as text and continue inside an ordinary code fence.
void StreamParser::degrade_block(WarningCategory category) {
  warn(category, construct_start_, pos_);
  emit_text(block_raw_);
  block_raw_.clear();
  key_.clear();
  stack_.clear();
  enter_other_fence();
}

// Post-commit failure: close the action as not well-formed and continue
// inside an ordinary code fence.
void StreamParser::malformed_block() {
  warn(WarningCategory::Malformed, construct_start_, pos_ + 1);
  end_action(false);
  enter_other_fence();
}

void StreamParser::end_action(bool well_formed) {
  if (!name_emitted_) {
    emit(ActionName{name_});
    name_emitted_ = true;
  }
  emit(ActionEnd{name_, input_, block_raw_, well_formed});
  block_raw_.clear();
  key_.clear();
  escape_.clear();
  stack_.clear();
  committed_ = false;
  action_seen_ = true;
}

void StreamParser::flush_unicode_escape() {
  char32_t cp = static_cast<char32_t>(std::stoul(escape_, nullptr, 16));
  escape_.clear();
  if (cp >= 0xD800 && cp <= 0xDBFF) {
    high_surrogate_ = cp;
    return;
  }
  if (cp >= 0xDC00 && cp <= 0xDFFF && high_surrogate_) {
    cp = 0x10000 + ((high_surrogate_ - 0xD800) << 10) + (cp - 0xDC00);
  } else if (high_surrogate_ || (cp >= 0xDC00 && cp <= 0xDFFF)) {
    cp = 0xFFFD;
  }
  high_surrogate_ = 0;
  std::string utf8;
  append_utf8(utf8, cp);
  if (json_ == Json::NameUnicode)
    name_ += utf8;
  else
    emit_input(utf8);
}

void StreamParser::step_block(char c) {
  auto fail = [&] {
    if (committed_)
      malformed_block();
    else
      degrade_block(WarningCategory::Malformed);
    step_chat(c);
  };
  const bool ws = is_ws(c);

  switch (json_) {
    case Json::OpenBrace:
      if (ws) break;
      if (c != '{') return fail();
      stack_.push_back(Frame::Object);
      json_ = Json::KeyQuote;
      break;
    case Json::KeyQuote:
      if (ws) break;
      if (c != '"') return fail();
      key_.clear();
      json_ = Json::Key;
      break;
    case Json::Key:
      if (c == '"') {
        if (key_ != "action") return fail();
        key_.clear();
        json_ = Json::Colon;
        break;
      }
      if (c == '\\' || key_.size() >= 16) return fail();
      key_ += c;
      break;
    case Json::Colon:
      if (ws) break;
      if (c != ':') return fail();
      json_ = Json::NameQuote;
      break;
    case Json::NameQuote:
      if (ws) break;
      if (c != '"') return fail();
      committed_ = true;
      emit(ActionStart{});
      json_ = Json::Name;
      break;
    case Json::Name:
      if (c == '"') {
        emit(ActionName{name_});
        name_emitted_ = true;
        json_ = Json::Comma;
        break;
      }
      if (c == '\\') {
        json_ = Json::NameEscape;
        break;
      }
      if (static_cast<unsigned char>(c) < 0x20 || name_.size() >= kMaxActionName) return fail();
      name_ += c;
      break;
    case Json::NameEscape:
      if (c == 'u') {
        escape_.clear();
        json_ = Json::NameUnicode;
        break;
      }
      if (char d = simple_escape(c)) {
        name_ += d;
        json_ = Json::Name;
        break;
      }
      return fail();
    case Json::NameUnicode:
      if (!std::isxdigit(static_cast<unsigned char>(c))) return fail();
      escape_ += c;
      if (escape_.size() == 4) {
        flush_unicode_escape();
        json_ = Json::Name;
      }
      break;
    case Json::Comma:
      if (ws) break;
      if (c == ',') {
        json_ = Json::InputKeyQuote;
        break;
      }
      return fail();
    case Json::InputKeyQuote:
      if (ws) break;
      if (c != '"') return fail();
      key_.clear();
      json_ = Json::InputKey;
      break;
    case Json::InputKey:
      if (c == '"') {
        if (key_ != "action_input") return fail();
        key_.clear();
        json_ = Json::InputColon;
        break;
      }
      if (c == '\\' || key_.size() >= 16) return fail();
      key_ += c;
      break;
    case Json::InputColon:
      if (ws) break;
      if (c != ':') return fail();
      json_ = Json::InputValue;
      break;
    case Json::InputValue:
      if (ws) break;
      if (c == '"') {
        json_ = Json::InputString;
        break;
      }
      if (c == '{' || c == '[') {
        stack_.push_back(c == '{' ? Frame::Object : Frame::Array);
        raw_in_string_ = false;
        raw_escape_ = false;
        emit_input(std::string_view(&c, 1));
        json_ = Json::InputRaw;
        break;
      }
      if (c == '-' || std::isdigit(static_cast<unsigned char>(c)) || c == 't' || c == 'f' || c == 'n') {
        emit_input(std::string_view(&c, 1));
        json_ = Json::InputScalar;
        break;
      }
      return fail();
    case Json::InputString:
      if (c == '"') {
        json_ = Json::ObjectClose;
        break;
      }
      if (c == '\\') {
        json_ = Json::InputEscape;
        break;
      }
      emit_input(std::string_view(&c, 1));
      break;
    case Json::InputEscape:
      if (c == 'u') {
        escape_.clear();
        json_ = Json::InputUnicode;
        break;
      }
      if (char d = simple_escape(c)) {
        emit_input(std::string_view(&d, 1));
        json_ = Json::InputString;
        break;
      }
      return fail();
    case Json::InputUnicode:
      if (!std::isxdigit(static_cast<unsigned char>(c))) return fail();
      escape_ += c;
      if (escape_.size() == 4) {
        flush_unicode_escape();
        json_ = Json::InputString;
      }
      break;
    case Json::InputRaw:
      if (raw_in_string_) {
        if (raw_escape_)
          raw_escape_ = false;
        else if (c == '\\')
          raw_escape_ = true;
        else if (c == '"')
          raw_in_string_ = false;
      } else if (c == '"') {
        raw_in_string_ = true;
      } else if (c == '{' || c == '[') {
        if (stack_.size() >= kMaxStackDepth) return fail();
        stack_.push_back(c == '{' ? Frame::Object : Frame::Array);
      } else if (c == '}' || c == ']') {
        const Frame want = c == '}' ? Frame::Object : Frame::Array;
        if (stack_.back() != want) return fail();
        stack_.pop_back();
      }
      emit_input(std::string_view(&c, 1));
      if (stack_.size() == 2) json_ = Json::ObjectClose;  // Fence + outer object remain
      break;
    case Json::InputScalar:
      if (ws || c == ',' || c == '}') {
        json_ = Json::ObjectClose;
        step_block(c);
        return;
      }
      if (c == '`') return fail();
      emit_input(std::string_view(&c, 1));
      break;
    case Json::ObjectClose:
      if (ws) break;
      if (c != '}') return fail();
      stack_.pop_back();
      json_ = Json::FenceClose;
      fence_ticks_ = 0;
      break;
    case Json::FenceClose:
      if (c == '`') {
        block_raw_ += c;
        if (++fence_ticks_ == 3) {
          fence_ticks_ = 0;
          end_action(true);
          chat_ = Chat::AfterAction;
        }
        return;
      }
      if (ws && fence_ticks_ == 0) break;
      return fail();
  }
  block_raw_ += c;
  if (!committed_ && block_raw_.size() > kMaxPending) {
    degrade_block(WarningCategory::Overflow);
  }
}

// ---------------------------------------------------------------------------
// WebotTags grammar

void StreamParser::complete_web_action() {
  const std::string_view interior = text::trim(action_raw_);
  std::size_t i = 0;
  bool ok = !interior.empty() && is_ident_start(interior[0]);
  while (ok && i < interior.size() && is_ident(interior[i])) ++i;
  std::string name(interior.substr(0, i));
  std::string_view rest = text::trim(interior.substr(i));
  std::string raw_args;
  if (ok && !rest.empty()) {
    // Must be exactly one balanced, quote-aware parenthesized group.
    if (rest.front() != '(' || rest.back() != ')') {
      ok = false;
    } else {
      int depth = 0;
      char quote = 0;
      bool esc = false;
      for (std::size_t k = 0; k < rest.size() && ok; ++k) {
        const char ch = rest[k];
        if (quote) {
          if (esc) esc = false;
          else if (ch == '\\') esc = true;
          else if (ch == quote) quote = 0;
          continue;
        }
        if (ch == '"' || ch == '\'') quote = ch;
        else if (ch == '(') ++depth;
        else if (ch == ')') {
          if (--depth == 0 && k + 1 != rest.size()) ok = false;
        }
      }
      ok = ok && depth == 0 && !quote;
      if (ok) raw_args = std::string(rest.substr(1, rest.size() - 2));
    }
  }
  if (ok) {
    emit(WebActionCall{std::move(name), raw_args, split_action_args(raw_args), action_raw_});
  } else {
    warn(WarningCategory::Malformed, construct_start_, pos_ + 1);
    emit_text(std::string(kActionOpen) + action_raw_ + std::string(kActionClose));
  }
  action_raw_.clear();
  stack_.clear();
  web_ = Web::Layout;
}

void StreamParser::step_web(char c) {
  switch (web_) {
    case Web::Layout:
      if (is_ws(c)) return;
      web_ = Web::Text;
      [[fallthrough]];
    case Web::Text:
      if (c == '<') {
        pending_ = "<";
        construct_start_ = pos_;
        web_ = Web::TagOpen;
        return;
      }
      emit_text(std::string_view(&c, 1));
      return;

    case Web::TagOpen:
      pending_ += c;
      if (pending_ == kThoughtOpen) {
        pending_.clear();
        stack_.assign(1, Frame::Tag);
        emit_thought("");
        web_ = Web::Thought;
        return;
      }
      if (pending_ == kActionOpen) {
        pending_.clear();
        stack_.assign(1, Frame::Tag);
        action_raw_.clear();
        action_quote_ = 0;
        action_escape_ = false;
        web_ = Web::Action;
        return;
      }
      if (is_prefix_of(pending_, kThoughtOpen) || is_prefix_of(pending_, kActionOpen)) return;
      pending_.pop_back();
      emit_text(pending_);
      pending_.clear();
      web_ = Web::Text;
      step_web(c);
      return;

    case Web::Thought:
      if (c == '<') {
        pending_ = "<";
        web_ = Web::ThoughtClose;
        return;
      }
      emit_thought(std::string_view(&c, 1));
      return;

    case Web::ThoughtClose:
      pending_ += c;
      if (pending_ == kThoughtClose) {
        pending_.clear();
        stack_.clear();
        web_ = Web::Layout;
        return;
      }
      if (is_prefix_of(pending_, kThoughtClose)) return;
      pending_.pop_back();
      emit_thought(pending_);
      pending_.clear();
      web_ = Web::Thought;
      step_web(c);
      return;

    case Web::Action:
      if (action_quote_) {
        if (action_escape_) action_escape_ = false;
        else if (c == '\\') action_escape_ = true;
        else if (c == action_quote_) action_quote_ = 0;
      } else if (c == '"' || c == '\'') {
        action_quote_ = c;
      } else if (c == '<') {
        pending_ = "<";
        web_ = Web::ActionClose;
        return;
      }
      action_raw_ += c;
      if (action_raw_.size() > kMaxWebAction) {
        warn(WarningCategory::Overflow, construct_start_, pos_ + 1);
        emit_text(std::string(kActionOpen) + action_raw_);
        action_raw_.clear();
        stack_.clear();
        web_ = Web::Text;
      }
      return;

    case Web::ActionClose:
      pending_ += c;
      if (pending_ == kActionClose) {
        pending_.clear();
        complete_web_action();
        return;
      }
      if (is_prefix_of(pending_, kActionClose)) return;
      pending_.pop_back();
      action_raw_ += pending_;
      pending_.clear();
      web_ = Web::Action;
      step_web(c);
      return;
  }
}

// ---------------------------------------------------------------------------

std::vector<RoleEvent> StreamParser::finish() {
  if (done_) return {};
  out_.clear();
  if (grammar_ == Grammar::ChatActions) {
    switch (chat_) {
      case Chat::Ticks:
        emit_text(pending_);
        break;
      case Chat::FenceInfo:
        warn(WarningCategory::Unterminated, construct_start_, pos_);
        emit_text(pending_);
        break;
      case Chat::OtherFence:
        warn(WarningCategory::Unterminated, pos_, pos_);
        break;
      case Chat::Block:
        if (!committed_) {
          warn(WarningCategory::Unterminated, construct_start_, pos_);
          emit_text(block_raw_);
        } else {
          warn(WarningCategory::Unterminated, construct_start_, pos_);
          end_action(json_ == Json::FenceClose);
        }
        break;
      case Chat::Text:
      case Chat::AfterAction:
        break;
    }
  } else {
    switch (web_) {
      case Web::TagOpen:
        warn(WarningCategory::Unterminated, construct_start_, pos_);
        emit_text(pending_);
        break;
      case Web::Thought:
        warn(WarningCategory::Unterminated, construct_start_, pos_);
        break;
      case Web::ThoughtClose:
        emit_thought(pending_);
        warn(WarningCategory::Unterminated, construct_start_, pos_);
        break;
      case Web::Action:
      case Web::ActionClose:
        warn(WarningCategory::Unterminated, construct_start_, pos_);
        emit_text(std::string(kActionOpen) + action_raw_ + pending_);
        break;
      case Web::Layout:
      case Web::Text:
        break;
    }
  }
  pending_.clear();
  block_raw_.clear();
  action_raw_.clear();
  stack_.clear();
  done_ = true;
  return std::exchange(out_, {});
}

std::vector<RoleEvent> parse_all(Grammar grammar, std::string_view input) {
  StreamParser parser(grammar);
  auto events = parser.feed(input);
  auto tail = parser.finish();
  events.insert(events.end(), std::make_move_iterator(tail.begin()), std::make_move_iterator(tail.end()));
  return coalesce(std::move(events));
}

std::vector<std::string> split_action_args(std::string_view raw_args) {
  std::vector<std::string> args;
  if (text::trim(raw_args).empty()) return args;
  std::string current;
  int depth = 0;
  char quote = 0;
  bool esc = false;
  for (char c : raw_args) {
    if (quote) {
      current += c;
      if (esc) esc = false;
      else if (c == '\\') esc = true;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    else if (c == '(' || c == '[' || c == '{') ++depth;
    else if (c == ')' || c == ']' || c == '}') --depth;
    else if (c == ',' && depth == 0) {
      args.emplace_back(text::trim(current));
      current.clear();
      continue;
    }
    current += c;
  }
  args.emplace_back(text::trim(current));
  return args;
}

}  // namespace agentrt::parse
