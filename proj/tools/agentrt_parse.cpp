// Prints the role events of a transcript as JSON lines.
//   agentrt-parse [--grammar chat|webot] [--chunk-size N] [--coalesce] <file|->

#include <CLI11.hpp>

#include <iostream>
#include <iterator>

#include "agentrt/core/text.hpp"
#include "agentrt/parse/stream_parser.hpp"

using namespace agentrt;

int main(int argc, char** argv) {
  CLI::App app{"Replay a model transcript through the streaming parser"};
  std::string grammar = "chat";
  std::size_t chunk = 0;
  bool merge = false;
  std::string input;
  app.add_option("--grammar", grammar, "chat or webot")->check(CLI::IsMember({"chat", "webot"}));
  app.add_option("--chunk-size", chunk, "feed N bytes at a time (0 = whole transcript)");
  app.add_flag("--coalesce", merge, "merge adjacent deltas so output does not depend on chunking");
  app.add_option("input", input, "transcript file, or - for stdin")->required();
  CLI11_PARSE(app, argc, argv);

  std::string transcript;
  try {
    transcript = input == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {}) : text::read_file(input);
  } catch (const std::exception& e) {
    std::cerr << "agentrt-parse: " << e.what() << "\n";
    return 1;
  }

  parse::StreamParser parser(grammar == "chat" ? parse::Grammar::ChatActions : parse::Grammar::WebotTags);
  std::vector<parse::RoleEvent> events;
  const std::size_t step = chunk == 0 ? std::max<std::size_t>(transcript.size(), 1) : chunk;
  for (std::size_t pos = 0; pos < transcript.size(); pos += step) {
    auto got = parser.feed(std::string_view(transcript).substr(pos, step));
    events.insert(events.end(), got.begin(), got.end());
  }
  auto tail = parser.finish();
  events.insert(events.end(), tail.begin(), tail.end());
  if (merge) events = parse::coalesce(std::move(events));
  for (const auto& e : events) std::cout << parse::to_json(e).dump() << "\n";
  return 0;
}
