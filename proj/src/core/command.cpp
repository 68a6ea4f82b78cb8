#include "bciarm/features/command.hpp"

#include <cctype>

namespace bciarm {

namespace {

constexpr std::array<std::string_view, kCommandCount> kNames = {
    "Push",       "Pull",        "Lift",     "Drop",      "MoveRight", "MoveLeft",
    "RaiseBrows", "FurrowBrows", "WinkLeft", "WinkRight", "Smile",     "ClenchTeeth"};

std::string fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    if (ch == '_' || ch == '-' || ch == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

}  // namespace

std::string_view name(Command c) { return kNames[static_cast<std::size_t>(code(c) - 1)]; }

std::string_view name(CommandSource s) {
  return s == CommandSource::Mental ? "mental" : "facial";
}

std::optional<Command> parse_command(std::string_view text) {
  const std::string key = fold(text);
  for (Command c : kAllCommands) {
    if (fold(name(c)) == key) return c;
  }
  return std::nullopt;
}

std::optional<Command> command_from_code(int value) {
  if (value < 1 || value > static_cast<int>(kCommandCount)) return std::nullopt;
  return static_cast<Command>(value);
}

std::optional<CommandSource> parse_source(std::string_view text) {
  const std::string key = fold(text);
  if (key == "mental") return CommandSource::Mental;
  if (key == "facial") return CommandSource::Facial;
  return std::nullopt;
}

}  // namespace bciarm
