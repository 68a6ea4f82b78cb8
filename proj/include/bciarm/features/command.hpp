#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace bciarm {

enum class CommandSource { Mental, Facial };

// The twelve trainable actions. Codes 1-6 are mental commands, 7-12 facial
// expressions; the integer values are the label codes.
enum class Command : int {
  Push = 1,
  Pull = 2,
  Lift = 3,
  Drop = 4,
  MoveRight = 5,
  MoveLeft = 6,
  RaiseBrows = 7,
  FurrowBrows = 8,
  WinkLeft = 9,
  WinkRight = 10,
  Smile = 11,
  ClenchTeeth = 12,
};

inline constexpr std::size_t kCommandCount = 12;

inline constexpr std::array<Command, kCommandCount> kAllCommands = {
    Command::Push,       Command::Pull,        Command::Lift,     Command::Drop,
    Command::MoveRight,  Command::MoveLeft,    Command::RaiseBrows, Command::FurrowBrows,
    Command::WinkLeft,   Command::WinkRight,   Command::Smile,    Command::ClenchTeeth};

constexpr int code(Command c) { return static_cast<int>(c); }

constexpr CommandSource source_of(Command c) {
  return code(c) <= 6 ? CommandSource::Mental : CommandSource::Facial;
}

std::string_view name(Command c);
std::string_view name(CommandSource s);

// Case-insensitive; '_', '-' and spaces are ignored, so "move_right",
// "MoveRight" and "move right" all parse.
std::optional<Command> parse_command(std::string_view text);
std::optional<Command> command_from_code(int code);
std::optional<CommandSource> parse_source(std::string_view text);

}  // namespace bciarm
