#include "cubetto/blocklang.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>

namespace cubetto {
namespace {

using json = nlohmann::json;

struct Word {
  std::string text;      // lowercased
  std::size_t offset;    // byte offset in the source
  std::size_t length;    // byte length in the source
  bool sentence_end;     // trailing '.', '!' or '?'
};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\'';
}

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    while (i < text.size() && is_word_char(text[i])) {
      ++i;
    }
    Word word;
    word.offset = begin;
    word.length = i - begin;
    word.text.reserve(word.length);
    for (std::size_t k = begin; k < i; ++k) {
      word.text.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[k]))));
    }
    word.sentence_end = i < text.size() && (text[i] == '.' || text[i] == '!' || text[i] == '?');
    words.push_back(std::move(word));
  }
  return words;
}

// Tries to read one command starting at words[i]; returns the number of
// words consumed (0 on no match).
std::size_t match_command(const std::vector<Word>& words, std::size_t i, Command& out) {
  const std::string& w = words[i].text;
  auto next_is = [&](const char* expected) {
    return i + 1 < words.size() && words[i + 1].text == expected;
  };
  if (w == "forward" || w == "green") {
    out = Command::Forward;
    return 1;
  }
  if (w == "left" || w == "yellow") {
    out = Command::TurnLeft;
    return 1;
  }
  if (w == "right" || w == "red") {
    out = Command::TurnRight;
    return 1;
  }
  if (w == "move" && next_is("forward")) {
    out = Command::Forward;
    return 2;
  }
  if (w == "turn" || w == "rotate") {
    if (next_is("left")) {
      out = Command::TurnLeft;
      return 2;
    }
    if (next_is("right")) {
      out = Command::TurnRight;
      return 2;
    }
  }
  return 0;
}

// Command-shaped tokens that are not real blocks; a run containing one is
// reported instead of parsed.
std::size_t match_bogus_command(const std::vector<Word>& words, std::size_t i) {
  static const std::array<const char*, 7> kSingles = {
      "backward", "backwards", "back", "jump", "stop", "spin", "reverse"};
  const std::string& w = words[i].text;
  for (const char* token : kSingles) {
    if (w == token) {
      return 1;
    }
  }
  if (w == "move" && i + 1 < words.size() &&
      (words[i + 1].text == "left" || words[i + 1].text == "right" ||
       words[i + 1].text == "backward" || words[i + 1].text == "back")) {
    return 2;
  }
  return 0;
}

bool is_run_connector(const std::string& word) { return word == "and" || word == "then"; }

json cell_to_json(const Cell& cell) { return json{{"x", cell.x}, {"y", cell.y}}; }

Cell cell_from_json(const json& value, const char* what) {
  if (!value.is_object() || !value.contains("x") || !value.contains("y")) {
    throw WorldError(std::string(what) + " must be an object with x and y");
  }
  return {value.at("x").get<int>(), value.at("y").get<int>()};
}

}  // namespace

const char* command_name(Command cmd) {
  switch (cmd) {
    case Command::Forward:
      return "forward";
    case Command::TurnLeft:
      return "turn left";
    case Command::TurnRight:
      return "turn right";
  }
  return "";
}

const char* command_color(Command cmd) {
  switch (cmd) {
    case Command::Forward:
      return "green";
    case Command::TurnLeft:
      return "yellow";
    case Command::TurnRight:
      return "red";
  }
  return "";
}

char heading_letter(Heading heading) {
  switch (heading) {
    case Heading::North:
      return 'N';
    case Heading::East:
      return 'E';
    case Heading::South:
      return 'S';
    case Heading::West:
      return 'W';
  }
  return '?';
}

std::optional<Heading> heading_from_letter(char letter) {
  switch (std::toupper(static_cast<unsigned char>(letter))) {
    case 'N':
      return Heading::North;
    case 'E':
      return Heading::East;
    case 'S':
      return Heading::South;
    case 'W':
      return Heading::West;
    default:
      return std::nullopt;
  }
}

Heading turned_left(Heading heading) {
  switch (heading) {
    case Heading::North:
      return Heading::West;
    case Heading::West:
      return Heading::South;
    case Heading::South:
      return Heading::East;
    case Heading::East:
      return Heading::North;
  }
  return heading;
}

Heading turned_right(Heading heading) {
  switch (heading) {
    case Heading::North:
      return Heading::East;
    case Heading::East:
      return Heading::South;
    case Heading::South:
      return Heading::West;
    case Heading::West:
      return Heading::North;
  }
  return heading;
}

std::string canonical_print(const Program& program) {
  std::string out;
  for (std::size_t i = 0; i < program.commands.size(); ++i) {
    if (i > 0) {
      out += ", ";
    }
    out += command_name(program.commands[i]);
  }
  return out;
}

ParseError::ParseError(std::string token, std::size_t position)
    : std::runtime_error("unknown command '" + token + "' at offset " + std::to_string(position)),
      token_(std::move(token)),
      position_(position) {}

CapacityError::CapacityError(std::size_t length, int capacity)
    : std::runtime_error("program has " + std::to_string(length) +
                         " commands, control board holds " + std::to_string(capacity)),
      length_(length),
      capacity_(capacity) {}

Program parse_program(std::string_view text, int capacity) {
  const std::vector<Word> words = split_words(text);
  Program program;
  std::size_t i = 0;
  while (i < words.size()) {
    Command cmd;
    std::size_t consumed = match_command(words, i, cmd);
    if (consumed == 0) {
      // Report the two-word form for "move left"-style tokens.
      std::size_t bogus = match_bogus_command(words, i);
      std::size_t span = std::max<std::size_t>(bogus, 1);
      const Word& first = words[i];
      const Word& last = words[i + span - 1];
      std::string token(text.substr(first.offset, last.offset + last.length - first.offset));
      throw ParseError(std::move(token), first.offset);
    }
    program.commands.push_back(cmd);
    if (program.commands.size() > static_cast<std::size_t>(capacity)) {
      throw CapacityError(program.commands.size(), capacity);
    }
    i += consumed;
  }
  return program;
}

ExtractedPrograms extract_programs(std::string_view text) {
  const std::vector<Word> words = split_words(text);
  ExtractedPrograms result;

  std::size_t i = 0;
  while (i < words.size()) {
    Command cmd;
    bool starts_run = match_command(words, i, cmd) > 0 || match_bogus_command(words, i) > 0;
    if (!starts_run) {
      ++i;
      continue;
    }

    // Grow the run while command tokens (or single connectors between them)
    // keep coming; a sentence boundary ends it.
    std::size_t run_begin = i;
    std::size_t run_end = i;  // index one past the last command word
    std::vector<Command> run_commands;
    std::size_t command_count = 0;
    bool contaminated = false;
    std::size_t j = i;
    while (j < words.size()) {
      std::size_t consumed = match_command(words, j, cmd);
      if (consumed > 0) {
        run_commands.push_back(cmd);
      } else {
        consumed = match_bogus_command(words, j);
        if (consumed > 0) {
          contaminated = true;
        }
      }
      if (consumed == 0) {
        if (j > run_begin && is_run_connector(words[j].text) && !words[j].sentence_end &&
            j + 1 < words.size()) {
          Command peek;
          if (match_command(words, j + 1, peek) > 0 || match_bogus_command(words, j + 1) > 0) {
            ++j;
            continue;
          }
        }
        break;
      }
      ++command_count;
      j += consumed;
      run_end = j;
      if (words[j - 1].sentence_end) {
        break;
      }
    }

    if (command_count >= 2) {
      const Word& first = words[run_begin];
      const Word& last = words[run_end - 1];
      std::string run_text(
          text.substr(first.offset, last.offset + last.length - first.offset));
      if (contaminated) {
        result.skipped.push_back(std::move(run_text));
      } else {
        result.programs.push_back(Program{std::move(run_commands)});
      }
    }
    i = std::max(run_end, i + 1);
  }
  return result;
}

Pose step(const Pose& pose, Command cmd) {
  Pose next = pose;
  switch (cmd) {
    case Command::Forward:
      switch (pose.heading) {
        case Heading::North:
          ++next.y;
          break;
        case Heading::East:
          ++next.x;
          break;
        case Heading::South:
          --next.y;
          break;
        case Heading::West:
          --next.x;
          break;
      }
      break;
    case Command::TurnLeft:
      next.heading = turned_left(pose.heading);
      break;
    case Command::TurnRight:
      next.heading = turned_right(pose.heading);
      break;
  }
  return next;
}

bool GridWorld::in_bounds(const Cell& cell) const {
  if (width && (cell.x < 0 || cell.x >= *width)) {
    return false;
  }
  if (height && (cell.y < 0 || cell.y >= *height)) {
    return false;
  }
  return true;
}

void GridWorld::validate() const {
  if ((width && *width <= 0) || (height && *height <= 0)) {
    throw WorldError("board dimensions must be positive");
  }
  if (!in_bounds(start.cell())) {
    throw WorldError("start cell is outside the board");
  }
  if (obstacles.contains(start.cell())) {
    throw WorldError("start cell is an obstacle");
  }
  if (target) {
    if (!in_bounds(*target)) {
      throw WorldError("target cell is outside the board");
    }
    if (obstacles.contains(*target)) {
      throw WorldError("target cell is an obstacle");
    }
  }
}

GridWorld world_from_json(const std::string& json_text) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw WorldError(std::string("world file is not valid JSON: ") + ex.what());
  }
  if (!parsed.is_object()) {
    throw WorldError("world file must hold a JSON object");
  }

  GridWorld world;
  if (parsed.contains("width") && !parsed.at("width").is_null()) {
    world.width = parsed.at("width").get<int>();
  }
  if (parsed.contains("height") && !parsed.at("height").is_null()) {
    world.height = parsed.at("height").get<int>();
  }
  if (!parsed.contains("start")) {
    throw WorldError("world file needs a start pose");
  }
  const json& start = parsed.at("start");
  Cell start_cell = cell_from_json(start, "start");
  world.start.x = start_cell.x;
  world.start.y = start_cell.y;
  std::string heading = start.value("heading", "N");
  auto parsed_heading = heading.empty() ? std::nullopt : heading_from_letter(heading[0]);
  if (!parsed_heading) {
    throw WorldError("start heading must be one of N, E, S, W");
  }
  world.start.heading = *parsed_heading;
  if (parsed.contains("target") && !parsed.at("target").is_null()) {
    world.target = cell_from_json(parsed.at("target"), "target");
  }
  if (parsed.contains("obstacles") && !parsed.at("obstacles").is_null()) {
    for (const auto& entry : parsed.at("obstacles")) {
      world.obstacles.insert(cell_from_json(entry, "obstacle"));
    }
  }
  world.validate();
  return world;
}

std::string world_to_json(const GridWorld& world, int indent) {
  json out;
  out["width"] = world.width ? json(*world.width) : json(nullptr);
  out["height"] = world.height ? json(*world.height) : json(nullptr);
  out["start"] = {{"x", world.start.x},
                  {"y", world.start.y},
                  {"heading", std::string(1, heading_letter(world.start.heading))}};
  out["target"] = world.target ? cell_to_json(*world.target) : json(nullptr);
  json obstacles = json::array();
  for (const Cell& cell : world.obstacles) {
    obstacles.push_back(cell_to_json(cell));
  }
  out["obstacles"] = std::move(obstacles);
  return out.dump(indent);
}

GridWorld load_world(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw WorldError("cannot open world file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return world_from_json(buffer.str());
}

const char* outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::ReachedTarget:
      return "reached_target";
    case Outcome::Finished:
      return "finished";
    case Outcome::OutOfBounds:
      return "out_of_bounds";
    case Outcome::HitObstacle:
      return "hit_obstacle";
  }
  return "";
}

SimulationResult execute(const Program& program, const GridWorld& world) {
  world.validate();

  SimulationResult result;
  Pose pose = world.start;
  result.trace.push_back(pose);

  auto at_target = [&] { return world.target && pose.cell() == *world.target; };
  if (at_target()) {
    result.outcome = Outcome::ReachedTarget;
    result.halt_step = 0;
    return result;
  }

  for (std::size_t i = 0; i < program.commands.size(); ++i) {
    const Command cmd = program.commands[i];
    const Pose next = step(pose, cmd);
    if (cmd == Command::Forward) {
      if (!world.in_bounds(next.cell())) {
        result.outcome = Outcome::OutOfBounds;
        result.halt_step = static_cast<int>(i);
        return result;
      }
      if (world.obstacles.contains(next.cell())) {
        result.outcome = Outcome::HitObstacle;
        result.halt_step = static_cast<int>(i);
        return result;
      }
    }
    pose = next;
    result.trace.push_back(pose);
    if (at_target()) {
      result.outcome = Outcome::ReachedTarget;
      result.halt_step = static_cast<int>(i) + 1;
      return result;
    }
  }

  result.outcome = Outcome::Finished;
  result.halt_step = static_cast<int>(program.commands.size());
  return result;
}

Program shortest_program(const GridWorld& world) {
  world.validate();
  if (!world.bounded()) {
    throw WorldError("shortest_program needs a bounded board");
  }
  if (!world.target) {
    throw WorldError("shortest_program needs a target");
  }
  if (world.start.cell() == *world.target) {
    return {};
  }

  const int w = *world.width;
  const int h = *world.height;
  const int state_count = w * h * 4;
  auto state_of = [&](int x, int y, Heading d) { return (y * w + x) * 4 + static_cast<int>(d); };

  std::vector<int> parent(state_count, -1);
  std::vector<Command> via(state_count, Command::Forward);
  std::vector<char> seen(state_count, 0);
  std::deque<int> queue;

  const int start_state = state_of(world.start.x, world.start.y, world.start.heading);
  seen[start_state] = 1;
  queue.push_back(start_state);

  constexpr Command kExpansionOrder[] = {Command::Forward, Command::TurnLeft, Command::TurnRight};

  auto reconstruct = [&](int state) {
    Program program;
    while (state != start_state) {
      program.commands.push_back(via[state]);
      state = parent[state];
    }
    std::reverse(program.commands.begin(), program.commands.end());
    return program;
  };

  while (!queue.empty()) {
    const int current = queue.front();
    queue.pop_front();
    Pose pose;
    pose.heading = static_cast<Heading>(current % 4);
    pose.x = (current / 4) % w;
    pose.y = (current / 4) / w;

    for (Command cmd : kExpansionOrder) {
      const Pose next = step(pose, cmd);
      if (cmd == Command::Forward &&
          (!world.in_bounds(next.cell()) || world.obstacles.contains(next.cell()))) {
        continue;
      }
      const int next_state = state_of(next.x, next.y, next.heading);
      if (seen[next_state]) {
        continue;
      }
      seen[next_state] = 1;
      parent[next_state] = current;
      via[next_state] = cmd;
      if (next.cell() == *world.target) {
        return reconstruct(next_state);
      }
      queue.push_back(next_state);
    }
  }

  throw InfeasibleError("no program reaches the target");
}

bool feasible(const GridWorld& world, const Program& program) {
  return execute(program, world).outcome == Outcome::ReachedTarget;
}

}  // namespace cubetto
