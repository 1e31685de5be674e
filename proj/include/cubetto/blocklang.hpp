#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cubetto {

/// The three movement blocks of the preschool command set.
enum class Command { Forward, TurnLeft, TurnRight };

const char* command_name(Command cmd);   // "forward" / "turn left" / "turn right"
const char* command_color(Command cmd);  // "green" / "yellow" / "red"

enum class Heading { North, East, South, West };

char heading_letter(Heading heading);  // 'N' 'E' 'S' 'W'
std::optional<Heading> heading_from_letter(char letter);
Heading turned_left(Heading heading);
Heading turned_right(Heading heading);

/// Slot count of the physical control board.
inline constexpr int kDefaultProgramCapacity = 12;

struct Program {
  std::vector<Command> commands;

  bool operator==(const Program&) const = default;
  std::size_t size() const { return commands.size(); }
  bool empty() const { return commands.empty(); }
};

/// Lowercase command names joined by ", ".
std::string canonical_print(const Program& program);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string token, std::size_t position);
  const std::string& token() const { return token_; }
  std::size_t position() const { return position_; }  // byte offset of the token

 private:
  std::string token_;
  std::size_t position_;
};

class CapacityError : public std::runtime_error {
 public:
  CapacityError(std::size_t length, int capacity);
  std::size_t length() const { return length_; }
  int capacity() const { return capacity_; }

 private:
  std::size_t length_;
  int capacity_;
};

/// Tokenizes a comma/whitespace-separated command listing. Accepted synonyms:
/// forward | move forward | green; turn left | rotate left | left | yellow;
/// and the right-hand mirrors. Throws ParseError on unknown tokens and
/// CapacityError past `capacity` commands.
Program parse_program(std::string_view text, int capacity = kDefaultProgramCapacity);

struct ExtractedPrograms {
  std::vector<Program> programs;
  std::vector<std::string> skipped;  // runs dropped for containing a command-like
                                     // token that is not a real block
};

/// Scans prose for maximal runs of two or more consecutive command tokens.
ExtractedPrograms extract_programs(std::string_view text);

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

struct Pose {
  int x = 0;
  int y = 0;
  Heading heading = Heading::North;

  bool operator==(const Pose&) const = default;
  Cell cell() const { return {x, y}; }
};

/// Forward moves one cell along the heading (N:+y E:+x S:-y W:-x);
/// turns rotate in place.
Pose step(const Pose& pose, Command cmd);

struct WorldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridWorld {
  std::optional<int> width;   // empty -> unbounded
  std::optional<int> height;  // empty -> unbounded
  std::set<Cell> obstacles;
  Pose start;
  std::optional<Cell> target;

  bool bounded() const { return width.has_value() && height.has_value(); }
  bool in_bounds(const Cell& cell) const;
  void validate() const;  // throws WorldError
};

/// JSON schema: width, height, start {x, y, heading}, target {x, y},
/// obstacles [{x, y}]. Absent or null width/height means unbounded;
/// target is optional.
GridWorld world_from_json(const std::string& json_text);
std::string world_to_json(const GridWorld& world, int indent = 2);
GridWorld load_world(const std::filesystem::path& path);

enum class Outcome { ReachedTarget, Finished, OutOfBounds, HitObstacle };

const char* outcome_name(Outcome outcome);

struct SimulationResult {
  std::vector<Pose> trace;  // start pose plus one pose per executed command
  Outcome outcome = Outcome::Finished;
  // Failing command index for OutOfBounds/HitObstacle; executed command
  // count for ReachedTarget/Finished.
  int halt_step = 0;
};

/// Applies the program from world.start, halting on the target, a boundary
/// or an obstacle. The target check runs before the first command and after
/// every one, so reaching it short-circuits.
SimulationResult execute(const Program& program, const GridWorld& world);

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Breadth-first search over (x, y, heading). Returns a minimum-length
/// program reaching the target, ties broken by expanding Forward, then
/// TurnLeft, then TurnRight. Requires a bounded world with a target;
/// throws InfeasibleError when no program reaches it.
Program shortest_program(const GridWorld& world);

/// True iff executing the program reaches the world's target.
bool feasible(const GridWorld& world, const Program& program);

}  // namespace cubetto
