#include <doctest.h>

#include <random>

#include "cubetto/blocklang.hpp"
#include "cubetto/sweep.hpp"
#include "test_support.hpp"

using namespace cubetto;

namespace {

GridWorld open_world(int width, int height, Pose start, std::optional<Cell> target = {}) {
  GridWorld world;
  world.width = width;
  world.height = height;
  world.start = start;
  world.target = target;
  return world;
}

GridWorld unbounded_world(Heading heading) {
  GridWorld world;
  world.start = {0, 0, heading};
  return world;
}

std::pair<int, int> displacement(const Program& program, Heading heading) {
  const SimulationResult result = execute(program, unbounded_world(heading));
  return {result.trace.back().x, result.trace.back().y};
}

Program mirrored(const Program& program) {
  Program out = program;
  for (Command& cmd : out.commands) {
    if (cmd == Command::TurnLeft) {
      cmd = Command::TurnRight;
    } else if (cmd == Command::TurnRight) {
      cmd = Command::TurnLeft;
    }
  }
  return out;
}

// Reflection of (x, y) across the axis spanned by the heading vector.
std::pair<int, int> reflected(std::pair<int, int> d, Heading heading) {
  switch (heading) {
    case Heading::North:
    case Heading::South:
      return {-d.first, d.second};
    case Heading::East:
    case Heading::West:
      return {d.first, -d.second};
  }
  return d;
}

}  // namespace

TEST_CASE("command names and colors") {
  CHECK(std::string(command_name(Command::Forward)) == "forward");
  CHECK(std::string(command_color(Command::Forward)) == "green");
  CHECK(std::string(command_color(Command::TurnLeft)) == "yellow");
  CHECK(std::string(command_color(Command::TurnRight)) == "red");
}

TEST_CASE("parse accepts names, two-word forms and colors") {
  CHECK(parse_program("forward, forward, turn left") ==
        Program{{Command::Forward, Command::Forward, Command::TurnLeft}});
  CHECK(parse_program("") == Program{});
  CHECK(parse_program("green green red") ==
        Program{{Command::Forward, Command::Forward, Command::TurnRight}});
  CHECK(parse_program("move forward, rotate left, right") ==
        Program{{Command::Forward, Command::TurnLeft, Command::TurnRight}});
}

TEST_CASE("parse reports unknown tokens with their position") {
  try {
    parse_program("forward, backward");
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(ex.token() == "backward");
    CHECK(ex.position() == 9);
  }

  CHECK_THROWS_AS(parse_program("move left"), ParseError);
  CHECK_THROWS_AS(parse_program("turn around"), ParseError);
}

TEST_CASE("parse enforces the board capacity") {
  const std::string twelve = "green, green, green, green, green, green, green, green, green, "
                             "green, green, green";
  CHECK(parse_program(twelve).size() == 12);
  CHECK_THROWS_AS(parse_program(twelve + ", green"), CapacityError);
  CHECK_NOTHROW(parse_program(twelve + ", green", 13));
}

TEST_CASE("canonical print round-trips through the parser") {
  std::mt19937 rng(424242);
  for (int i = 0; i < 1000; ++i) {
    const Program program = testsupport::random_program(rng, kDefaultProgramCapacity);
    CHECK(parse_program(canonical_print(program)) == program);
  }
}

TEST_CASE("extract_programs finds command runs in prose") {
  const auto extracted =
      extract_programs("Press forward, forward, turn right, forward to reach the ship.");
  REQUIRE(extracted.programs.size() == 1);
  CHECK(extracted.programs[0] ==
        Program{{Command::Forward, Command::Forward, Command::TurnRight, Command::Forward}});

  CHECK(extract_programs("The pirates sing songs all day.").programs.empty());
  CHECK(extract_programs("Try forward once.").programs.empty());
}

TEST_CASE("extract_programs skips runs with made-up commands") {
  const auto extracted = extract_programs(
      "Lay forward, backward, forward on the board. Then forward, turn left works.");
  REQUIRE(extracted.programs.size() == 1);
  CHECK(extracted.programs[0] == Program{{Command::Forward, Command::TurnLeft}});
  REQUIRE(extracted.skipped.size() == 1);
  CHECK(extracted.skipped[0].find("backward") != std::string::npos);
}

TEST_CASE("step moves along the heading and turns in place") {
  CHECK(step({0, 0, Heading::North}, Command::Forward) == Pose{0, 1, Heading::North});
  CHECK(step({0, 0, Heading::East}, Command::Forward) == Pose{1, 0, Heading::East});
  CHECK(step({0, 0, Heading::South}, Command::Forward) == Pose{0, -1, Heading::South});
  CHECK(step({0, 0, Heading::West}, Command::Forward) == Pose{-1, 0, Heading::West});

  Pose pose{0, 0, Heading::North};
  for (int i = 0; i < 4; ++i) {
    pose = step(pose, Command::TurnLeft);
    CHECK(pose.x == 0);
    CHECK(pose.y == 0);
  }
  CHECK(pose == Pose{0, 0, Heading::North});
}

TEST_CASE("stepwise trace of forward, turn right, forward") {
  const Program program{{Command::Forward, Command::TurnRight, Command::Forward}};
  const SimulationResult result = execute(program, unbounded_world(Heading::North));
  REQUIRE(result.trace.size() == 4);
  CHECK(result.trace[1] == Pose{0, 1, Heading::North});
  CHECK(result.trace[2] == Pose{0, 1, Heading::East});
  CHECK(result.trace[3] == Pose{1, 1, Heading::East});
}

TEST_CASE("execute halts on the target, boundaries and obstacles") {
  SUBCASE("empty program away from the target just finishes") {
    const SimulationResult result =
        execute({}, open_world(6, 6, {0, 0, Heading::North}, Cell{0, 2}));
    CHECK(result.outcome == Outcome::Finished);
    CHECK(result.trace == std::vector<Pose>{{0, 0, Heading::North}});
  }
  SUBCASE("two forwards reach the target on a 6x6 board") {
    const SimulationResult result = execute({{Command::Forward, Command::Forward}},
                                            open_world(6, 6, {0, 0, Heading::North}, Cell{0, 2}));
    CHECK(result.outcome == Outcome::ReachedTarget);
    CHECK(result.halt_step == 2);
  }
  SUBCASE("a forward on a 1x1 board leaves it immediately") {
    const SimulationResult result =
        execute({{Command::Forward}}, open_world(1, 1, {0, 0, Heading::North}));
    CHECK(result.outcome == Outcome::OutOfBounds);
    CHECK(result.halt_step == 0);
    CHECK(result.trace.size() == 1);
  }
  SUBCASE("an obstacle ahead halts with its command index") {
    GridWorld world = open_world(3, 3, {0, 0, Heading::North});
    world.obstacles = {{0, 2}};
    const SimulationResult result = execute({{Command::Forward, Command::Forward}}, world);
    CHECK(result.outcome == Outcome::HitObstacle);
    CHECK(result.halt_step == 1);
    CHECK(result.trace.size() == 2);
  }
  SUBCASE("reaching the target mid-program short-circuits") {
    const SimulationResult result =
        execute({{Command::Forward, Command::Forward, Command::Forward}},
                open_world(6, 6, {0, 0, Heading::North}, Cell{0, 1}));
    CHECK(result.outcome == Outcome::ReachedTarget);
    CHECK(result.halt_step == 1);
    CHECK(result.trace.size() == 2);
  }
}

TEST_CASE("world invariants are enforced") {
  GridWorld bad = open_world(3, 3, {5, 0, Heading::North});
  CHECK_THROWS_AS(bad.validate(), WorldError);

  GridWorld on_obstacle = open_world(3, 3, {0, 0, Heading::North});
  on_obstacle.obstacles = {{0, 0}};
  CHECK_THROWS_AS(on_obstacle.validate(), WorldError);

  GridWorld target_obstacle = open_world(3, 3, {0, 0, Heading::North}, Cell{1, 1});
  target_obstacle.obstacles = {{1, 1}};
  CHECK_THROWS_AS(target_obstacle.validate(), WorldError);
}

TEST_CASE("world JSON round-trips and rejects junk") {
  GridWorld world = open_world(6, 5, {0, 2, Heading::East}, Cell{5, 2});
  world.obstacles = {{1, 1}, {2, 3}};
  const GridWorld reloaded = world_from_json(world_to_json(world));
  CHECK(reloaded.width == world.width);
  CHECK(reloaded.height == world.height);
  CHECK(reloaded.start == world.start);
  CHECK(reloaded.target == world.target);
  CHECK(reloaded.obstacles == world.obstacles);

  CHECK_THROWS_AS(world_from_json("{"), WorldError);
  CHECK_THROWS_AS(world_from_json("{\"width\": 3}"), WorldError);
  CHECK_THROWS_AS(
      world_from_json(R"({"start": {"x": 0, "y": 0, "heading": "Q"}})"), WorldError);
}

TEST_CASE("the shipped worlds load and the canyon run works") {
  const GridWorld standard = load_world(testsupport::data_dir() / "worlds" / "default.json");
  CHECK(standard.bounded());

  const GridWorld canyon = load_world(testsupport::data_dir() / "worlds" / "canyon.json");
  const Program corridor{{Command::Forward, Command::Forward, Command::Forward, Command::Forward,
                          Command::Forward}};
  CHECK(feasible(canyon, corridor));
  // Turning into the canyon wall is not.
  const Program into_wall{{Command::TurnLeft, Command::Forward}};
  CHECK_FALSE(feasible(canyon, into_wall));
}

TEST_CASE("four left turns are the identity on any pose") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coord(-20, 20);
  std::uniform_int_distribution<int> dir(0, 3);
  for (int i = 0; i < 100; ++i) {
    const Pose pose{coord(rng), coord(rng), static_cast<Heading>(dir(rng))};
    Pose turned = pose;
    for (int k = 0; k < 4; ++k) {
      turned = step(turned, Command::TurnLeft);
    }
    CHECK(turned == pose);
  }
}

TEST_CASE("a right turn equals three left turns on the heading") {
  for (int d = 0; d < 4; ++d) {
    const Heading heading = static_cast<Heading>(d);
    Heading lefts = heading;
    for (int k = 0; k < 3; ++k) {
      lefts = turned_left(lefts);
    }
    CHECK(turned_right(heading) == lefts);
  }
}

TEST_CASE("mirror law: swapping turns reflects the displacement") {
  std::mt19937 rng(20240201);
  for (int i = 0; i < 1000; ++i) {
    const Program program = testsupport::random_program(rng, 20);
    const Heading heading = static_cast<Heading>(i % 4);
    const auto direct = displacement(program, heading);
    const auto mirror = displacement(mirrored(program), heading);
    CHECK(mirror == reflected(direct, heading));
  }
}

TEST_CASE("rotation law: rotating the start heading rotates the displacement") {
  std::mt19937 rng(20240202);
  for (int i = 0; i < 1000; ++i) {
    const Program program = testsupport::random_program(rng, 20);
    const Heading heading = static_cast<Heading>(i % 4);
    const auto direct = displacement(program, heading);
    const auto rotated = displacement(program, turned_left(heading));
    CHECK(rotated.first == -direct.second);
    CHECK(rotated.second == direct.first);
  }
}

TEST_CASE("shortest_program solves the spec boards") {
  SUBCASE("already on the target") {
    CHECK(shortest_program(open_world(6, 6, {0, 0, Heading::North}, Cell{0, 0})).empty());
  }
  SUBCASE("two cells ahead") {
    const Program program = shortest_program(open_world(6, 6, {0, 0, Heading::North}, Cell{0, 2}));
    CHECK(program == Program{{Command::Forward, Command::Forward}});
  }
  SUBCASE("a wall of obstacles makes the target unreachable") {
    GridWorld world = open_world(3, 3, {0, 0, Heading::North}, Cell{2, 2});
    world.obstacles = {{0, 1}, {1, 1}, {2, 1}, {1, 0}};
    CHECK_THROWS_AS(shortest_program(world), InfeasibleError);
  }
  SUBCASE("unbounded or target-free boards are rejected") {
    CHECK_THROWS_AS(shortest_program(unbounded_world(Heading::North)), WorldError);
    CHECK_THROWS_AS(shortest_program(open_world(3, 3, {0, 0, Heading::North})), WorldError);
  }
}

TEST_CASE("shortest_program ties break Forward before TurnLeft before TurnRight") {
  const Program direct = shortest_program(open_world(4, 4, {1, 1, Heading::East}, Cell{2, 1}));
  CHECK(direct == Program{{Command::Forward}});

  // An obstacle straight ahead leaves two mirror-image detours of length 7;
  // the expansion order picks the one that starts with TurnLeft.
  GridWorld blocked = open_world(3, 3, {1, 0, Heading::North}, Cell{1, 2});
  blocked.obstacles = {{1, 1}};
  const Program detour = shortest_program(blocked);
  CHECK(detour == Program{{Command::TurnLeft, Command::Forward, Command::TurnRight,
                           Command::Forward, Command::Forward, Command::TurnRight,
                           Command::Forward}});
}

TEST_CASE("oracle programs replay to the target on random solvable boards") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> size(2, 7);
  std::uniform_int_distribution<int> dir(0, 3);
  int solvable = 0;
  for (int i = 0; i < 300; ++i) {
    const int w = size(rng);
    const int h = size(rng);
    std::uniform_int_distribution<int> cx(0, w - 1);
    std::uniform_int_distribution<int> cy(0, h - 1);
    GridWorld world = open_world(w, h, {cx(rng), cy(rng), static_cast<Heading>(dir(rng))});
    for (int k = 0; k < 4; ++k) {
      const Cell cell{cx(rng), cy(rng)};
      if (cell != world.start.cell()) {
        world.obstacles.insert(cell);
      }
    }
    Cell target{cx(rng), cy(rng)};
    if (world.obstacles.contains(target)) {
      continue;
    }
    world.target = target;
    try {
      const Program program = shortest_program(world);
      ++solvable;
      CHECK(execute(program, world).outcome == Outcome::ReachedTarget);
      CHECK(feasible(world, program));
    } catch (const InfeasibleError&) {
      // fine; soundness is about the solvable ones
    }
  }
  CHECK(solvable > 100);
}

TEST_CASE("oracle length matches exhaustive enumeration on small boards") {
  // Every 3x3 board with one obstacle, every start heading and target.
  for (int obstacle = 0; obstacle < 9; ++obstacle) {
    GridWorld world = open_world(3, 3, {0, 0, Heading::North});
    world.obstacles = {{obstacle % 3, obstacle / 3}};
    for (int start = 0; start < 9; ++start) {
      const Cell start_cell{start % 3, start / 3};
      if (world.obstacles.contains(start_cell)) {
        continue;
      }
      for (int d = 0; d < 4; ++d) {
        world.start = {start_cell.x, start_cell.y, static_cast<Heading>(d)};
        for (int target = 0; target < 9; ++target) {
          const Cell target_cell{target % 3, target / 3};
          if (world.obstacles.contains(target_cell)) {
            continue;
          }
          world.target = target_cell;
          const int brute = brute_force_min_length(3, 3, 1ULL << obstacle, start_cell.x,
                                                   start_cell.y, d, target_cell.x, target_cell.y,
                                                   8);
          try {
            const Program program = shortest_program(world);
            if (brute >= 0) {
              CHECK(static_cast<int>(program.size()) == brute);
            } else {
              CHECK(static_cast<int>(program.size()) > 8);
            }
          } catch (const InfeasibleError&) {
            CHECK(brute == -1);
          }
        }
      }
    }
  }
}

TEST_CASE("feasibility follows execution") {
  const GridWorld world = open_world(6, 6, {0, 0, Heading::North}, Cell{0, 2});
  CHECK(feasible(world, shortest_program(world)));
  CHECK_FALSE(feasible(world, Program{{Command::TurnLeft}}));
}
