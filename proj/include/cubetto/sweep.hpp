#pragma once

#include <cstdint>
#include <string>

namespace cubetto {

/// Family of boards to enumerate: every obstacle set up to max_obstacles,
/// crossed with every non-obstacle start cell, start heading, and
/// non-obstacle target cell.
struct SweepOptions {
  int width = 4;
  int height = 4;
  int max_obstacles = 3;
  int max_program_len = 8;  // brute-force enumeration bound
};

struct SweepStats {
  std::int64_t worlds = 0;              // configurations examined
  std::int64_t solvable_within_bound = 0;  // brute force found a program
  std::int64_t beyond_bound = 0;        // solver solution longer than the bound
  std::int64_t infeasible = 0;          // solver proved the target unreachable
  std::int64_t length_mismatches = 0;   // solver length != brute-force minimum
  std::int64_t replay_failures = 0;     // solver program did not reach the target
  std::int64_t infeasible_disagreements = 0;  // solver infeasible, enumeration found one

  bool clean() const {
    return length_mismatches == 0 && replay_failures == 0 && infeasible_disagreements == 0;
  }
  std::string summary() const;
};

/// Smallest number of commands (<= max_len) whose execution reaches the
/// target, by exhaustive enumeration of the program prefix tree; -1 when no
/// program within the bound reaches it. Obstacles are a cell bitmask over a
/// board of at most 8x8 cells. Independent of the BFS solver on purpose.
int brute_force_min_length(int width, int height, std::uint64_t obstacle_mask, int start_x,
                           int start_y, int heading, int target_x, int target_y, int max_len);

/// Checks shortest_program against brute-force enumeration over the whole
/// family. Single-threaded reference implementation.
SweepStats sweep_oracle_equivalence_serial(const SweepOptions& options);

/// Same sweep with the obstacle-set loop run in parallel (OpenMP when
/// compiled in, otherwise falls back to the serial path). Stats are
/// identical to the serial run.
SweepStats sweep_oracle_equivalence_parallel(const SweepOptions& options);

bool sweep_parallel_enabled();  // true when built with OpenMP

}  // namespace cubetto
