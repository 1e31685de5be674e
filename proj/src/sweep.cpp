#include "cubetto/sweep.hpp"

#include "cubetto/blocklang.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <sstream>
#include <stdexcept>
#include <vector>

namespace cubetto {
namespace {

constexpr int kMoveX[] = {0, 1, 0, -1};  // N E S W
constexpr int kMoveY[] = {1, 0, -1, 0};

void check_options(const SweepOptions& options) {
  if (options.width < 1 || options.height < 1 || options.width * options.height > 64) {
    throw std::invalid_argument("sweep boards must fit an 8x8 cell bitmask");
  }
  if (options.max_obstacles < 0 || options.max_program_len < 0) {
    throw std::invalid_argument("sweep bounds must be non-negative");
  }
}

// Every obstacle bitmask with at most max_obstacles cells set.
std::vector<std::uint64_t> obstacle_masks(int cells, int max_obstacles) {
  std::vector<std::uint64_t> masks = {0};
  std::vector<std::uint64_t> frontier = {0};
  for (int k = 0; k < max_obstacles; ++k) {
    std::vector<std::uint64_t> next;
    for (std::uint64_t mask : frontier) {
      // Extend with cells above the highest set bit to avoid duplicates.
      int first_free = 0;
      if (mask != 0) {
        first_free = 64 - __builtin_clzll(mask);
      }
      for (int cell = first_free; cell < cells; ++cell) {
        next.push_back(mask | (1ULL << cell));
      }
    }
    masks.insert(masks.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return masks;
}

void merge(SweepStats& into, const SweepStats& from) {
  into.worlds += from.worlds;
  into.solvable_within_bound += from.solvable_within_bound;
  into.beyond_bound += from.beyond_bound;
  into.infeasible += from.infeasible;
  into.length_mismatches += from.length_mismatches;
  into.replay_failures += from.replay_failures;
  into.infeasible_disagreements += from.infeasible_disagreements;
}

SweepStats process_mask(const SweepOptions& options, std::uint64_t mask) {
  const int w = options.width;
  const int h = options.height;

  GridWorld world;
  world.width = w;
  world.height = h;
  for (int cell = 0; cell < w * h; ++cell) {
    if (mask >> cell & 1) {
      world.obstacles.insert({cell % w, cell / w});
    }
  }

  SweepStats stats;
  for (int start_cell = 0; start_cell < w * h; ++start_cell) {
    if (mask >> start_cell & 1) {
      continue;
    }
    const int sx = start_cell % w;
    const int sy = start_cell / w;
    for (int heading = 0; heading < 4; ++heading) {
      world.start = {sx, sy, static_cast<Heading>(heading)};
      for (int target_cell = 0; target_cell < w * h; ++target_cell) {
        if (mask >> target_cell & 1) {
          continue;
        }
        const int tx = target_cell % w;
        const int ty = target_cell / w;
        world.target = Cell{tx, ty};
        ++stats.worlds;

        const int brute = brute_force_min_length(w, h, mask, sx, sy, heading, tx, ty,
                                                 options.max_program_len);
        bool solved = true;
        Program program;
        try {
          program = shortest_program(world);
        } catch (const InfeasibleError&) {
          solved = false;
        }

        if (!solved) {
          ++stats.infeasible;
          if (brute >= 0) {
            ++stats.infeasible_disagreements;
          }
          continue;
        }
        if (execute(program, world).outcome != Outcome::ReachedTarget) {
          ++stats.replay_failures;
        }
        if (brute >= 0) {
          ++stats.solvable_within_bound;
          if (static_cast<int>(program.size()) != brute) {
            ++stats.length_mismatches;
          }
        } else if (static_cast<int>(program.size()) <= options.max_program_len) {
          // Enumeration covered this length and found nothing.
          ++stats.length_mismatches;
        } else {
          ++stats.beyond_bound;
        }
      }
    }
  }
  return stats;
}

}  // namespace

std::string SweepStats::summary() const {
  std::ostringstream out;
  out << "worlds=" << worlds << " solvable<=bound=" << solvable_within_bound
      << " beyond-bound=" << beyond_bound << " infeasible=" << infeasible
      << " length-mismatches=" << length_mismatches << " replay-failures=" << replay_failures
      << " infeasible-disagreements=" << infeasible_disagreements;
  return out.str();
}

int brute_force_min_length(int width, int height, std::uint64_t obstacle_mask, int start_x,
                           int start_y, int heading, int target_x, int target_y, int max_len) {
  if (start_x == target_x && start_y == target_y) {
    return 0;
  }
  int best = max_len + 1;

  auto dfs = [&](auto&& self, int x, int y, int d, int depth) -> void {
    if (depth + 1 > max_len || depth + 1 >= best) {
      return;
    }
    const int nx = x + kMoveX[d];
    const int ny = y + kMoveY[d];
    // A Forward off the board or into an obstacle halts every extension of
    // this prefix, so the branch is dead.
    if (nx >= 0 && nx < width && ny >= 0 && ny < height &&
        (obstacle_mask >> (ny * width + nx) & 1) == 0) {
      if (nx == target_x && ny == target_y) {
        best = depth + 1;
      } else {
        self(self, nx, ny, d, depth + 1);
      }
    }
    self(self, x, y, (d + 3) & 3, depth + 1);  // turn left
    self(self, x, y, (d + 1) & 3, depth + 1);  // turn right
  };
  dfs(dfs, start_x, start_y, heading, 0);

  return best > max_len ? -1 : best;
}

SweepStats sweep_oracle_equivalence_serial(const SweepOptions& options) {
  check_options(options);
  SweepStats stats;
  for (std::uint64_t mask : obstacle_masks(options.width * options.height, options.max_obstacles)) {
    merge(stats, process_mask(options, mask));
  }
  return stats;
}

SweepStats sweep_oracle_equivalence_parallel(const SweepOptions& options) {
  check_options(options);
  const std::vector<std::uint64_t> masks =
      obstacle_masks(options.width * options.height, options.max_obstacles);
  SweepStats stats;
#ifdef _OPENMP
#pragma omp parallel
  {
    SweepStats local;
#pragma omp for schedule(dynamic) nowait
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(masks.size()); ++i) {
      merge(local, process_mask(options, masks[static_cast<std::size_t>(i)]));
    }
#pragma omp critical(cubetto_sweep_merge)
    merge(stats, local);
  }
#else
  for (std::uint64_t mask : masks) {
    merge(stats, process_mask(options, mask));
  }
#endif
  return stats;
}

bool sweep_parallel_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace cubetto
