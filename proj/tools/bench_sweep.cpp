// Compares the serial reference sweep with the OpenMP one on the same board
// family and reports timings plus the shared verification stats.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>

#include "cubetto/sweep.hpp"

namespace {

double run_timed(cubetto::SweepStats (*sweep)(const cubetto::SweepOptions&),
                 const cubetto::SweepOptions& options, cubetto::SweepStats& stats) {
  const auto start = std::chrono::steady_clock::now();
  stats = sweep(options);
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(end - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark the oracle-equivalence sweep"};
  cubetto::SweepOptions options;
  int repeats = 1;
  app.add_option("--width", options.width, "Board width");
  app.add_option("--height", options.height, "Board height");
  app.add_option("--max-obstacles", options.max_obstacles, "Largest obstacle count");
  app.add_option("--max-program-len", options.max_program_len, "Enumeration bound");
  app.add_option("--repeats", repeats, "Timed repetitions");
  CLI11_PARSE(app, argc, argv);

  std::printf("board %dx%d, obstacles <= %d, programs <= %d, OpenMP %s\n", options.width,
              options.height, options.max_obstacles, options.max_program_len,
              cubetto::sweep_parallel_enabled() ? "on" : "off");

  cubetto::SweepStats serial_stats;
  cubetto::SweepStats parallel_stats;
  double serial_best = 1e300;
  double parallel_best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    serial_best = std::min(
        serial_best, run_timed(cubetto::sweep_oracle_equivalence_serial, options, serial_stats));
    parallel_best =
        std::min(parallel_best,
                 run_timed(cubetto::sweep_oracle_equivalence_parallel, options, parallel_stats));
  }

  std::printf("serial:   %8.3f s  %s\n", serial_best, serial_stats.summary().c_str());
  std::printf("parallel: %8.3f s  %s\n", parallel_best, parallel_stats.summary().c_str());
  std::printf("speedup:  %8.2fx\n", serial_best / parallel_best);

  const bool agree = serial_stats.summary() == parallel_stats.summary();
  if (!agree) {
    std::printf("MISMATCH: serial and parallel sweeps disagree\n");
  }
  return serial_stats.clean() && parallel_stats.clean() && agree ? 0 : 1;
}
