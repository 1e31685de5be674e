#pragma once

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cubetto/blocklang.hpp"

namespace testsupport {

inline std::filesystem::path source_dir() { return CUBETTO_SOURCE_DIR; }
inline std::filesystem::path fixture_dir() { return source_dir() / "tests" / "fixtures"; }
inline std::filesystem::path data_dir() { return source_dir() / "data"; }
inline std::string cli_path() { return CUBETTO_CLI_PATH; }

/// Unique directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("cubetto-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

/// Runs the built CLI with the given argument string through the shell.
inline CliResult run_cli(const std::string& args) {
  const std::string command = cli_path() + " " + args + " 2>&1";
  CliResult result;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) {
    return result;
  }
  std::array<char, 4096> chunk{};
  std::size_t got = 0;
  while ((got = ::fread(chunk.data(), 1, chunk.size(), pipe)) > 0) {
    result.output.append(chunk.data(), got);
  }
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline cubetto::Program random_program(std::mt19937& rng, int max_len) {
  std::uniform_int_distribution<int> len_dist(0, max_len);
  std::uniform_int_distribution<int> cmd_dist(0, 2);
  cubetto::Program program;
  const int length = len_dist(rng);
  program.commands.reserve(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) {
    program.commands.push_back(static_cast<cubetto::Command>(cmd_dist(rng)));
  }
  return program;
}

/// Deterministic five-model replay corpus mirroring the experiment's shape.
inline std::vector<std::string> replay_model_names() {
  return {"Meta-Llama-3.1-8B-Instruct", "Mistral-7B-Instruct-v0.3", "OLMo-2-1124-7B-Instruct",
          "Qwen2.5-7B-Instruct", "gemma-2-9b-it"};
}

inline std::string canned_scenario(const std::string& model, int preset, int round) {
  std::ostringstream out;
  out << "# Story time with " << model << "\n\n";
  out << "Objective: reach square " << preset << " of round " << round << " with Cubetto.\n\n";
  out << "Materials: Cubetto robot, command blocks, control board, preset " << preset
      << " toys.\n\n";
  out << "Gameplay: the children place forward, turn left and turn right on the control "
         "board, press go, and cheer when the robot arrives.\n";
  return out.str();
}

inline void write_replay_corpus(const std::filesystem::path& root, int presets, int rounds) {
  for (const std::string& model : replay_model_names()) {
    for (int preset = 1; preset <= presets; ++preset) {
      for (int round = 1; round <= rounds; ++round) {
        write_file(root / model / (std::to_string(preset) + "-" + std::to_string(round) + ".txt"),
                   canned_scenario(model, preset, round));
      }
    }
  }
}

}  // namespace testsupport
