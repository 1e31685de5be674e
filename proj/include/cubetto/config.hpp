#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubetto/gateway.hpp"

namespace cubetto {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Toolkit configuration: a flat key = value file with repeatable [model]
/// sections. Values may reference environment variables as ${NAME}, and
/// CUBETTO_ENDPOINT_<MODEL-NAME> (uppercased, non-alphanumerics as _)
/// overrides that model's endpoint at load time.
struct Config {
  std::filesystem::path template_path;  // empty -> built-in template
  std::filesystem::path presets_path;   // empty -> built-in rows
  std::filesystem::path lexicon_path;   // empty -> built-in lexicon
  std::filesystem::path archive_root = "archive";
  int length_limit = 1800;
  int program_capacity = 12;
  int board_width = 6;
  int board_height = 6;
  std::vector<ModelSpec> models;

  static Config defaults() { return {}; }
};

/// Parses and validates a config file. Referenced paths must exist;
/// violations throw ConfigError.
Config load_config(const std::filesystem::path& path);

}  // namespace cubetto
