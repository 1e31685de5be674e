#include "cubetto/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

namespace cubetto {
namespace {

std::string trimmed(const std::string& text) {
  auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return {};
  }
  auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::string expand_env(const std::string& value, int line_no) {
  std::string out;
  std::size_t i = 0;
  while (i < value.size()) {
    if (value[i] == '$' && i + 1 < value.size() && value[i + 1] == '{') {
      const auto close = value.find('}', i + 2);
      if (close == std::string::npos) {
        throw ConfigError("unterminated ${...} on line " + std::to_string(line_no));
      }
      const std::string name = value.substr(i + 2, close - i - 2);
      const char* resolved = std::getenv(name.c_str());
      if (resolved == nullptr) {
        throw ConfigError("environment variable " + name + " referenced on line " +
                          std::to_string(line_no) + " is not set");
      }
      out += resolved;
      i = close + 1;
    } else {
      out.push_back(value[i]);
      ++i;
    }
  }
  return out;
}

int parse_int(const std::string& value, const std::string& key, int line_no) {
  try {
    std::size_t consumed = 0;
    const int parsed = std::stoi(value, &consumed);
    if (consumed != value.size()) {
      throw std::invalid_argument(value);
    }
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError(key + " on line " + std::to_string(line_no) + " is not an integer: " +
                      value);
  }
}

double parse_double(const std::string& value, const std::string& key, int line_no) {
  try {
    std::size_t consumed = 0;
    const double parsed = std::stod(value, &consumed);
    if (consumed != value.size()) {
      throw std::invalid_argument(value);
    }
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError(key + " on line " + std::to_string(line_no) + " is not a number: " + value);
  }
}

std::string endpoint_override_var(const std::string& model_name) {
  std::string var = "CUBETTO_ENDPOINT_";
  for (char c : model_name) {
    var.push_back(std::isalnum(static_cast<unsigned char>(c))
                      ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                      : '_');
  }
  return var;
}

void require_exists(const std::filesystem::path& path, const std::string& key) {
  if (!path.empty() && !std::filesystem::exists(path)) {
    throw ConfigError(key + " path does not exist: " + path.string());
  }
}

}  // namespace

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string());
  }

  Config config;
  ModelSpec* current_model = nullptr;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trimmed(line);
    if (text.empty() || text[0] == '#' || text[0] == ';') {
      continue;
    }
    if (text == "[model]") {
      config.models.emplace_back();
      current_model = &config.models.back();
      continue;
    }
    if (text.front() == '[') {
      throw ConfigError("unknown section " + text + " on line " + std::to_string(line_no));
    }

    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key = value on line " + std::to_string(line_no));
    }
    const std::string key = trimmed(text.substr(0, eq));
    const std::string value = expand_env(trimmed(text.substr(eq + 1)), line_no);
    if (key.empty()) {
      throw ConfigError("empty key on line " + std::to_string(line_no));
    }

    if (current_model != nullptr) {
      if (key == "name") {
        current_model->name = value;
      } else if (key == "endpoint") {
        current_model->endpoint = value;
      } else if (key == "max_response_tokens") {
        current_model->max_response_tokens = parse_int(value, key, line_no);
      } else if (key == "temperature") {
        current_model->temperature = parse_double(value, key, line_no);
      } else if (key == "seed") {
        current_model->seed = parse_int(value, key, line_no);
      } else if (key == "parallelism") {
        current_model->parallelism = parse_int(value, key, line_no);
      } else {
        throw ConfigError("unknown model key " + key + " on line " + std::to_string(line_no));
      }
      continue;
    }

    if (key == "template") {
      config.template_path = value;
    } else if (key == "presets") {
      config.presets_path = value;
    } else if (key == "lexicon") {
      config.lexicon_path = value;
    } else if (key == "archive") {
      config.archive_root = value;
    } else if (key == "length_limit") {
      config.length_limit = parse_int(value, key, line_no);
    } else if (key == "program_capacity") {
      config.program_capacity = parse_int(value, key, line_no);
    } else if (key == "board_width") {
      config.board_width = parse_int(value, key, line_no);
    } else if (key == "board_height") {
      config.board_height = parse_int(value, key, line_no);
    } else {
      throw ConfigError("unknown key " + key + " on line " + std::to_string(line_no));
    }
  }

  for (ModelSpec& model : config.models) {
    if (model.name.empty()) {
      throw ConfigError("every [model] section needs a name");
    }
    if (const char* endpoint = std::getenv(endpoint_override_var(model.name).c_str())) {
      model.endpoint = endpoint;
    }
    try {
      model.validate();
    } catch (const std::invalid_argument& ex) {
      throw ConfigError("model " + model.name + ": " + ex.what());
    }
  }

  require_exists(config.template_path, "template");
  require_exists(config.presets_path, "presets");
  require_exists(config.lexicon_path, "lexicon");

  if (config.length_limit < 1 || config.program_capacity < 1 || config.board_width < 1 ||
      config.board_height < 1) {
    throw ConfigError("limits and board dimensions must be positive");
  }
  return config;
}

}  // namespace cubetto
