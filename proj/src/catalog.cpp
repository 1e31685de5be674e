#include "cubetto/catalog.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace cubetto {
namespace {

using json = nlohmann::json;

constexpr std::string_view kPlaceholders[] = {kWorldPlaceholder, kSubjectsPlaceholder,
                                              kTaskPlaceholder};

std::string trimmed(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) {
    return {};
  }
  auto end = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(begin, end - begin + 1));
}

std::string read_text_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CatalogError(std::string("cannot open ") + what + " file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string char_limit_sentence(int n) {
  return "The description should be at most " + std::to_string(n) + " characters long.";
}

const std::string& field_for(const ScenarioParams& params, std::string_view placeholder) {
  if (placeholder == kWorldPlaceholder) return params.narrative_world;
  if (placeholder == kSubjectsPlaceholder) return params.subjects;
  return params.task;
}

}  // namespace

void ScenarioParams::validate() const {
  const std::pair<const char*, const std::string*> fields[] = {
      {"narrative_world", &narrative_world}, {"subjects", &subjects}, {"task", &task}};
  for (const auto& [name, value] : fields) {
    if (trimmed(*value).empty()) {
      throw ParamsError(std::string(name) + " must not be empty");
    }
    if (value->find('{') != std::string::npos || value->find('}') != std::string::npos) {
      throw ParamsError(std::string(name) + " must not contain '{' or '}'");
    }
  }
}

TemplateVariant TemplateVariant::char_limit(int n) {
  if (n <= 0) {
    throw TemplateError("char-limit variant requires a positive limit");
  }
  return {Kind::CharLimit, n};
}

void PromptTemplate::validate() const {
  int counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '}') {
      throw TemplateError("stray '}' at offset " + std::to_string(i));
    }
    if (c != '{') {
      continue;
    }
    auto close = body.find('}', i);
    if (close == std::string::npos) {
      throw TemplateError("unterminated '{' at offset " + std::to_string(i));
    }
    std::string_view key(body.data() + i, close - i + 1);
    bool known = false;
    for (int k = 0; k < 3; ++k) {
      if (key == kPlaceholders[k]) {
        ++counts[k];
        known = true;
        break;
      }
    }
    if (!known) {
      throw TemplateError("unknown placeholder " + std::string(key));
    }
    i = close;
  }
  for (int k = 0; k < 3; ++k) {
    if (counts[k] == 0) {
      throw TemplateError("missing placeholder " + std::string(kPlaceholders[k]));
    }
    if (counts[k] > 1) {
      throw TemplateError("duplicated placeholder " + std::string(kPlaceholders[k]));
    }
  }
  if (variant.kind == TemplateVariant::Kind::CharLimit && variant.limit <= 0) {
    throw TemplateError("char-limit variant requires a positive limit");
  }
}

PromptTemplate standard_template(TemplateVariant variant) {
  PromptTemplate tmpl;
  tmpl.body =
      "Suggest to a teacher a game with the Cubetto tangible programming toy for "
      "preschool children. It should be about {narrative world}, involve {subjects} "
      "and children should use Cubetto to {task}. Only three Cubetto command blocks "
      "should be used: forward, turn left and turn right. The description should be "
      "about half a page long.";
  tmpl.variant = variant;
  return tmpl;
}

PromptTemplate load_template(const std::filesystem::path& path, TemplateVariant variant) {
  PromptTemplate tmpl;
  tmpl.body = trimmed(read_text_file(path, "template"));
  tmpl.variant = variant;
  tmpl.validate();
  return tmpl;
}

std::string render_prompt(const PromptTemplate& tmpl, const ScenarioParams& params) {
  tmpl.validate();
  params.validate();

  std::string text = tmpl.body;
  if (tmpl.variant.kind == TemplateVariant::Kind::CharLimit) {
    const std::string sentence = char_limit_sentence(tmpl.variant.limit);
    auto at = text.find(kHalfPageSentence);
    if (at != std::string::npos) {
      text.replace(at, kHalfPageSentence.size(), sentence);
    } else {
      text += " " + sentence;
    }
  }

  for (std::string_view placeholder : kPlaceholders) {
    auto at = text.find(placeholder);
    text.replace(at, placeholder.size(), field_for(params, placeholder));
  }

  if (text.find('{') != std::string::npos || text.find('}') != std::string::npos) {
    throw TemplateError("rendered prompt still contains placeholder delimiters");
  }
  return text;
}

std::vector<PresetRow> list_presets() {
  return {
      {1, {"knights and princesses", "Barbie dolls", "enact a pursuit"}},
      {2, {"pirates", "Lego figures", "find a treasure"}},
      {3, {"superheroes", "Hot Wheels cars", "enact a struggle"}},
      {4, {"Wild West", "Brio trains", "rescue someone"}},
  };
}

std::vector<PresetRow> load_presets(const std::filesystem::path& path) {
  const std::string text = read_text_file(path, "preset");
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::exception& ex) {
    throw CatalogError("preset catalog " + path.string() + " is not valid JSON: " + ex.what());
  }
  if (!parsed.is_array()) {
    throw CatalogError("preset catalog must be a JSON array");
  }
  std::vector<PresetRow> rows;
  rows.reserve(parsed.size());
  for (const auto& entry : parsed) {
    if (!entry.is_object()) {
      throw CatalogError("preset entries must be JSON objects");
    }
    PresetRow row;
    try {
      row.id = entry.at("id").get<int>();
      row.params.narrative_world = entry.at("narrative_world").get<std::string>();
      row.params.subjects = entry.at("subjects").get<std::string>();
      row.params.task = entry.at("task").get<std::string>();
    } catch (const json::exception& ex) {
      throw CatalogError(std::string("malformed preset entry: ") + ex.what());
    }
    row.params.validate();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ScenarioParams> permute(const std::vector<std::string>& worlds,
                                    const std::vector<std::string>& subjects,
                                    const std::vector<std::string>& tasks) {
  const std::pair<const char*, const std::vector<std::string>*> dims[] = {
      {"worlds", &worlds}, {"subjects", &subjects}, {"tasks", &tasks}};
  for (const auto& [name, values] : dims) {
    if (values->empty()) {
      throw std::invalid_argument(std::string("empty dimension: ") + name);
    }
    if (std::any_of(values->begin(), values->end(),
                    [](const std::string& v) { return trimmed(v).empty(); })) {
      throw std::invalid_argument(std::string("empty element in dimension: ") + name);
    }
  }

  std::vector<ScenarioParams> result;
  result.reserve(worlds.size() * subjects.size() * tasks.size());
  for (const auto& world : worlds) {
    for (const auto& subject : subjects) {
      for (const auto& task : tasks) {
        result.push_back({world, subject, task});
      }
    }
  }
  return result;
}

}  // namespace cubetto
