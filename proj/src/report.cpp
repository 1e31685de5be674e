#include "cubetto/report.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cubetto {
namespace {

std::string sanitized_component(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    const bool safe = std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '_' ||
                      c == '.';
    out.push_back(safe ? c : '_');
  }
  return out.empty() ? std::string("model") : out;
}

std::string preset_stem(const std::optional<int>& preset_id) {
  return preset_id ? std::to_string(*preset_id) : std::string("adhoc");
}

std::string yaml_value(const std::string& value) {
  const bool needs_quotes =
      value.empty() || value.find_first_of(":#{}[]\"'\n") != std::string::npos ||
      std::isspace(static_cast<unsigned char>(value.front())) != 0 ||
      std::isspace(static_cast<unsigned char>(value.back())) != 0;
  if (!needs_quotes) {
    return value;
  }
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"' || c == '\\') {
      quoted.push_back('\\');
    }
    quoted.push_back(c == '\n' ? ' ' : c);
  }
  quoted.push_back('"');
  return quoted;
}

struct RefKey {
  std::string model;
  std::string preset;
  int round;

  auto operator<=>(const RefKey&) const = default;
};

RefKey key_of(const GeneratedScenario& scenario) {
  return {scenario.model_name, preset_stem(scenario.preset_id), scenario.round};
}

RefKey key_of(const LintReport& report) {
  return {report.scenario.model_name, preset_stem(report.scenario.preset_id),
          report.scenario.round};
}

void write_file_if_changed(const std::filesystem::path& path, const std::string& content) {
  {
    std::ifstream existing(path, std::ios::binary);
    if (existing) {
      std::ostringstream current;
      current << existing.rdbuf();
      if (current.str() == content) {
        return;
      }
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ArchiveError("cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw ArchiveError("short write to " + path.string());
  }
}

struct FlagGlyph {
  char glyph;
  bool LintFlags::* member;
  const char* label;
};

constexpr FlagGlyph kGlyphs[] = {
    {'H', &LintFlags::hallucinated_command, "hallucinated command"},
    {'T', &LintFlags::truncated, "truncated"},
    {'L', &LintFlags::over_length, "over length"},
    {'B', &LintFlags::missing_materials, "materials incomplete"},
    {'G', &LintFlags::team_split, "team split"},
    {'M', &LintFlags::multi_robot, "multi robot"},
    {'R', &LintFlags::task_transformed, "task transformed"},
};

std::string flag_glyphs(const LintFlags& flags) {
  std::string out;
  for (const FlagGlyph& entry : kGlyphs) {
    if (flags.*(entry.member)) {
      out.push_back(entry.glyph);
    }
  }
  return out;
}

}  // namespace

std::filesystem::path scenario_relpath(const GeneratedScenario& scenario) {
  return std::filesystem::path("rounds") / ("round-" + std::to_string(scenario.round)) /
         sanitized_component(scenario.model_name) / (preset_stem(scenario.preset_id) + ".md");
}

std::filesystem::path teacher_doc_relpath(const GeneratedScenario& scenario) {
  return std::filesystem::path("teacher") / sanitized_component(scenario.model_name) /
         (preset_stem(scenario.preset_id) + "-" + std::to_string(scenario.round) + ".md");
}

std::string scenario_markdown(const GeneratedScenario& scenario) {
  std::ostringstream out;
  out << "---\n";
  out << "model: " << yaml_value(scenario.model_name) << "\n";
  out << "round: " << scenario.round << "\n";
  out << "preset: " << (scenario.preset_id ? std::to_string(*scenario.preset_id) : "null") << "\n";
  out << "narrative_world: " << yaml_value(scenario.params.narrative_world) << "\n";
  out << "subjects: " << yaml_value(scenario.params.subjects) << "\n";
  out << "task: " << yaml_value(scenario.params.task) << "\n";
  out << "finish_reason: " << yaml_value(finish_reason_label(scenario.finish_reason)) << "\n";
  out << "prompt_tokens: " << scenario.prompt_tokens << "\n";
  out << "completion_tokens: " << scenario.completion_tokens << "\n";
  out << "created_at: " << format_timestamp_utc(scenario.created_at) << "\n";
  out << "---\n\n";
  out << scenario.response_text;
  if (scenario.response_text.empty() || scenario.response_text.back() != '\n') {
    out << "\n";
  }
  return out.str();
}

ArchiveLayout write_archive(const std::vector<GeneratedScenario>& scenarios,
                            const std::vector<LintReport>& reports,
                            const std::filesystem::path& root) {
  std::map<RefKey, const LintReport*> report_by_key;
  for (const LintReport& report : reports) {
    if (!report_by_key.emplace(key_of(report), &report).second) {
      throw ArchiveError("duplicate lint report for one scenario");
    }
  }
  std::set<RefKey> scenario_keys;
  for (const GeneratedScenario& scenario : scenarios) {
    if (!scenario_keys.insert(key_of(scenario)).second) {
      throw ArchiveError("duplicate scenario for one (model, preset, round)");
    }
    if (!report_by_key.contains(key_of(scenario))) {
      throw ArchiveError("no lint report for scenario " + scenario.model_name + "/" +
                         preset_stem(scenario.preset_id) + " round " +
                         std::to_string(scenario.round));
    }
  }
  if (report_by_key.size() != scenarios.size()) {
    throw ArchiveError("lint reports do not match scenarios one-to-one");
  }

  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) {
    throw ArchiveError("cannot create archive root " + root.string() + ": " + ec.message());
  }

  // Stable write order keeps reruns byte-identical.
  std::vector<const GeneratedScenario*> ordered;
  ordered.reserve(scenarios.size());
  for (const GeneratedScenario& scenario : scenarios) {
    ordered.push_back(&scenario);
  }
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return key_of(*a) < key_of(*b);
  });

  ArchiveLayout layout;
  layout.root = root;
  for (const GeneratedScenario* scenario : ordered) {
    const std::filesystem::path md_path = root / scenario_relpath(*scenario);
    std::filesystem::create_directories(md_path.parent_path(), ec);
    if (ec) {
      throw ArchiveError("cannot create " + md_path.parent_path().string() + ": " + ec.message());
    }
    write_file_if_changed(md_path, scenario_markdown(*scenario));

    std::filesystem::path lint_path = md_path;
    lint_path.replace_extension();  // strip .md
    lint_path += ".lint.json";
    const LintReport& report = *report_by_key.at(key_of(*scenario));
    write_file_if_changed(lint_path, lint_report_to_json(report) + "\n");

    layout.scenario_files.push_back(md_path);
    layout.lint_files.push_back(lint_path);
  }
  return layout;
}

std::string comparison_matrix(const std::vector<LintReport>& reports) {
  std::set<std::string> models;
  std::set<std::string> columns;
  std::map<std::pair<std::string, std::string>, LintFlags> cells;

  auto column_of = [](const LintReport& report) {
    return report.scenario.preset_id ? std::to_string(*report.scenario.preset_id)
                                     : std::string("adhoc");
  };
  auto merge = [](LintFlags& into, const LintFlags& from) {
    into.hallucinated_command |= from.hallucinated_command;
    into.truncated |= from.truncated;
    into.over_length |= from.over_length;
    into.missing_materials |= from.missing_materials;
    into.team_split |= from.team_split;
    into.multi_robot |= from.multi_robot;
    into.task_transformed |= from.task_transformed;
  };

  for (const LintReport& report : reports) {
    models.insert(report.scenario.model_name);
    columns.insert(column_of(report));
    merge(cells[{report.scenario.model_name, column_of(report)}], report.flags);
  }

  // Numeric preset columns first, in numeric order.
  std::vector<std::string> ordered_columns(columns.begin(), columns.end());
  std::sort(ordered_columns.begin(), ordered_columns.end(), [](const auto& a, const auto& b) {
    const bool na = !a.empty() && std::isdigit(static_cast<unsigned char>(a[0]));
    const bool nb = !b.empty() && std::isdigit(static_cast<unsigned char>(b[0]));
    if (na != nb) {
      return na;
    }
    if (na && nb) {
      return std::stoi(a) < std::stoi(b);
    }
    return a < b;
  });

  std::ostringstream out;
  out << "| model |";
  for (const std::string& column : ordered_columns) {
    out << " " << column << " |";
  }
  out << "\n| --- |";
  for (std::size_t i = 0; i < ordered_columns.size(); ++i) {
    out << " --- |";
  }
  out << "\n";
  for (const std::string& model : models) {
    out << "| " << model << " |";
    for (const std::string& column : ordered_columns) {
      auto it = cells.find({model, column});
      out << " " << (it == cells.end() ? "" : flag_glyphs(it->second)) << " |";
    }
    out << "\n";
  }
  return out.str();
}

std::string teacher_doc(const GeneratedScenario& scenario, const LintReport& report) {
  std::vector<std::string> notes;
  std::set<std::string> covered_rules;
  for (const Finding& finding : report.findings) {
    if (finding.severity == Severity::Info) {
      continue;
    }
    if (finding.rule_id == kRuleHallucinatedCommand) {
      notes.push_back("The text mentions a \"" + finding.evidence +
                      "\" block, which Cubetto does not have. The only command blocks are "
                      "forward, turn left and turn right.");
    } else if (finding.rule_id == kRuleTruncated && !covered_rules.contains(kRuleTruncated)) {
      notes.push_back(
          "The ending is missing; the text was cut short. The suggested task is usually clear "
          "enough from what is here, so add your own closing.");
    } else if (finding.rule_id == kRuleOverLength) {
      notes.push_back("The description runs longer than requested; consider trimming it.");
    } else if (finding.rule_id == kRuleMissingMaterials) {
      notes.push_back("The materials list looks incomplete. A working setup needs the Cubetto "
                      "robot, the command blocks and the control board.");
    } else if (finding.rule_id == kRuleMultiRobot) {
      if (!covered_rules.contains(kRuleMultiRobot)) {
        notes.push_back("The activity assumes more than one Cubetto. With a single robot, let "
                        "teams take turns instead.");
      }
    } else if (finding.rule_id == kRuleTaskTransformed) {
      notes.push_back("The story drifts from the requested task (" + scenario.params.task +
                      ") toward a rescue plot. Steer it back if the original task matters.");
    } else {
      notes.push_back(finding.message);
    }
    covered_rules.insert(finding.rule_id);
  }

  std::ostringstream out;
  out << scenario.response_text;
  if (scenario.response_text.empty() || scenario.response_text.back() != '\n') {
    out << "\n";
  }
  out << "\n---\n";
  if (!notes.empty()) {
    out << "\n## Review notes\n\n";
    for (const std::string& note : notes) {
      out << "- " << note << "\n";
    }
  }
  out << "\n*This activity was generated automatically. Treat it as a starting point for your "
         "own ideas, not as a proof-read, ready-to-use lesson plan.*\n";
  return out.str();
}

}  // namespace cubetto
