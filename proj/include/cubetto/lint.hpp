#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cubetto/catalog.hpp"
#include "cubetto/gateway.hpp"

namespace cubetto {

enum class Severity { Error, Warning, Info };

const char* severity_name(Severity severity);
std::optional<Severity> severity_from_name(std::string_view name);

// Rule ids double as the report's flag names.
inline constexpr const char* kRuleHallucinatedCommand = "hallucinated_command";
inline constexpr const char* kRuleTruncated = "truncated";
inline constexpr const char* kRuleOverLength = "over_length";
inline constexpr const char* kRuleMissingMaterials = "missing_materials";
inline constexpr const char* kRuleTeamSplit = "team_split";
inline constexpr const char* kRuleMultiRobot = "multi_robot";
inline constexpr const char* kRuleTaskTransformed = "task_transformed";
inline constexpr const char* kRuleMissingSection = "missing_section";

struct Finding {
  std::string rule_id;
  Severity severity = Severity::Info;
  std::optional<std::pair<std::size_t, std::size_t>> span;  // [begin, end) bytes
  std::string message;
  std::string evidence;  // equals the span slice of the linted text
};

struct LintFlags {
  bool hallucinated_command = false;
  bool truncated = false;
  bool over_length = false;
  bool missing_materials = false;
  bool team_split = false;
  bool multi_robot = false;
  bool task_transformed = false;

  bool operator==(const LintFlags&) const = default;
  bool any() const;
};

/// The seven sections generated scenarios typically carry.
enum class Section { Topic, Objective, Materials, Setup, Gameplay, Outcomes, Variations };

inline constexpr Section kAllSections[] = {
    Section::Topic,   Section::Objective, Section::Materials, Section::Setup,
    Section::Gameplay, Section::Outcomes, Section::Variations};

const char* section_name(Section section);
std::optional<Section> section_from_name(std::string_view name);

struct ScenarioRef {
  std::string model_name;
  std::optional<int> preset_id;
  ScenarioParams params;
  int round = 1;
};

struct LintReport {
  ScenarioRef scenario;
  std::vector<Finding> findings;
  LintFlags flags;
  std::set<Section> sections_detected;
};

/// Command-like tokens that have no corresponding Cubetto block.
struct Lexicon {
  std::vector<std::string> illegal_tokens;  // lowercase words or short phrases
};

Lexicon default_lexicon();

/// One token per line; blank lines and lines starting with # are skipped.
Lexicon load_lexicon(const std::filesystem::path& path);

struct LintOptions {
  int length_limit = 1800;
  Lexicon lexicon = default_lexicon();
};

/// Error finding per lexicon token occurring as a whole word or phrase.
std::vector<Finding> check_commands(std::string_view text, const Lexicon& lexicon);
std::vector<Finding> check_commands(std::string_view text);

/// Error when the server trimmed the response; warning when a stop-finished
/// text still ends suspiciously (no terminal punctuation, not a list item).
std::vector<Finding> check_truncation(const GeneratedScenario& scenario);

/// Warning carrying the measured count when text exceeds limit_chars
/// (Unicode code points).
std::vector<Finding> check_length(std::string_view text, int limit_chars = 1800);

struct SectionScan {
  std::set<Section> detected;
  std::vector<Finding> findings;  // one info finding per absent section
};

/// Heading-keyword detection of the seven canonical sections.
SectionScan check_sections(std::string_view text);

/// Warning when a detected materials section lists blocks without the board,
/// the board without blocks, or the robot without either.
std::vector<Finding> check_materials(std::string_view text);

/// Info finding per team-division phrasing.
std::vector<Finding> check_team_split(std::string_view text);

/// Warning per phrase implying more than one robot.
std::vector<Finding> check_multi_robot(std::string_view text);

/// Warning when a pursuit/struggle task drifted into a rescue plot.
std::vector<Finding> check_task_fidelity(const ScenarioParams& params, std::string_view text);

/// Runs every rule and aggregates findings, flags and detected sections.
LintReport lint(const GeneratedScenario& scenario, const LintOptions& options = {});

std::string lint_report_to_json(const LintReport& report, int indent = 2);
LintReport lint_report_from_json(const std::string& json_text);

}  // namespace cubetto
