#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cubetto {

/// The three personalisation slots of the story prompt.
struct ScenarioParams {
  std::string narrative_world;
  std::string subjects;
  std::string task;

  bool operator==(const ScenarioParams&) const = default;

  /// Throws ParamsError unless every field is non-empty after trimming
  /// and free of the placeholder delimiters `{` `}`.
  void validate() const;
};

struct ParamsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TemplateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File or format problems in the shipped catalog data.
struct CatalogError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Length instruction attached to a template: the default wording, an
/// explicit half-page request, or a hard character limit.
struct TemplateVariant {
  enum class Kind { Standard, HalfPage, CharLimit };

  Kind kind = Kind::Standard;
  int limit = 0;  // > 0 iff kind == CharLimit

  static TemplateVariant standard() { return {Kind::Standard, 0}; }
  static TemplateVariant half_page() { return {Kind::HalfPage, 0}; }
  static TemplateVariant char_limit(int n);

  bool operator==(const TemplateVariant&) const = default;
};

inline constexpr std::string_view kWorldPlaceholder = "{narrative world}";
inline constexpr std::string_view kSubjectsPlaceholder = "{subjects}";
inline constexpr std::string_view kTaskPlaceholder = "{task}";

/// The sentence the char-limit variant swaps out.
inline constexpr std::string_view kHalfPageSentence =
    "The description should be about half a page long.";

struct PromptTemplate {
  std::string body;
  TemplateVariant variant = TemplateVariant::standard();

  /// Throws TemplateError unless each of the three placeholders occurs
  /// exactly once and no other braces appear in the body.
  void validate() const;
};

/// The built-in prompt, identical to the shipped data/templates/standard.txt.
PromptTemplate standard_template(TemplateVariant variant = TemplateVariant::standard());

/// Reads a one-template-per-file UTF-8 template body.
PromptTemplate load_template(const std::filesystem::path& path,
                             TemplateVariant variant = TemplateVariant::standard());

/// Substitutes the three placeholders and applies the variant's length
/// sentence. Deterministic; output never contains `{` or `}`.
std::string render_prompt(const PromptTemplate& tmpl, const ScenarioParams& params);

/// One row of the shipped four-row story catalog.
struct PresetRow {
  int id = 0;
  ScenarioParams params;

  bool operator==(const PresetRow&) const = default;
};

/// The four built-in rows (ids 1..4), identical to data/presets.json.
std::vector<PresetRow> list_presets();

/// Loads a preset catalog: a JSON array of objects with keys
/// `id`, `narrative_world`, `subjects`, `task`.
std::vector<PresetRow> load_presets(const std::filesystem::path& path);

/// Full cross product, world-major then subject then task.
/// Throws std::invalid_argument when any dimension is empty.
std::vector<ScenarioParams> permute(const std::vector<std::string>& worlds,
                                    const std::vector<std::string>& subjects,
                                    const std::vector<std::string>& tasks);

}  // namespace cubetto
