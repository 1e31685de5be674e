#include "cubetto/lint.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

namespace cubetto {
namespace {

using json = nlohmann::json;

using Span = std::pair<std::size_t, std::size_t>;

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\'';
}

struct Word {
  std::string text;  // lowercased
  std::size_t offset;
  std::size_t length;
};

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < text.size() && is_word_char(text[i])) {
      ++i;
    }
    Word word;
    word.offset = begin;
    word.length = i - begin;
    word.text = to_lower(text.substr(begin, word.length));
    words.push_back(std::move(word));
  }
  return words;
}

Finding make_finding(std::string rule_id, Severity severity, std::string message) {
  Finding finding;
  finding.rule_id = std::move(rule_id);
  finding.severity = severity;
  finding.message = std::move(message);
  return finding;
}

Finding make_finding(std::string rule_id, Severity severity, std::string message,
                     std::string_view text, Span span) {
  Finding finding = make_finding(std::move(rule_id), severity, std::move(message));
  finding.span = span;
  finding.evidence = std::string(text.substr(span.first, span.second - span.first));
  return finding;
}

// All case-insensitive matches of `pattern` in `text`, as byte spans.
std::vector<Span> regex_spans(std::string_view text, const std::regex& pattern) {
  std::vector<Span> spans;
  auto begin = std::cregex_iterator(text.data(), text.data() + text.size(), pattern);
  for (auto it = begin; it != std::cregex_iterator(); ++it) {
    spans.emplace_back(static_cast<std::size_t>(it->position(0)),
                       static_cast<std::size_t>(it->position(0)) + it->length(0));
  }
  return spans;
}

// Merges spans from several patterns, dropping overlaps so one phrase is
// reported once.
std::vector<Span> merged_spans(std::string_view text, const std::vector<std::regex>& patterns) {
  std::vector<Span> all;
  for (const std::regex& pattern : patterns) {
    auto spans = regex_spans(text, pattern);
    all.insert(all.end(), spans.begin(), spans.end());
  }
  std::sort(all.begin(), all.end());
  std::vector<Span> kept;
  for (const Span& span : all) {
    if (!kept.empty() && span.first < kept.back().second) {
      continue;
    }
    kept.push_back(span);
  }
  return kept;
}

bool contains_word(std::string_view lower_text, const std::regex& pattern) {
  return std::regex_search(lower_text.begin(), lower_text.end(), pattern);
}

std::size_t count_code_points(std::string_view text) {
  std::size_t count = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++count;
    }
  }
  return count;
}

// ---- section scanning ------------------------------------------------

struct HeadingHit {
  Section section;
  Span heading;               // trimmed heading line
  std::size_t line_begin;     // raw line start
  std::size_t content_begin;  // after ':' when inline, else after the line
};

struct SectionKeywords {
  Section section;
  std::vector<std::string_view> keywords;
};

// Priority order: the more specific groups first so a heading lands in one
// section only.
const std::vector<SectionKeywords>& section_keywords() {
  static const std::vector<SectionKeywords> groups = {
      {Section::Outcomes,
       {"learning outcome", "outcome", "skills practised", "skills practiced", "what children learn",
        "learning benefits", "educational value"}},
      {Section::Materials,
       {"material", "you will need", "you'll need", "equipment", "supplies", "what you need",
        "required items"}},
      {Section::Variations, {"variation", "extension", "adaptation", "modification"}},
      {Section::Setup,
       {"setup", "set-up", "set up", "preparation", "preparatory", "before you begin",
        "before the game", "getting ready", "board layout"}},
      {Section::Gameplay,
       {"gameplay", "game play", "instructions", "how to play", "activity", "steps",
        "playing the game", "game flow", "procedure"}},
      {Section::Objective, {"objective", "goal", "aim", "purpose", "mission"}},
      {Section::Topic, {"topic", "theme", "scenario", "story", "setting", "title"}},
  };
  return groups;
}

std::optional<Section> classify_heading(std::string_view head) {
  const std::string lower = to_lower(head);
  for (const SectionKeywords& group : section_keywords()) {
    for (std::string_view keyword : group.keywords) {
      if (lower.find(keyword) != std::string::npos) {
        return group.section;
      }
    }
  }
  return std::nullopt;
}

std::vector<HeadingHit> scan_headings(std::string_view text) {
  std::vector<HeadingHit> hits;
  std::size_t line_begin = 0;
  while (line_begin <= text.size()) {
    std::size_t line_end = text.find('\n', line_begin);
    if (line_end == std::string_view::npos) {
      line_end = text.size();
    }
    const std::string_view line = text.substr(line_begin, line_end - line_begin);

    std::size_t b = 0;
    std::size_t e = line.size();
    while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;

    if (b < e) {
      std::size_t s = b;
      // Strip markdown heading/list decorations and bold markers.
      while (s < e && (line[s] == '#' || line[s] == '*' || line[s] == '-' || line[s] == '+' ||
                       line[s] == '_' || std::isspace(static_cast<unsigned char>(line[s])))) {
        ++s;
      }
      std::size_t digits = s;
      while (digits < e && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
      if (digits > s && digits < e && (line[digits] == '.' || line[digits] == ')')) {
        s = digits + 1;
        while (s < e && std::isspace(static_cast<unsigned char>(line[s]))) ++s;
      }
      std::size_t t = e;
      while (t > s && (line[t - 1] == '*' || line[t - 1] == '_' ||
                       std::isspace(static_cast<unsigned char>(line[t - 1])))) {
        --t;
      }

      if (s < t) {
        const std::size_t colon = line.find(':', s);
        const bool has_colon = colon != std::string_view::npos && colon < t;
        std::string_view head;
        if (has_colon) {
          head = line.substr(s, colon - s);
        } else {
          head = line.substr(s, t - s);
        }
        const char last = line[t - 1];
        const bool prose_ending = last == '.' || last == '!' || last == '?' || last == ',' ||
                                  last == ';';
        const bool candidate =
            !head.empty() && head.size() <= 80 && (has_colon || ((e - b) <= 60 && !prose_ending));
        if (candidate) {
          if (auto section = classify_heading(head)) {
            HeadingHit hit;
            hit.section = *section;
            hit.heading = {line_begin + b, line_begin + e};
            hit.line_begin = line_begin;
            hit.content_begin = has_colon ? line_begin + colon + 1
                                          : std::min(line_end + 1, text.size());
            hits.push_back(hit);
          }
        }
      }
    }

    if (line_end == text.size()) {
      break;
    }
    line_begin = line_end + 1;
  }
  return hits;
}

const std::regex& blocks_pattern() {
  static const std::regex pattern(R"(\bblocks?\b)", std::regex::icase);
  return pattern;
}
const std::regex& board_pattern() {
  static const std::regex pattern(R"(\bboard\b)", std::regex::icase);
  return pattern;
}
const std::regex& robot_pattern() {
  static const std::regex pattern(R"(\b(cubetto|robot)\b)", std::regex::icase);
  return pattern;
}

}  // namespace

const char* severity_name(Severity severity) {
  switch (severity) {
    case Severity::Error:
      return "error";
    case Severity::Warning:
      return "warning";
    case Severity::Info:
      return "info";
  }
  return "";
}

std::optional<Severity> severity_from_name(std::string_view name) {
  if (name == "error") return Severity::Error;
  if (name == "warning") return Severity::Warning;
  if (name == "info") return Severity::Info;
  return std::nullopt;
}

bool LintFlags::any() const {
  return hallucinated_command || truncated || over_length || missing_materials || team_split ||
         multi_robot || task_transformed;
}

const char* section_name(Section section) {
  switch (section) {
    case Section::Topic:
      return "topic";
    case Section::Objective:
      return "objective";
    case Section::Materials:
      return "materials";
    case Section::Setup:
      return "setup";
    case Section::Gameplay:
      return "gameplay";
    case Section::Outcomes:
      return "outcomes";
    case Section::Variations:
      return "variations";
  }
  return "";
}

std::optional<Section> section_from_name(std::string_view name) {
  for (Section section : kAllSections) {
    if (name == section_name(section)) {
      return section;
    }
  }
  return std::nullopt;
}

Lexicon default_lexicon() {
  return {{"backward", "backwards", "back", "move left", "move right", "jump", "stop", "function",
           "negation", "random"}};
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CatalogError("cannot open lexicon file: " + path.string());
  }
  Lexicon lexicon;
  std::string line;
  while (std::getline(in, line)) {
    auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
      continue;
    }
    auto end = line.find_last_not_of(" \t\r");
    std::string token = to_lower(line.substr(begin, end - begin + 1));
    if (token.empty() || token[0] == '#') {
      continue;
    }
    lexicon.illegal_tokens.push_back(std::move(token));
  }
  return lexicon;
}

std::vector<Finding> check_commands(std::string_view text, const Lexicon& lexicon) {
  // Lexicon entries as word sequences, longest first so "move left" beats
  // any single-word entry at the same position.
  std::vector<std::vector<std::string>> entries;
  for (const std::string& token : lexicon.illegal_tokens) {
    std::vector<std::string> entry;
    for (const Word& word : split_words(token)) {
      entry.push_back(word.text);
    }
    if (!entry.empty()) {
      entries.push_back(std::move(entry));
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.size() > b.size(); });

  const std::vector<Word> words = split_words(text);
  std::vector<Finding> findings;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t matched = 0;
    for (const auto& entry : entries) {
      if (i + entry.size() > words.size()) {
        continue;
      }
      bool all = true;
      for (std::size_t k = 0; k < entry.size(); ++k) {
        if (words[i + k].text != entry[k]) {
          all = false;
          break;
        }
      }
      if (all) {
        matched = entry.size();
        break;
      }
    }
    if (matched == 0) {
      ++i;
      continue;
    }
    // "left"/"right" stay legal right after "turn"/"rotate", whatever the
    // lexicon says.
    const bool bare_side = matched == 1 && (words[i].text == "left" || words[i].text == "right");
    if (bare_side && i > 0 && (words[i - 1].text == "turn" || words[i - 1].text == "rotate")) {
      ++i;
      continue;
    }
    const Word& first = words[i];
    const Word& last = words[i + matched - 1];
    const Span span{first.offset, last.offset + last.length};
    std::string evidence(text.substr(span.first, span.second - span.first));
    findings.push_back(make_finding(
        kRuleHallucinatedCommand, Severity::Error,
        "\"" + evidence + "\" is not a Cubetto command block; only forward, turn left and "
        "turn right exist",
        text, span));
    i += matched;
  }
  return findings;
}

std::vector<Finding> check_commands(std::string_view text) {
  return check_commands(text, default_lexicon());
}

std::vector<Finding> check_truncation(const GeneratedScenario& scenario) {
  std::vector<Finding> findings;
  const std::string_view text = scenario.response_text;

  if (scenario.finish_reason.kind == FinishReasonKind::Length) {
    findings.push_back(make_finding(kRuleTruncated, Severity::Error,
                                    "response was trimmed at the model's response token budget"));
    return findings;
  }
  if (scenario.finish_reason.kind != FinishReasonKind::Stop) {
    return findings;
  }

  const auto last = text.find_last_not_of(" \t\r\n");
  if (last == std::string_view::npos) {
    return findings;
  }
  static constexpr std::string_view kTerminal = ".!?:)\"";
  if (kTerminal.find(text[last]) != std::string_view::npos) {
    return findings;
  }

  // A final list item without punctuation is a normal ending.
  std::size_t line_begin = text.rfind('\n', last);
  line_begin = line_begin == std::string_view::npos ? 0 : line_begin + 1;
  std::size_t b = line_begin;
  while (b <= last && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  const std::string_view line = text.substr(b, last - b + 1);
  const bool bullet = !line.empty() && (line[0] == '-' || line[0] == '*' || line[0] == '+');
  bool numbered = false;
  if (!bullet && !line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) {
    std::size_t d = 0;
    while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
    numbered = d < line.size() && (line[d] == '.' || line[d] == ')');
  }
  if (bullet || numbered) {
    return findings;
  }

  findings.push_back(make_finding(kRuleTruncated, Severity::Warning,
                                  "text ends abruptly without terminal punctuation", text,
                                  Span{b, last + 1}));
  return findings;
}

std::vector<Finding> check_length(std::string_view text, int limit_chars) {
  std::vector<Finding> findings;
  const std::size_t count = count_code_points(text);
  if (count > static_cast<std::size_t>(limit_chars)) {
    findings.push_back(make_finding(
        kRuleOverLength, Severity::Warning,
        "description is " + std::to_string(count) + " characters long, over the limit of " +
            std::to_string(limit_chars)));
  }
  return findings;
}

SectionScan check_sections(std::string_view text) {
  SectionScan scan;
  for (const HeadingHit& hit : scan_headings(text)) {
    scan.detected.insert(hit.section);
  }
  for (Section section : kAllSections) {
    if (!scan.detected.contains(section)) {
      scan.findings.push_back(make_finding(
          kRuleMissingSection, Severity::Info,
          std::string("no ") + section_name(section) + " section detected"));
    }
  }
  return scan;
}

std::vector<Finding> check_materials(std::string_view text) {
  std::vector<Finding> findings;
  const std::vector<HeadingHit> hits = scan_headings(text);
  const HeadingHit* materials = nullptr;
  for (const HeadingHit& hit : hits) {
    if (hit.section == Section::Materials) {
      materials = &hit;
      break;
    }
  }
  if (materials == nullptr) {
    return findings;  // section absence is check_sections' business
  }

  std::size_t content_end = text.size();
  for (const HeadingHit& hit : hits) {
    if (hit.line_begin > materials->line_begin) {
      content_end = std::min(content_end, hit.line_begin);
    }
  }
  const std::string_view content =
      text.substr(materials->content_begin,
                  content_end - std::min(content_end, materials->content_begin));

  const std::string lower = to_lower(content);
  const bool blocks = contains_word(lower, blocks_pattern());
  const bool board = contains_word(lower, board_pattern());
  const bool robot = contains_word(lower, robot_pattern());

  std::string missing;
  if (blocks && !board) {
    missing = "the command blocks are listed but the control board is missing";
  } else if (board && !blocks) {
    missing = "the control board is listed but the command blocks are missing";
  } else if (robot && !blocks && !board) {
    missing = "the robot is listed without its command blocks and control board";
  }
  if (!missing.empty()) {
    findings.push_back(make_finding(kRuleMissingMaterials, Severity::Warning,
                                    "materials list looks incomplete: " + missing, text,
                                    materials->heading));
  }
  return findings;
}

std::vector<Finding> check_team_split(std::string_view text) {
  static const std::vector<std::regex> patterns = {
      std::regex(R"(\b(divide|divides|divided|dividing|split|splits|splitting)\b[^.!?\n]{0,64}?\b(teams?|groups?)\b)",
                 std::regex::icase),
      std::regex(R"(\bin (teams|groups) of\b)", std::regex::icase),
  };
  std::vector<Finding> findings;
  for (const Span& span : merged_spans(text, patterns)) {
    findings.push_back(make_finding(kRuleTeamSplit, Severity::Info,
                                    "suggests dividing the children into teams", text, span));
  }
  return findings;
}

std::vector<Finding> check_multi_robot(std::string_view text) {
  static const std::vector<std::regex> patterns = {
      std::regex(R"(\beach (team|group|child|pair|player)('s)?[^.!?\n]{0,48}?\b(cubetto|robot)s?\b)",
                 std::regex::icase),
      std::regex(R"(\b(a|one) (cubetto|robot) (for|per) each\b)", std::regex::icase),
      std::regex(R"(\b(two|three|four|five|six|\d+) (cubettos|robots)\b)", std::regex::icase),
      std::regex(R"(\b(multiple|several) (cubettos?|robots?)\b)", std::regex::icase),
      std::regex(R"(\bcubettos\b)", std::regex::icase),
  };
  std::vector<Finding> findings;
  for (const Span& span : merged_spans(text, patterns)) {
    findings.push_back(make_finding(kRuleMultiRobot, Severity::Warning,
                                    "assumes more than one Cubetto robot", text, span));
  }
  return findings;
}

std::vector<Finding> check_task_fidelity(const ScenarioParams& params, std::string_view text) {
  std::vector<Finding> findings;
  const std::string task = to_lower(params.task);
  if (task.find("pursuit") == std::string::npos && task.find("struggle") == std::string::npos) {
    return findings;
  }

  static const std::regex rescue(R"(\b(rescue|rescues|rescued|rescuing|save the|saving the)\b)",
                                 std::regex::icase);
  static const std::regex original(
      R"(\b(chase|chases|chased|chasing|pursue|pursues|pursued|pursuing|pursuit|catch|catches|catching|caught|battle|battles|battling|struggle|struggles|struggling)\b)",
      std::regex::icase);

  const auto rescue_spans = regex_spans(text, rescue);
  if (rescue_spans.empty()) {
    return findings;
  }
  if (std::regex_search(text.begin(), text.end(), original)) {
    return findings;
  }
  findings.push_back(make_finding(
      kRuleTaskTransformed, Severity::Warning,
      "the requested task (" + params.task + ") drifted into a rescue plot", text,
      rescue_spans.front()));
  return findings;
}

LintReport lint(const GeneratedScenario& scenario, const LintOptions& options) {
  LintReport report;
  report.scenario = {scenario.model_name, scenario.preset_id, scenario.params, scenario.round};

  const std::string_view text = scenario.response_text;
  auto absorb = [&report](std::vector<Finding> findings) {
    for (Finding& finding : findings) {
      report.findings.push_back(std::move(finding));
    }
  };

  absorb(check_commands(text, options.lexicon));
  absorb(check_truncation(scenario));
  absorb(check_length(text, options.length_limit));
  SectionScan scan = check_sections(text);
  report.sections_detected = scan.detected;
  absorb(std::move(scan.findings));
  absorb(check_materials(text));
  absorb(check_team_split(text));
  absorb(check_multi_robot(text));
  absorb(check_task_fidelity(scenario.params, text));

  for (const Finding& finding : report.findings) {
    if (finding.rule_id == kRuleHallucinatedCommand) report.flags.hallucinated_command = true;
    if (finding.rule_id == kRuleTruncated) report.flags.truncated = true;
    if (finding.rule_id == kRuleOverLength) report.flags.over_length = true;
    if (finding.rule_id == kRuleMissingMaterials) report.flags.missing_materials = true;
    if (finding.rule_id == kRuleTeamSplit) report.flags.team_split = true;
    if (finding.rule_id == kRuleMultiRobot) report.flags.multi_robot = true;
    if (finding.rule_id == kRuleTaskTransformed) report.flags.task_transformed = true;
  }
  return report;
}

std::string lint_report_to_json(const LintReport& report, int indent) {
  json out;
  json ref;
  ref["model_name"] = report.scenario.model_name;
  ref["preset_id"] = report.scenario.preset_id ? json(*report.scenario.preset_id) : json(nullptr);
  ref["round"] = report.scenario.round;
  ref["params"] = {{"narrative_world", report.scenario.params.narrative_world},
                   {"subjects", report.scenario.params.subjects},
                   {"task", report.scenario.params.task}};
  out["scenario_ref"] = std::move(ref);

  json findings = json::array();
  for (const Finding& finding : report.findings) {
    json entry;
    entry["rule_id"] = finding.rule_id;
    entry["severity"] = severity_name(finding.severity);
    entry["span"] = finding.span ? json::array({finding.span->first, finding.span->second})
                                 : json(nullptr);
    entry["message"] = finding.message;
    entry["evidence"] = finding.evidence;
    findings.push_back(std::move(entry));
  }
  out["findings"] = std::move(findings);

  out["flags"] = {{"hallucinated_command", report.flags.hallucinated_command},
                  {"truncated", report.flags.truncated},
                  {"over_length", report.flags.over_length},
                  {"missing_materials", report.flags.missing_materials},
                  {"team_split", report.flags.team_split},
                  {"multi_robot", report.flags.multi_robot},
                  {"task_transformed", report.flags.task_transformed}};

  json sections = json::array();
  for (Section section : kAllSections) {
    if (report.sections_detected.contains(section)) {
      sections.push_back(section_name(section));
    }
  }
  out["sections_detected"] = std::move(sections);
  return out.dump(indent);
}

LintReport lint_report_from_json(const std::string& json_text) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw CatalogError(std::string("lint report is not valid JSON: ") + ex.what());
  }

  LintReport report;
  try {
    const json& ref = parsed.at("scenario_ref");
    report.scenario.model_name = ref.at("model_name").get<std::string>();
    if (ref.contains("preset_id") && !ref.at("preset_id").is_null()) {
      report.scenario.preset_id = ref.at("preset_id").get<int>();
    }
    report.scenario.round = ref.value("round", 1);
    if (ref.contains("params")) {
      const json& params = ref.at("params");
      report.scenario.params.narrative_world = params.value("narrative_world", "");
      report.scenario.params.subjects = params.value("subjects", "");
      report.scenario.params.task = params.value("task", "");
    }

    for (const json& entry : parsed.at("findings")) {
      Finding finding;
      finding.rule_id = entry.at("rule_id").get<std::string>();
      auto severity = severity_from_name(entry.at("severity").get<std::string>());
      if (!severity) {
        throw CatalogError("unknown severity in lint report");
      }
      finding.severity = *severity;
      if (entry.contains("span") && !entry.at("span").is_null()) {
        finding.span = {entry.at("span").at(0).get<std::size_t>(),
                        entry.at("span").at(1).get<std::size_t>()};
      }
      finding.message = entry.value("message", "");
      finding.evidence = entry.value("evidence", "");
      report.findings.push_back(std::move(finding));
    }

    const json& flags = parsed.at("flags");
    report.flags.hallucinated_command = flags.value("hallucinated_command", false);
    report.flags.truncated = flags.value("truncated", false);
    report.flags.over_length = flags.value("over_length", false);
    report.flags.missing_materials = flags.value("missing_materials", false);
    report.flags.team_split = flags.value("team_split", false);
    report.flags.multi_robot = flags.value("multi_robot", false);
    report.flags.task_transformed = flags.value("task_transformed", false);

    for (const json& name : parsed.at("sections_detected")) {
      if (auto section = section_from_name(name.get<std::string>())) {
        report.sections_detected.insert(*section);
      }
    }
  } catch (const json::exception& ex) {
    throw CatalogError(std::string("malformed lint report: ") + ex.what());
  }
  return report;
}

}  // namespace cubetto
