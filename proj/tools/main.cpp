#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cubetto/blocklang.hpp"
#include "cubetto/catalog.hpp"
#include "cubetto/config.hpp"
#include "cubetto/gateway.hpp"
#include "cubetto/lint.hpp"
#include "cubetto/report.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using namespace cubetto;

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

struct GlobalOptions {
  std::string config_path;
  std::string replay_dir;
  bool json_output = false;
};

struct Toolkit {
  Config config;
  std::unique_ptr<CompletionBackend> backend;  // set for generate/batch
  std::vector<PresetRow> presets;
  PromptTemplate tmpl;
  LintOptions lint_options;
};

int usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return kUsage;
}

int failure(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return kFailure;
}

Toolkit open_toolkit(const GlobalOptions& opts) {
  Toolkit kit;
  kit.config = opts.config_path.empty() ? Config::defaults() : load_config(opts.config_path);
  kit.presets = kit.config.presets_path.empty() ? list_presets()
                                                : load_presets(kit.config.presets_path);
  kit.tmpl = kit.config.template_path.empty() ? standard_template()
                                              : load_template(kit.config.template_path);
  kit.lint_options.length_limit = kit.config.length_limit;
  if (!kit.config.lexicon_path.empty()) {
    kit.lint_options.lexicon = load_lexicon(kit.config.lexicon_path);
  }
  return kit;
}

// Backend plus the model list effective for generation commands. With
// --replay and no configured models, specs are inferred from the replay
// directory layout.
void open_backend(Toolkit& kit, const GlobalOptions& opts) {
  if (!opts.replay_dir.empty()) {
    auto replay = std::make_unique<ReplayBackend>(opts.replay_dir);
    if (kit.config.models.empty()) {
      for (const std::string& name : replay->model_names()) {
        ModelSpec spec;
        spec.name = name;
        spec.endpoint = "replay";
        kit.config.models.push_back(std::move(spec));
      }
    }
    kit.backend = std::move(replay);
  } else {
    kit.backend = std::make_unique<HttpBackend>();
  }
}

std::string flags_summary(const LintFlags& flags) {
  std::string out;
  const std::pair<bool, char> glyphs[] = {
      {flags.hallucinated_command, 'H'}, {flags.truncated, 'T'},     {flags.over_length, 'L'},
      {flags.missing_materials, 'B'},    {flags.team_split, 'G'},    {flags.multi_robot, 'M'},
      {flags.task_transformed, 'R'},
  };
  for (const auto& [set, glyph] : glyphs) {
    if (set) {
      out.push_back(glyph);
    }
  }
  return out;
}

void write_text_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ArchiveError("cannot write " + path.string());
  }
  out << content;
}

// ---- presets ---------------------------------------------------------

int run_presets(const GlobalOptions& opts) {
  Toolkit kit = open_toolkit(opts);
  if (opts.json_output) {
    json out = json::array();
    for (const PresetRow& row : kit.presets) {
      out.push_back({{"id", row.id},
                     {"narrative_world", row.params.narrative_world},
                     {"subjects", row.params.subjects},
                     {"task", row.params.task}});
    }
    std::cout << out.dump(2) << "\n";
    return kOk;
  }

  std::size_t world_w = 15, subjects_w = 8, task_w = 4;
  for (const PresetRow& row : kit.presets) {
    world_w = std::max(world_w, row.params.narrative_world.size());
    subjects_w = std::max(subjects_w, row.params.subjects.size());
    task_w = std::max(task_w, row.params.task.size());
  }
  auto pad = [](const std::string& text, std::size_t width) {
    return text + std::string(width - text.size(), ' ');
  };
  std::cout << " id  " << pad("narrative world", world_w) << "  " << pad("subjects", subjects_w)
            << "  " << pad("task", task_w) << "\n";
  for (const PresetRow& row : kit.presets) {
    std::cout << "  " << row.id << "  " << pad(row.params.narrative_world, world_w) << "  "
              << pad(row.params.subjects, subjects_w) << "  " << pad(row.params.task, task_w)
              << "\n";
  }
  return kOk;
}

// ---- generate ----------------------------------------------------------

struct GenerateArgs {
  int preset = 0;
  std::string world;
  std::string subjects;
  std::string task;
  std::string model;
  int round = 1;
  int char_limit = 0;
};

int run_generate(const GlobalOptions& opts, const GenerateArgs& args) {
  Toolkit kit = open_toolkit(opts);
  open_backend(kit, opts);

  GenerationKey key;
  key.round = args.round;
  if (args.preset > 0) {
    if (!args.world.empty() || !args.subjects.empty() || !args.task.empty()) {
      return usage_error("--preset conflicts with --world/--subjects/--task");
    }
    auto row = std::find_if(kit.presets.begin(), kit.presets.end(),
                            [&](const PresetRow& r) { return r.id == args.preset; });
    if (row == kit.presets.end()) {
      return usage_error("unknown preset " + std::to_string(args.preset));
    }
    key.params = row->params;
    key.preset_id = row->id;
  } else {
    if (args.world.empty() || args.subjects.empty() || args.task.empty()) {
      return usage_error("provide --preset or all of --world, --subjects and --task");
    }
    key.params = {args.world, args.subjects, args.task};
  }
  if (args.round < 1) {
    return usage_error("--round must be at least 1");
  }

  if (kit.config.models.empty()) {
    return usage_error("no models configured; add [model] sections or use --replay");
  }
  const ModelSpec* spec = nullptr;
  if (!args.model.empty()) {
    auto it = std::find_if(kit.config.models.begin(), kit.config.models.end(),
                           [&](const ModelSpec& m) { return m.name == args.model; });
    if (it == kit.config.models.end()) {
      return usage_error("model " + args.model + " is not configured");
    }
    spec = &*it;
  } else if (kit.config.models.size() == 1) {
    spec = &kit.config.models.front();
  } else {
    return usage_error("several models configured; pick one with --model");
  }

  PromptTemplate tmpl = kit.tmpl;
  if (args.char_limit > 0) {
    tmpl.variant = TemplateVariant::char_limit(args.char_limit);
  }

  key.params.validate();
  const std::string prompt = render_prompt(tmpl, key.params);

  GeneratedScenario scenario;
  try {
    scenario = generate(*kit.backend, *spec, key, prompt);
  } catch (const GatewayError& ex) {
    return failure(ex.what());
  }

  const LintReport report = lint(scenario, kit.lint_options);
  const ArchiveLayout layout = write_archive({scenario}, {report}, kit.config.archive_root);
  const fs::path teacher_path = kit.config.archive_root / teacher_doc_relpath(scenario);
  write_text_file(teacher_path, teacher_doc(scenario, report));

  if (opts.json_output) {
    json out;
    out["model"] = scenario.model_name;
    out["preset"] = key.preset_id ? json(*key.preset_id) : json(nullptr);
    out["round"] = scenario.round;
    out["finish_reason"] = finish_reason_label(scenario.finish_reason);
    out["flags"] = flags_summary(report.flags);
    out["scenario_file"] = layout.scenario_files.front().string();
    out["lint_file"] = layout.lint_files.front().string();
    out["teacher_file"] = teacher_path.string();
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "model=" << scenario.model_name << " preset="
              << (key.preset_id ? std::to_string(*key.preset_id) : std::string("adhoc"))
              << " round=" << scenario.round
              << " finish=" << finish_reason_label(scenario.finish_reason) << " flags=["
              << flags_summary(report.flags) << "]\n";
    std::cout << "scenario: " << layout.scenario_files.front().string() << "\n";
    std::cout << "teacher doc: " << teacher_path.string() << "\n";
  }
  return kOk;
}

// ---- batch -------------------------------------------------------------

int run_batch_cmd(const GlobalOptions& opts, int rounds) {
  if (rounds < 1) {
    return usage_error("--rounds must be at least 1");
  }
  Toolkit kit = open_toolkit(opts);
  open_backend(kit, opts);
  if (kit.config.models.empty()) {
    return usage_error("no models configured; add [model] sections or use --replay");
  }

  std::vector<ScenarioParams> params_list;
  params_list.reserve(kit.presets.size());
  for (const PresetRow& row : kit.presets) {
    params_list.push_back(row.params);
  }

  const BatchResult result =
      run_batch(*kit.backend, kit.config.models, params_list, kit.tmpl, rounds);

  std::vector<LintReport> reports;
  reports.reserve(result.scenarios.size());
  for (const GeneratedScenario& scenario : result.scenarios) {
    reports.push_back(lint(scenario, kit.lint_options));
  }

  write_archive(result.scenarios, reports, kit.config.archive_root);
  const std::string matrix = comparison_matrix(reports);
  write_text_file(kit.config.archive_root / "matrix.md", matrix);

  if (!result.errors.empty()) {
    json failures = json::array();
    for (const BatchError& error : result.errors) {
      failures.push_back({{"model", error.model_name},
                          {"preset", error.preset_id ? json(*error.preset_id) : json(nullptr)},
                          {"round", error.round},
                          {"error", error.message}});
    }
    write_text_file(kit.config.archive_root / "failures.json", failures.dump(2) + "\n");
  }

  if (opts.json_output) {
    json out;
    out["scenarios"] = result.scenarios.size();
    out["errors"] = result.errors.size();
    out["archive"] = kit.config.archive_root.string();
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "archived " << result.scenarios.size() << " scenarios ("
              << result.errors.size() << " errors) under " << kit.config.archive_root.string()
              << "\n";
    std::cout << matrix;
    if (!result.errors.empty()) {
      std::cout << "failures listed in "
                << (kit.config.archive_root / "failures.json").string() << "\n";
    }
  }
  return result.errors.empty() ? kOk : kFailure;
}

// ---- lint --------------------------------------------------------------

int run_lint(const GlobalOptions& opts, const std::string& file, const std::string& finish,
             int preset) {
  Toolkit kit = open_toolkit(opts);

  std::ifstream in(file, std::ios::binary);
  if (!in) {
    return usage_error("cannot read " + file);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();

  GeneratedScenario scenario;
  scenario.model_name = "file";
  scenario.response_text = buffer.str();
  scenario.round = 1;
  if (finish == "length") {
    scenario.finish_reason = FinishReason::length();
  } else if (finish == "stop") {
    scenario.finish_reason = FinishReason::stop();
  } else {
    scenario.finish_reason = FinishReason::other(finish);
  }
  if (preset > 0) {
    auto row = std::find_if(kit.presets.begin(), kit.presets.end(),
                            [&](const PresetRow& r) { return r.id == preset; });
    if (row == kit.presets.end()) {
      return usage_error("unknown preset " + std::to_string(preset));
    }
    scenario.params = row->params;
    scenario.preset_id = row->id;
  }

  const LintReport report = lint(scenario, kit.lint_options);
  std::cout << lint_report_to_json(report) << "\n";

  const bool has_errors = std::any_of(report.findings.begin(), report.findings.end(),
                                      [](const Finding& f) { return f.severity == Severity::Error; });
  return has_errors ? kFailure : kOk;
}

// ---- simulate ------------------------------------------------------------

void print_trace(const SimulationResult& result) {
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const Pose& pose = result.trace[i];
    std::cout << "  step " << i << ": (" << pose.x << ", " << pose.y << ") facing "
              << heading_letter(pose.heading) << "\n";
  }
  std::cout << "outcome: " << outcome_name(result.outcome);
  if (result.outcome == Outcome::OutOfBounds || result.outcome == Outcome::HitObstacle) {
    std::cout << " at command " << result.halt_step;
  } else {
    std::cout << " after " << result.halt_step << " commands";
  }
  std::cout << "\n";
}

json trace_json(const Program& program, const SimulationResult& result) {
  json out;
  out["program"] = canonical_print(program);
  json trace = json::array();
  for (const Pose& pose : result.trace) {
    trace.push_back({{"x", pose.x},
                     {"y", pose.y},
                     {"heading", std::string(1, heading_letter(pose.heading))}});
  }
  out["trace"] = std::move(trace);
  out["outcome"] = outcome_name(result.outcome);
  out["halt_step"] = result.halt_step;
  return out;
}

int run_simulate(const GlobalOptions& opts, const std::string& world_file,
                 const std::string& program_text, const std::string& scenario_file,
                 int capacity) {
  if (program_text.empty() == scenario_file.empty()) {
    return usage_error("provide exactly one of --program or --from-scenario");
  }

  GridWorld world;
  try {
    world = load_world(world_file);
  } catch (const WorldError& ex) {
    return usage_error(ex.what());
  }

  std::vector<Program> programs;
  std::vector<std::string> skipped;
  if (!program_text.empty()) {
    try {
      programs.push_back(parse_program(program_text, capacity));
    } catch (const ParseError& ex) {
      return usage_error(ex.what());
    } catch (const CapacityError& ex) {
      return usage_error(ex.what());
    }
  } else {
    std::ifstream in(scenario_file, std::ios::binary);
    if (!in) {
      return usage_error("cannot read " + scenario_file);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    ExtractedPrograms extracted = extract_programs(buffer.str());
    programs = std::move(extracted.programs);
    skipped = std::move(extracted.skipped);
  }

  bool all_reached = true;
  json all = json::array();
  for (const Program& program : programs) {
    const SimulationResult result = execute(program, world);
    if (world.target && result.outcome != Outcome::ReachedTarget) {
      all_reached = false;
    }
    if (opts.json_output) {
      all.push_back(trace_json(program, result));
    } else {
      std::cout << "program: " << canonical_print(program) << "\n";
      print_trace(result);
    }
  }
  if (opts.json_output) {
    json out;
    out["world"] = world_file;
    out["runs"] = std::move(all);
    out["skipped_runs"] = skipped;
    std::cout << out.dump(2) << "\n";
  } else {
    if (programs.empty()) {
      std::cout << "no command sequences found\n";
    }
    for (const std::string& run : skipped) {
      std::cout << "skipped run with unknown command: " << run << "\n";
    }
  }
  return all_reached ? kOk : kFailure;
}

// ---- report ---------------------------------------------------------------

int run_report(const GlobalOptions& opts, const std::string& archive_arg) {
  Toolkit kit = open_toolkit(opts);
  const fs::path root = archive_arg.empty() ? kit.config.archive_root : fs::path(archive_arg);
  if (!fs::is_directory(root)) {
    return usage_error("archive directory not found: " + root.string());
  }

  std::vector<fs::path> lint_files;
  const fs::path rounds = root / "rounds";
  if (fs::is_directory(rounds)) {
    for (const auto& entry : fs::recursive_directory_iterator(rounds)) {
      if (entry.is_regular_file() && entry.path().string().ends_with(".lint.json")) {
        lint_files.push_back(entry.path());
      }
    }
  }
  std::sort(lint_files.begin(), lint_files.end());

  std::vector<LintReport> reports;
  reports.reserve(lint_files.size());
  for (const fs::path& path : lint_files) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    reports.push_back(lint_report_from_json(buffer.str()));
  }

  std::cout << comparison_matrix(reports);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Story-prompt toolkit for the Cubetto tangible programming robot"};
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "Configuration file")->check(CLI::ExistingFile);
  app.add_option("--replay", opts.replay_dir, "Serve canned responses from this directory");
  app.add_flag("--json", opts.json_output, "Machine-readable output");

  CLI::App* presets_cmd = app.add_subcommand("presets", "List the shipped story presets");

  GenerateArgs gen;
  CLI::App* generate_cmd = app.add_subcommand("generate", "Generate and lint one scenario");
  generate_cmd->add_option("--preset", gen.preset, "Preset id");
  generate_cmd->add_option("--world", gen.world, "Narrative world");
  generate_cmd->add_option("--subjects", gen.subjects, "Toy subjects");
  generate_cmd->add_option("--task", gen.task, "Task for the children");
  generate_cmd->add_option("--model", gen.model, "Configured model name");
  generate_cmd->add_option("--round", gen.round, "Round number");
  generate_cmd->add_option("--char-limit", gen.char_limit,
                           "Ask for at most this many characters");

  int rounds = 1;
  CLI::App* batch_cmd = app.add_subcommand("batch", "Run all models over all presets");
  batch_cmd->add_option("--rounds", rounds, "Rounds per model and preset");

  std::string lint_file;
  std::string lint_finish = "stop";
  int lint_preset = 0;
  CLI::App* lint_cmd = app.add_subcommand("lint", "Lint a scenario text file");
  lint_cmd->add_option("file", lint_file, "Scenario text file")->required();
  lint_cmd->add_option("--finish-reason", lint_finish, "stop | length | other");
  lint_cmd->add_option("--preset", lint_preset, "Preset the text was generated for");

  std::string world_file;
  std::string program_text;
  std::string scenario_file;
  int capacity = kDefaultProgramCapacity;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Run command sequences on a board");
  simulate_cmd->add_option("--world", world_file, "World JSON file")->required();
  simulate_cmd->add_option("--program", program_text, "Command listing");
  simulate_cmd->add_option("--from-scenario", scenario_file,
                           "Extract command sequences from this text file");
  simulate_cmd->add_option("--capacity", capacity, "Control board slots");

  std::string archive_arg;
  CLI::App* report_cmd = app.add_subcommand("report", "Rebuild the comparison matrix");
  report_cmd->add_option("--archive", archive_arg, "Archive directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (presets_cmd->parsed()) {
      return run_presets(opts);
    }
    if (generate_cmd->parsed()) {
      return run_generate(opts, gen);
    }
    if (batch_cmd->parsed()) {
      return run_batch_cmd(opts, rounds);
    }
    if (lint_cmd->parsed()) {
      return run_lint(opts, lint_file, lint_finish, lint_preset);
    }
    if (simulate_cmd->parsed()) {
      return run_simulate(opts, world_file, program_text, scenario_file, capacity);
    }
    if (report_cmd->parsed()) {
      return run_report(opts, archive_arg);
    }
  } catch (const ConfigError& ex) {
    return usage_error(ex.what());
  } catch (const CatalogError& ex) {
    return usage_error(ex.what());
  } catch (const ParamsError& ex) {
    return usage_error(ex.what());
  } catch (const TemplateError& ex) {
    return usage_error(ex.what());
  } catch (const WorldError& ex) {
    return usage_error(ex.what());
  } catch (const std::exception& ex) {
    return failure(ex.what());
  }
  return kUsage;
}
