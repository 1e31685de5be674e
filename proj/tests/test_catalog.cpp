#include <doctest.h>

#include <random>
#include <set>

#include "cubetto/catalog.hpp"
#include "test_support.hpp"

using namespace cubetto;

namespace {

const char* kRow2Prompt =
    "Suggest to a teacher a game with the Cubetto tangible programming toy for preschool "
    "children. It should be about pirates, involve Lego figures and children should use "
    "Cubetto to find a treasure. Only three Cubetto command blocks should be used: forward, "
    "turn left and turn right. The description should be about half a page long.";

}  // namespace

TEST_CASE("standard template with preset 2 reproduces the full prompt") {
  const auto presets = list_presets();
  CHECK(render_prompt(standard_template(), presets[1].params) == kRow2Prompt);
}

TEST_CASE("rendering is pure substitution when the body is only placeholders") {
  PromptTemplate tmpl;
  tmpl.body = "{narrative world}{subjects}{task}";
  CHECK(render_prompt(tmpl, {"a", "b", "c"}) == "abc");
}

TEST_CASE("preset 4 renders the Wild West story") {
  const auto presets = list_presets();
  const std::string prompt = render_prompt(standard_template(), presets[3].params);
  CHECK(prompt.find("about Wild West, involve Brio trains") != std::string::npos);
  CHECK(prompt.find("to rescue someone") != std::string::npos);
}

TEST_CASE("render_prompt is deterministic") {
  const auto params = list_presets()[0].params;
  CHECK(render_prompt(standard_template(), params) == render_prompt(standard_template(), params));
}

TEST_CASE("half-page variant keeps the length sentence") {
  const std::string prompt =
      render_prompt(standard_template(TemplateVariant::half_page()), list_presets()[0].params);
  CHECK(prompt.find(kHalfPageSentence) != std::string::npos);
}

TEST_CASE("char-limit variant swaps the length sentence") {
  const std::string prompt =
      render_prompt(standard_template(TemplateVariant::char_limit(900)), list_presets()[0].params);
  CHECK(prompt.find("The description should be at most 900 characters long.") !=
        std::string::npos);
  CHECK(prompt.find(kHalfPageSentence) == std::string::npos);
}

TEST_CASE("char-limit requires a positive limit") {
  CHECK_THROWS_AS(TemplateVariant::char_limit(0), TemplateError);
}

TEST_CASE("templates with missing or duplicated placeholders are rejected") {
  PromptTemplate missing;
  missing.body = "about {narrative world} with {subjects}";
  CHECK_THROWS_AS(render_prompt(missing, list_presets()[0].params), TemplateError);

  PromptTemplate duplicated;
  duplicated.body = "{narrative world} {subjects} {task} {task}";
  CHECK_THROWS_AS(render_prompt(duplicated, list_presets()[0].params), TemplateError);

  PromptTemplate stray;
  stray.body = "{narrative world} {subjects} {task} {sidekick}";
  CHECK_THROWS_AS(render_prompt(stray, list_presets()[0].params), TemplateError);
}

TEST_CASE("params must be non-empty and brace-free") {
  CHECK_THROWS_AS((ScenarioParams{"  ", "b", "c"}.validate()), ParamsError);
  CHECK_THROWS_AS((ScenarioParams{"a", "b", "{task}"}.validate()), ParamsError);
  CHECK_NOTHROW((ScenarioParams{"a", "b", "c"}.validate()));
}

TEST_CASE("rendered prompts carry each field verbatim exactly once and no braces") {
  std::mt19937 rng(20250722);
  const std::vector<std::string> pool = {"dragon riders", "deep sea divers", "mars rovers",
                                         "mushroom foragers", "polar expeditions"};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int i = 0; i < 50; ++i) {
    ScenarioParams params{pool[pick(rng)] + " #" + std::to_string(i), pool[pick(rng)],
                          "task " + std::to_string(i)};
    const std::string prompt = render_prompt(standard_template(), params);
    CHECK(prompt.find('{') == std::string::npos);
    CHECK(prompt.find('}') == std::string::npos);
    for (const std::string& field :
         {params.narrative_world, params.subjects, params.task}) {
      const auto first = prompt.find(field);
      REQUIRE(first != std::string::npos);
      CHECK(prompt.find(field, first + 1) == std::string::npos);
    }
  }
}

TEST_CASE("the four built-in presets reproduce the story table") {
  const auto presets = list_presets();
  REQUIRE(presets.size() == 4);
  CHECK(presets[0] == PresetRow{1, {"knights and princesses", "Barbie dolls", "enact a pursuit"}});
  CHECK(presets[1] == PresetRow{2, {"pirates", "Lego figures", "find a treasure"}});
  CHECK(presets[2] == PresetRow{3, {"superheroes", "Hot Wheels cars", "enact a struggle"}});
  CHECK(presets[3] == PresetRow{4, {"Wild West", "Brio trains", "rescue someone"}});
}

TEST_CASE("the shipped preset catalog matches the built-in rows") {
  CHECK(load_presets(testsupport::data_dir() / "presets.json") == list_presets());
}

TEST_CASE("the shipped template matches the built-in one") {
  const PromptTemplate shipped =
      load_template(testsupport::data_dir() / "templates" / "standard.txt");
  CHECK(shipped.body == standard_template().body);
}

TEST_CASE("corrupted preset files are reported") {
  testsupport::TempDir dir("presets");
  testsupport::write_file(dir.path() / "bad.json", "{not json");
  CHECK_THROWS_AS(load_presets(dir.path() / "bad.json"), CatalogError);
  testsupport::write_file(dir.path() / "object.json", "{\"id\": 1}");
  CHECK_THROWS_AS(load_presets(dir.path() / "object.json"), CatalogError);
}

TEST_CASE("permute builds the world-major cross product") {
  const auto presets = list_presets();
  std::vector<std::string> worlds, subjects, tasks;
  for (const PresetRow& row : presets) {
    worlds.push_back(row.params.narrative_world);
    subjects.push_back(row.params.subjects);
    tasks.push_back(row.params.task);
  }
  const auto combos = permute(worlds, subjects, tasks);
  CHECK(combos.size() == 64);

  std::set<std::tuple<std::string, std::string, std::string>> unique;
  for (const ScenarioParams& params : combos) {
    unique.insert({params.narrative_world, params.subjects, params.task});
  }
  CHECK(unique.size() == combos.size());

  CHECK(permute({"x"}, {"y"}, {"z"}) == std::vector<ScenarioParams>{{"x", "y", "z"}});
  CHECK(permute({"a", "b"}, {"c"}, {"d"}) ==
        std::vector<ScenarioParams>{{"a", "c", "d"}, {"b", "c", "d"}});
}

TEST_CASE("permute rejects empty dimensions") {
  CHECK_THROWS_AS(permute({}, {"y"}, {"z"}), std::invalid_argument);
  CHECK_THROWS_AS(permute({"x"}, {}, {"z"}), std::invalid_argument);
  CHECK_THROWS_AS(permute({"x"}, {"y"}, {""}), std::invalid_argument);
}
