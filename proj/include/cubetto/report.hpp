#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubetto/gateway.hpp"
#include "cubetto/lint.hpp"

namespace cubetto {

struct ArchiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ArchiveLayout {
  std::filesystem::path root;
  std::vector<std::filesystem::path> scenario_files;  // rounds/round-{r}/{model}/{preset}.md
  std::vector<std::filesystem::path> lint_files;      // sibling {preset}.lint.json
};

/// Path of one scenario below the archive root.
std::filesystem::path scenario_relpath(const GeneratedScenario& scenario);

/// Where the teacher-facing rendering of one scenario lives below the
/// archive root: teacher/{model}/{preset}-{round}.md.
std::filesystem::path teacher_doc_relpath(const GeneratedScenario& scenario);

/// Scenario body with a YAML front-matter provenance block.
std::string scenario_markdown(const GeneratedScenario& scenario);

/// Writes every scenario's markdown plus its lint JSON. Scenarios and
/// reports must correspond one-to-one by (model, preset, round); otherwise
/// throws ArchiveError. Idempotent: identical inputs produce byte-identical
/// trees.
ArchiveLayout write_archive(const std::vector<GeneratedScenario>& scenarios,
                            const std::vector<LintReport>& reports,
                            const std::filesystem::path& root);

/// Markdown table: rows = models, columns = presets, cells = flag glyphs
/// (H hallucinated command, T truncated, L over length, B materials
/// incomplete, G team split, M multi robot, R task transformed).
std::string comparison_matrix(const std::vector<LintReport>& reports);

/// Scenario body followed by review notes for warnings and errors, closed
/// by the standing adapt-before-use disclaimer. Info findings are omitted.
std::string teacher_doc(const GeneratedScenario& scenario, const LintReport& report);

}  // namespace cubetto
