#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubetto/catalog.hpp"

namespace cubetto {

/// One OpenAI-compatible endpoint serving one model.
struct ModelSpec {
  std::string name;
  std::string endpoint;  // base URL, e.g. http://localhost:8080
  int max_response_tokens = 1024;
  double temperature = 0.7;
  std::optional<long> seed;
  int parallelism = 1;  // per-endpoint in-flight request cap

  void validate() const;  // throws std::invalid_argument
};

enum class FinishReasonKind { Stop, Length, Other };

struct FinishReason {
  FinishReasonKind kind = FinishReasonKind::Stop;
  std::string detail;  // server's original value when kind == Other

  static FinishReason stop() { return {FinishReasonKind::Stop, {}}; }
  static FinishReason length() { return {FinishReasonKind::Length, {}}; }
  static FinishReason other(std::string detail) {
    return {FinishReasonKind::Other, std::move(detail)};
  }
  static FinishReason from_wire(const std::string& value);

  bool operator==(const FinishReason&) const = default;
};

/// Wire-ish label: "stop", "length", or the original value for Other.
std::string finish_reason_label(const FinishReason& reason);

/// One model response with full provenance.
struct GeneratedScenario {
  ScenarioParams params;
  std::string model_name;
  std::optional<int> preset_id;  // 1-based; empty for ad-hoc parameters
  int round = 1;
  std::string prompt_text;
  std::string response_text;
  FinishReason finish_reason;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int max_response_tokens = 0;  // budget of the producing ModelSpec
  std::chrono::system_clock::time_point created_at{};
};

enum class GatewayErrorKind { Transport, Protocol, Decode };

class GatewayError : public std::runtime_error {
 public:
  GatewayError(GatewayErrorKind kind, const std::string& message, int status = 0,
               std::string body = {})
      : std::runtime_error(message), kind_(kind), status_(status), body_(std::move(body)) {}

  GatewayErrorKind kind() const { return kind_; }
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  GatewayErrorKind kind_;
  int status_;
  std::string body_;
};

/// Raw result of one chat completion, before provenance is attached.
struct ChatCompletion {
  std::string content;
  FinishReason finish_reason;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  std::chrono::system_clock::time_point created_at{};
};

/// Identifies one request within a batch; the replay backend keys files on it.
struct GenerationKey {
  ScenarioParams params;
  std::optional<int> preset_id;
  int round = 1;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual ChatCompletion complete(const ModelSpec& spec, const GenerationKey& key,
                                  const std::string& prompt) = 0;
};

/// POSTs {endpoint}/v1/chat/completions with a single user message.
class HttpBackend : public CompletionBackend {
 public:
  HttpBackend() = default;
  ChatCompletion complete(const ModelSpec& spec, const GenerationKey& key,
                          const std::string& prompt) override;

  // seconds; defaults sized for local llama.cpp servers
  int connect_timeout = 5;
  int read_timeout = 300;
};

/// Serves canned responses from {root}/{model_name}/{preset_id}-{round}.txt.
/// Deterministic: created_at is the Unix epoch, token counts are word counts,
/// and finish_reason is length when the canned response's word count reaches
/// the spec's max_response_tokens.
class ReplayBackend : public CompletionBackend {
 public:
  explicit ReplayBackend(std::filesystem::path root);
  ChatCompletion complete(const ModelSpec& spec, const GenerationKey& key,
                          const std::string& prompt) override;

  /// Subdirectory names, sorted; used to infer model specs when a config
  /// lists none.
  std::vector<std::string> model_names() const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

/// Runs one completion and attaches provenance. Throws GatewayError.
GeneratedScenario generate(CompletionBackend& backend, const ModelSpec& spec,
                           const GenerationKey& key, const std::string& prompt);

struct BatchError {
  std::string model_name;
  std::optional<int> preset_id;
  ScenarioParams params;
  int round = 1;
  std::string message;
};

struct BatchResult {
  std::vector<GeneratedScenario> scenarios;  // (spec, params, round) order
  std::vector<BatchError> errors;            // same order, for the failed cells
};

/// Fans out specs x params x rounds completions, capping in-flight requests
/// per endpoint at that spec's parallelism. Individual failures land in
/// errors and never abort the batch; scenarios.size() + errors.size() always
/// equals the full product. Prompts are rendered once per params entry, and
/// params are assigned preset ids 1..N by list position.
BatchResult run_batch(CompletionBackend& backend, const std::vector<ModelSpec>& specs,
                      const std::vector<ScenarioParams>& params_list,
                      const PromptTemplate& tmpl, int rounds);

/// ISO 8601 UTC, second resolution, e.g. 2025-07-22T09:00:00Z.
std::string format_timestamp_utc(std::chrono::system_clock::time_point tp);

/// Whitespace-delimited word count; the deterministic token estimate the
/// replay backend records.
int estimate_tokens(std::string_view text);

}  // namespace cubetto
