#include "cubetto/gateway.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>
#include <variant>

namespace cubetto {
namespace {

using json = nlohmann::json;

constexpr const char* kChatCompletionsPath = "/v1/chat/completions";

std::string normalized_base(const std::string& endpoint) {
  std::string base = endpoint;
  while (!base.empty() && base.back() == '/') {
    base.pop_back();
  }
  return base;
}

FinishReason finish_reason_from_response(const json& choice) {
  if (!choice.contains("finish_reason") || choice.at("finish_reason").is_null()) {
    return FinishReason::other("");
  }
  return FinishReason::from_wire(choice.at("finish_reason").get<std::string>());
}

ChatCompletion parse_chat_response(const std::string& body) {
  json parsed;
  try {
    parsed = json::parse(body);
  } catch (const json::exception& ex) {
    throw GatewayError(GatewayErrorKind::Decode,
                       std::string("response body is not valid JSON: ") + ex.what(), 0, body);
  }

  ChatCompletion completion;
  try {
    const json& choices = parsed.at("choices");
    if (!choices.is_array() || choices.empty()) {
      throw GatewayError(GatewayErrorKind::Decode, "response carries no choices", 0, body);
    }
    const json& first = choices.at(0);
    completion.content = first.at("message").at("content").get<std::string>();
    completion.finish_reason = finish_reason_from_response(first);
  } catch (const json::exception& ex) {
    throw GatewayError(GatewayErrorKind::Decode,
                       std::string("unexpected response shape: ") + ex.what(), 0, body);
  }

  if (parsed.contains("usage") && parsed.at("usage").is_object()) {
    const json& usage = parsed.at("usage");
    completion.prompt_tokens = usage.value("prompt_tokens", 0);
    completion.completion_tokens = usage.value("completion_tokens", 0);
  }
  if (parsed.contains("created") && parsed.at("created").is_number()) {
    completion.created_at =
        std::chrono::system_clock::from_time_t(parsed.at("created").get<std::time_t>());
  } else {
    completion.created_at = std::chrono::system_clock::now();
  }
  return completion;
}

}  // namespace

void ModelSpec::validate() const {
  if (name.empty()) {
    throw std::invalid_argument("model spec needs a name");
  }
  if (max_response_tokens < 1) {
    throw std::invalid_argument("max_response_tokens must be at least 1");
  }
  if (temperature < 0.0) {
    throw std::invalid_argument("temperature must be non-negative");
  }
  if (parallelism < 1) {
    throw std::invalid_argument("parallelism must be at least 1");
  }
}

FinishReason FinishReason::from_wire(const std::string& value) {
  if (value == "stop") {
    return stop();
  }
  if (value == "length") {
    return length();
  }
  return other(value);
}

std::string finish_reason_label(const FinishReason& reason) {
  switch (reason.kind) {
    case FinishReasonKind::Stop:
      return "stop";
    case FinishReasonKind::Length:
      return "length";
    case FinishReasonKind::Other:
      return reason.detail.empty() ? "other" : reason.detail;
  }
  return "other";
}

std::string format_timestamp_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t time = std::chrono::system_clock::to_time_t(tp);
  std::tm utc{};
  gmtime_r(&time, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

int estimate_tokens(std::string_view text) {
  int count = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) {
      ++count;
    }
    in_word = !space;
  }
  return count;
}

ChatCompletion HttpBackend::complete(const ModelSpec& spec, const GenerationKey&,
                                     const std::string& prompt) {
  json body = {
      {"model", spec.name},
      {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
      {"max_tokens", spec.max_response_tokens},
      {"temperature", spec.temperature},
  };
  if (spec.seed) {
    body["seed"] = *spec.seed;
  }

  httplib::Client client(normalized_base(spec.endpoint));
  client.set_connection_timeout(connect_timeout, 0);
  client.set_read_timeout(read_timeout, 0);

  httplib::Result res = client.Post(kChatCompletionsPath, body.dump(), "application/json");
  if (!res) {
    throw GatewayError(GatewayErrorKind::Transport,
                       "cannot reach " + spec.endpoint + ": " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw GatewayError(GatewayErrorKind::Protocol,
                       spec.endpoint + " answered HTTP " + std::to_string(res->status),
                       res->status, res->body);
  }
  return parse_chat_response(res->body);
}

ReplayBackend::ReplayBackend(std::filesystem::path root) : root_(std::move(root)) {}

ChatCompletion ReplayBackend::complete(const ModelSpec& spec, const GenerationKey& key,
                                       const std::string& prompt) {
  if (!key.preset_id) {
    throw GatewayError(GatewayErrorKind::Transport,
                       "replay backend needs a preset id to key canned responses");
  }
  const std::filesystem::path path =
      root_ / spec.name / (std::to_string(*key.preset_id) + "-" + std::to_string(key.round) + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw GatewayError(GatewayErrorKind::Transport, "replay file not found: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();

  ChatCompletion completion;
  completion.content = buffer.str();
  completion.prompt_tokens = estimate_tokens(prompt);
  completion.completion_tokens = estimate_tokens(completion.content);
  if (completion.content.empty()) {
    completion.finish_reason = FinishReason::other("empty");
  } else if (completion.completion_tokens >= spec.max_response_tokens) {
    completion.finish_reason = FinishReason::length();
  } else {
    completion.finish_reason = FinishReason::stop();
  }
  completion.created_at = std::chrono::system_clock::time_point{};  // epoch, for determinism
  return completion;
}

std::vector<std::string> ReplayBackend::model_names() const {
  std::vector<std::string> names;
  if (std::filesystem::is_directory(root_)) {
    for (const auto& entry : std::filesystem::directory_iterator(root_)) {
      if (entry.is_directory()) {
        names.push_back(entry.path().filename().string());
      }
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

GeneratedScenario generate(CompletionBackend& backend, const ModelSpec& spec,
                           const GenerationKey& key, const std::string& prompt) {
  spec.validate();
  if (prompt.empty()) {
    throw std::invalid_argument("prompt must not be empty");
  }
  if (key.round < 1) {
    throw std::invalid_argument("round must be at least 1");
  }

  ChatCompletion completion = backend.complete(spec, key, prompt);
  if (completion.content.empty() && completion.finish_reason.kind != FinishReasonKind::Other) {
    throw GatewayError(GatewayErrorKind::Decode,
                       "empty response with finish_reason " +
                           finish_reason_label(completion.finish_reason));
  }

  GeneratedScenario scenario;
  scenario.params = key.params;
  scenario.model_name = spec.name;
  scenario.preset_id = key.preset_id;
  scenario.round = key.round;
  scenario.prompt_text = prompt;
  scenario.response_text = std::move(completion.content);
  scenario.finish_reason = completion.finish_reason;
  scenario.prompt_tokens = completion.prompt_tokens;
  scenario.completion_tokens = completion.completion_tokens;
  scenario.max_response_tokens = spec.max_response_tokens;
  scenario.created_at = completion.created_at;
  return scenario;
}

BatchResult run_batch(CompletionBackend& backend, const std::vector<ModelSpec>& specs,
                      const std::vector<ScenarioParams>& params_list,
                      const PromptTemplate& tmpl, int rounds) {
  if (specs.empty()) {
    throw std::invalid_argument("run_batch needs at least one model spec");
  }
  if (params_list.empty()) {
    throw std::invalid_argument("run_batch needs at least one parameter set");
  }
  if (rounds < 1) {
    throw std::invalid_argument("rounds must be at least 1");
  }
  for (const ModelSpec& spec : specs) {
    spec.validate();
  }

  // One render per parameter set; every emitted scenario reuses it.
  std::vector<std::string> prompts;
  prompts.reserve(params_list.size());
  for (const ScenarioParams& params : params_list) {
    prompts.push_back(render_prompt(tmpl, params));
  }

  const std::size_t per_spec = params_list.size() * static_cast<std::size_t>(rounds);
  const std::size_t total = specs.size() * per_spec;
  std::vector<std::variant<std::monostate, GeneratedScenario, BatchError>> slots(total);

  auto run_task = [&](std::size_t spec_idx, std::size_t task_idx) {
    const std::size_t params_idx = task_idx / static_cast<std::size_t>(rounds);
    const int round = static_cast<int>(task_idx % static_cast<std::size_t>(rounds)) + 1;
    const ModelSpec& spec = specs[spec_idx];

    GenerationKey key;
    key.params = params_list[params_idx];
    key.preset_id = static_cast<int>(params_idx) + 1;
    key.round = round;

    const std::size_t slot = spec_idx * per_spec + task_idx;
    try {
      slots[slot] = generate(backend, spec, key, prompts[params_idx]);
    } catch (const std::exception& ex) {
      slots[slot] = BatchError{spec.name, key.preset_id, key.params, round, ex.what()};
    }
  };

  // Independent worker pool per endpoint, sized by that spec's parallelism.
  std::vector<std::thread> workers;
  std::vector<std::atomic<std::size_t>> cursors(specs.size());
  for (std::size_t spec_idx = 0; spec_idx < specs.size(); ++spec_idx) {
    cursors[spec_idx] = 0;
    const std::size_t pool =
        std::min<std::size_t>(static_cast<std::size_t>(specs[spec_idx].parallelism), per_spec);
    for (std::size_t t = 0; t < pool; ++t) {
      workers.emplace_back([&, spec_idx] {
        while (true) {
          const std::size_t task_idx = cursors[spec_idx].fetch_add(1);
          if (task_idx >= per_spec) {
            return;
          }
          run_task(spec_idx, task_idx);
        }
      });
    }
  }
  for (std::thread& worker : workers) {
    worker.join();
  }

  BatchResult result;
  for (auto& slot : slots) {
    if (auto* scenario = std::get_if<GeneratedScenario>(&slot)) {
      result.scenarios.push_back(std::move(*scenario));
    } else if (auto* error = std::get_if<BatchError>(&slot)) {
      result.errors.push_back(std::move(*error));
    }
  }
  return result;
}

}  // namespace cubetto
