#pragma once

#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "httplib.h"

#include "strategos/common.hpp"
#include "strategos/machine.hpp"
#include "strategos/memory.hpp"
#include "strategos/observation.hpp"

namespace strategos {

// ============================================================================
// Requests, descriptors, errors
// ============================================================================

struct GenerationRequest {
  std::string prompt;
  int max_tokens = 512;
  double temperature = 0.0;
  std::optional<uint64_t> seed;

  // Structured side channel for the oracle backend, which decides from the
  // observation and memory directly rather than reading the prompt back.
  const Observation* observation = nullptr;
  const StrategyRecord* last_strategy = nullptr;
  bool include_strategy_lines = true;
};

enum class BackendKind { remote, scripted, oracle };

inline const char* backend_kind_name(BackendKind k) {
  switch (k) {
    case BackendKind::remote: return "remote";
    case BackendKind::scripted: return "scripted";
    case BackendKind::oracle: return "oracle";
  }
  return "oracle";
}

struct BackendDescriptor {
  BackendKind kind = BackendKind::oracle;
  std::string endpoint;         // remote: e.g. http://host:port/v1/chat/completions
  std::string model_name;       // remote
  std::string api_key;          // remote; sent as a bearer token when non-empty
  int timeout_ms = 30000;       // remote
  std::string transcript_path;  // scripted

  void validate() const {
    if (kind == BackendKind::remote && (endpoint.empty() || model_name.empty()))
      throw ConfigError("remote backend needs an endpoint and a model name");
    if (kind == BackendKind::scripted && transcript_path.empty())
      throw ConfigError("scripted backend needs a transcript path");
  }
};

// Typed transport failure. The backend never fabricates text on failure.
struct BackendError : Error {
  enum class Kind { connect, timeout, http_status, malformed_body, transcript_end, misconfigured };
  Kind kind;
  int http_status = 0;
  BackendError(Kind k, std::string msg, int status = 0)
      : Error(std::move(msg)), kind(k), http_status(status) {}
};

enum class HealthStatus { ok, unreachable, unauthorized };

inline const char* health_status_name(HealthStatus s) {
  switch (s) {
    case HealthStatus::ok: return "ok";
    case HealthStatus::unreachable: return "unreachable";
    case HealthStatus::unauthorized: return "unauthorized";
  }
  return "unreachable";
}

// Pluggable text generation. Implementations must tolerate concurrent
// generate() calls from parallel episodes.
class TextBackend {
 public:
  virtual ~TextBackend() = default;
  virtual std::string generate(const GenerationRequest& request) = 0;
  virtual HealthStatus health_check() = 0;
  virtual std::string_view name() const = 0;
};

// ============================================================================
// Oracle backend — symbolic_execute dressed up as a text generator, so every
// downstream component can be exercised without a model or network.
// ============================================================================

// Formats a symbolic decision exactly per the output contract: one reasoning
// paragraph, the strategy-variable lines, then one line per action.
inline std::string format_decision_text(const SymbolicDecision& d, bool include_strategy_lines) {
  std::string out;
  if (d.fired_gloss)
    out += "Transitioning from " + d.previous_state + " to " + d.state + ": " + *d.fired_gloss +
           ". Issuing " + std::to_string(d.actions.size()) + " orders.\n";
  else
    out += "Holding state " + d.state + ". Issuing " + std::to_string(d.actions.size()) +
           " orders.\n";
  if (include_strategy_lines)
    for (const auto& [k, v] : d.record.variables) out += "[" + k + "]:<" + v + ">\n";
  for (const auto& a : d.actions) out += "Action: " + a.to_text() + "\n";
  return out;
}

class OracleBackend : public TextBackend {
 public:
  explicit OracleBackend(MachineSpec spec) : spec_(std::move(spec)) {}

  std::string generate(const GenerationRequest& request) override {
    if (!request.observation)
      throw BackendError(BackendError::Kind::misconfigured,
                         "oracle backend needs the structured observation side channel");
    SymbolicDecision d =
        symbolic_execute(spec_, *request.observation, request.last_strategy);
    return format_decision_text(d, request.include_strategy_lines);
  }

  HealthStatus health_check() override { return HealthStatus::ok; }
  std::string_view name() const override { return "oracle"; }

  const MachineSpec& spec() const { return spec_; }

 private:
  const MachineSpec spec_;  // immutable after construction; safe to share
};

// ============================================================================
// Scripted backend — replays a recorded transcript deterministically.
// Transcript format: JSON Lines, one {"text": "..."} object per completion.
// ============================================================================

class ScriptedBackend : public TextBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> entries, std::string load_error = {})
      : entries_(std::move(entries)), load_error_(std::move(load_error)) {}

  static std::unique_ptr<ScriptedBackend> from_file(const std::string& path) {
    std::vector<std::string> entries;
    std::string load_error;
    std::ifstream f(path, std::ios::binary);
    if (!f) {
      load_error = "cannot open transcript: " + path;
    } else {
      std::string line;
      int line_no = 0;
      while (std::getline(f, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
          nlohmann::json j = nlohmann::json::parse(line);
          entries.push_back(j.at("text").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
          load_error = "malformed transcript line " + std::to_string(line_no) + ": " + e.what();
          entries.clear();
          break;
        }
      }
    }
    return std::make_unique<ScriptedBackend>(std::move(entries), std::move(load_error));
  }

  static void write_file(const std::string& path, const std::vector<std::string>& entries) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write transcript: " + path);
    for (const auto& e : entries) {
      nlohmann::json j;
      j["text"] = e;
      f << j.dump() << '\n';
    }
  }

  std::string generate(const GenerationRequest&) override {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!load_error_.empty())
      throw BackendError(BackendError::Kind::misconfigured, load_error_);
    if (cursor_ >= entries_.size())
      throw BackendError(BackendError::Kind::transcript_end,
                         "transcript exhausted after " + std::to_string(entries_.size()) +
                             " completions");
    return entries_[cursor_++];
  }

  HealthStatus health_check() override {
    return load_error_.empty() ? HealthStatus::ok : HealthStatus::unreachable;
  }
  std::string_view name() const override { return "scripted"; }

  size_t remaining() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size() - cursor_;
  }

 private:
  std::vector<std::string> entries_;
  std::string load_error_;
  size_t cursor_ = 0;
  mutable std::mutex mutex_;
};

// ============================================================================
// Remote backend — one chat-completion HTTP call per generate(). Retries are
// the orchestrator's job (it owns the retry budget and the trace).
// ============================================================================

class RemoteBackend : public TextBackend {
 public:
  explicit RemoteBackend(BackendDescriptor desc) : desc_(std::move(desc)) {
    desc_.validate();
    split_endpoint(desc_.endpoint, base_, path_);
  }

  std::string generate(const GenerationRequest& request) override {
    nlohmann::json body;
    body["model"] = desc_.model_name;
    body["messages"] = nlohmann::json::array({nlohmann::json{
        {"role", "user"},
        {"content", request.prompt},
    }});
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;
    if (request.seed) body["seed"] = *request.seed;

    httplib::Result res = post_json(body.dump());
    if (!res) {
      auto err = res.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
          err == httplib::Error::Write)
        throw BackendError(BackendError::Kind::timeout,
                           "remote backend timed out: " + httplib::to_string(err));
      throw BackendError(BackendError::Kind::connect,
                         "remote backend unreachable: " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300)
      throw BackendError(BackendError::Kind::http_status,
                         "remote backend returned status " + std::to_string(res->status),
                         res->status);
    try {
      nlohmann::json j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(BackendError::Kind::malformed_body,
                         std::string("malformed completion body: ") + e.what());
    }
  }

  HealthStatus health_check() override {
    nlohmann::json body;
    body["model"] = desc_.model_name;
    body["messages"] =
        nlohmann::json::array({nlohmann::json{{"role", "user"}, {"content", "ping"}}});
    body["temperature"] = 0.0;
    body["max_tokens"] = 1;
    httplib::Result res = post_json(body.dump());
    if (!res) return HealthStatus::unreachable;
    if (res->status == 401 || res->status == 403) return HealthStatus::unauthorized;
    if (res->status >= 200 && res->status < 300) return HealthStatus::ok;
    return HealthStatus::unreachable;
  }

  std::string_view name() const override { return "remote"; }

 private:
  httplib::Result post_json(const std::string& body) {
    httplib::Client client(base_);
    client.set_connection_timeout(0, desc_.timeout_ms * 1000);
    client.set_read_timeout(0, desc_.timeout_ms * 1000);
    client.set_write_timeout(0, desc_.timeout_ms * 1000);
    httplib::Headers headers;
    if (!desc_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + desc_.api_key);
    return client.Post(path_, headers, body, "application/json");
  }

  // "http://host:port/some/path" -> base "http://host:port", path "/some/path"
  static void split_endpoint(const std::string& endpoint, std::string& base, std::string& path) {
    size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos)
      throw ConfigError("endpoint must include a scheme, e.g. http://host:port/path");
    size_t slash = endpoint.find('/', scheme + 3);
    if (slash == std::string::npos) {
      base = endpoint;
      path = "/";
    } else {
      base = endpoint.substr(0, slash);
      path = endpoint.substr(slash);
    }
  }

  BackendDescriptor desc_;
  std::string base_;
  std::string path_;
};

// ============================================================================
// Factory
// ============================================================================

inline std::unique_ptr<TextBackend> make_backend(const BackendDescriptor& desc,
                                                 const MachineSpec* spec) {
  desc.validate();
  switch (desc.kind) {
    case BackendKind::oracle:
      if (!spec) throw ConfigError("oracle backend needs a machine spec");
      return std::make_unique<OracleBackend>(*spec);
    case BackendKind::scripted:
      return ScriptedBackend::from_file(desc.transcript_path);
    case BackendKind::remote:
      return std::make_unique<RemoteBackend>(desc);
  }
  throw ConfigError("unknown backend kind");
}

}  // namespace strategos
