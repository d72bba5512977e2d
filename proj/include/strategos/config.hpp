#pragma once

#include <cstdlib>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "strategos/backend.hpp"
#include "strategos/catalog.hpp"
#include "strategos/common.hpp"
#include "strategos/world.hpp"

namespace strategos {

inline constexpr int kConfigVersion = 1;

// Everything an episode or evaluation run needs that is not the machine spec:
// unit catalog, world parameters, opponent anchors, agent cadence, backend.
// Documented key set in docs/file-formats.md; also shipped as
// assets/default_config.json.
struct RunConfig {
  int version = kConfigVersion;
  UnitCatalog catalog = default_catalog();
  WorldConfig world;
  OpponentAnchors anchors;
  long long decision_period = 8;
  int retry_budget = 2;
  BackendDescriptor backend;
};

inline nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["version"] = cfg.version;
  j["catalog"] = catalog_to_json(cfg.catalog);
  j["world"] = {
      {"starting_minerals", cfg.world.starting_minerals},
      {"starting_gas", cfg.world.starting_gas},
      {"starting_workers", cfg.world.starting_workers},
      {"mineral_rate_permille", cfg.world.mineral_rate_permille},
      {"gas_rate_permille", cfg.world.gas_rate_permille},
      {"worker_type", cfg.world.worker_type},
      {"tick_limit", cfg.world.tick_limit},
      {"production_cutoff_tick", cfg.world.production_cutoff_tick},
  };
  auto anchor = [](const OpponentAnchorParams& p) {
    return nlohmann::ordered_json{
        {"income_mult_permille", p.income_mult_permille},
        {"first_attack_tick", p.first_attack_tick},
        {"attack_period", p.attack_period},
        {"advanced_mix_permille", p.advanced_mix_permille},
        {"worker_cap", p.worker_cap},
    };
  };
  j["opponent_anchors"] = {{"level1", anchor(cfg.anchors.level1)},
                           {"level7", anchor(cfg.anchors.level7)}};
  j["agent"] = {{"decision_period", cfg.decision_period}, {"retry_budget", cfg.retry_budget}};
  j["backend"] = {
      {"kind", backend_kind_name(cfg.backend.kind)},
      {"endpoint", cfg.backend.endpoint},
      {"model_name", cfg.backend.model_name},
      {"api_key", cfg.backend.api_key},
      {"timeout_ms", cfg.backend.timeout_ms},
      {"transcript_path", cfg.backend.transcript_path},
  };
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (!j.contains("version") || !j["version"].is_number_integer())
    throw ConfigError("config is missing an integer 'version'");
  cfg.version = j["version"].get<int>();
  if (cfg.version != kConfigVersion)
    throw ConfigError("unsupported config version " + std::to_string(cfg.version));
  if (j.contains("catalog")) cfg.catalog = catalog_from_json(j["catalog"]);
  if (j.contains("world")) {
    const auto& w = j["world"];
    cfg.world.starting_minerals = w.value("starting_minerals", cfg.world.starting_minerals);
    cfg.world.starting_gas = w.value("starting_gas", cfg.world.starting_gas);
    cfg.world.starting_workers = w.value("starting_workers", cfg.world.starting_workers);
    cfg.world.mineral_rate_permille =
        w.value("mineral_rate_permille", cfg.world.mineral_rate_permille);
    cfg.world.gas_rate_permille = w.value("gas_rate_permille", cfg.world.gas_rate_permille);
    cfg.world.worker_type = w.value("worker_type", cfg.world.worker_type);
    cfg.world.tick_limit = w.value("tick_limit", cfg.world.tick_limit);
    cfg.world.production_cutoff_tick =
        w.value("production_cutoff_tick", cfg.world.production_cutoff_tick);
  }
  if (j.contains("opponent_anchors")) {
    auto read_anchor = [](const nlohmann::json& a, OpponentAnchorParams& p) {
      p.income_mult_permille = a.value("income_mult_permille", p.income_mult_permille);
      p.first_attack_tick = a.value("first_attack_tick", p.first_attack_tick);
      p.attack_period = a.value("attack_period", p.attack_period);
      p.advanced_mix_permille = a.value("advanced_mix_permille", p.advanced_mix_permille);
      p.worker_cap = a.value("worker_cap", p.worker_cap);
    };
    if (j["opponent_anchors"].contains("level1"))
      read_anchor(j["opponent_anchors"]["level1"], cfg.anchors.level1);
    if (j["opponent_anchors"].contains("level7"))
      read_anchor(j["opponent_anchors"]["level7"], cfg.anchors.level7);
    cfg.anchors.validate();
  }
  if (j.contains("agent")) {
    cfg.decision_period = j["agent"].value("decision_period", cfg.decision_period);
    cfg.retry_budget = j["agent"].value("retry_budget", cfg.retry_budget);
  }
  if (j.contains("backend")) {
    const auto& b = j["backend"];
    std::string kind = b.value("kind", std::string("oracle"));
    if (kind == "remote")
      cfg.backend.kind = BackendKind::remote;
    else if (kind == "scripted")
      cfg.backend.kind = BackendKind::scripted;
    else if (kind == "oracle")
      cfg.backend.kind = BackendKind::oracle;
    else
      throw ConfigError("unknown backend kind '" + kind + "'");
    cfg.backend.endpoint = b.value("endpoint", cfg.backend.endpoint);
    cfg.backend.model_name = b.value("model_name", cfg.backend.model_name);
    cfg.backend.api_key = b.value("api_key", cfg.backend.api_key);
    cfg.backend.timeout_ms = b.value("timeout_ms", cfg.backend.timeout_ms);
    cfg.backend.transcript_path = b.value("transcript_path", cfg.backend.transcript_path);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config file " + path + ": " + e.what());
  }
  return config_from_json(j);
}

// Environment overrides for backend secrets and endpoints, applied on top of
// whatever the config file says:
//   STRATEGOS_ENDPOINT, STRATEGOS_MODEL, STRATEGOS_API_KEY, STRATEGOS_TIMEOUT_MS
inline void apply_env_overrides(BackendDescriptor& backend) {
  if (const char* v = std::getenv("STRATEGOS_ENDPOINT")) backend.endpoint = v;
  if (const char* v = std::getenv("STRATEGOS_MODEL")) backend.model_name = v;
  if (const char* v = std::getenv("STRATEGOS_API_KEY")) backend.api_key = v;
  if (const char* v = std::getenv("STRATEGOS_TIMEOUT_MS")) backend.timeout_ms = std::atoi(v);
}

}  // namespace strategos
