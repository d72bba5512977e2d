#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "strategos/actions.hpp"
#include "strategos/backend.hpp"
#include "strategos/machine.hpp"
#include "strategos/memory.hpp"
#include "strategos/observation.hpp"
#include "strategos/prompt.hpp"
#include "strategos/world.hpp"

namespace strategos {

enum class AgentMode { masmp, baseline };

inline const char* agent_mode_name(AgentMode m) {
  return m == AgentMode::masmp ? "masmp" : "baseline";
}

inline std::optional<AgentMode> parse_agent_mode(std::string_view s) {
  if (s == "masmp") return AgentMode::masmp;
  if (s == "baseline") return AgentMode::baseline;
  return std::nullopt;
}

struct AgentConfig {
  AgentMode mode = AgentMode::masmp;
  const MachineSpec* spec = nullptr;     // required in masmp mode
  TextBackend* backend = nullptr;
  const UnitCatalog* catalog = nullptr;  // action validation; default catalog when null
  long long decision_period = 8;  // sim ticks between decisions
  int retry_budget = 2;           // extra generate attempts after a failure
  int gen_max_tokens = 512;
  double gen_temperature = 0.0;
  std::optional<uint64_t> gen_seed;

  void validate() const {
    if (!backend) throw ConfigError("agent config needs a backend");
    if (decision_period < 1) throw ConfigError("decision_period must be >= 1");
    if (retry_budget < 0) throw ConfigError("retry_budget must be >= 0");
    if (mode == AgentMode::masmp && !spec) throw ConfigError("masmp mode needs a machine spec");
  }
};

// Full audit record of one decision step.
struct DecisionStepTrace {
  long long timestep = 0;
  uint64_t prompt_hash = 0;
  std::string raw_output;
  std::vector<StrategyRecord> extracted;  // all fragments, in output order
  ValidityReport validity;
  std::vector<ActionCommand> executed;
  std::optional<StrategyRecord> memory_latest_after;
  int attempts = 0;
  bool backend_failed = false;  // all attempts failed; step degraded to hold
  bool stale_memory = false;    // latest record named an unknown state
  std::string backend_error;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["t"] = timestep;
    j["prompt_hash"] = hash_hex(prompt_hash);
    j["raw_output"] = raw_output;
    j["strategies"] = nlohmann::ordered_json::array();
    for (const auto& r : extracted) {
      nlohmann::ordered_json vars = nlohmann::ordered_json::array();
      for (const auto& [k, v] : r.variables)
        vars.push_back(nlohmann::ordered_json::array({k, v}));
      j["strategies"].push_back(vars);
    }
    j["validity"] = nlohmann::ordered_json::object();
    j["validity"]["verdicts"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < validity.verdicts.size(); ++i) {
      j["validity"]["verdicts"].push_back(nlohmann::ordered_json::array(
          {validity.raw_lines[i], verdict_name(validity.verdicts[i])}));
    }
    j["validity"]["accepted"] = validity.accepted;
    j["validity"]["rejected"] = validity.rejected;
    j["executed"] = nlohmann::ordered_json::array();
    for (const auto& a : executed) j["executed"].push_back(a.to_text());
    if (memory_latest_after) {
      nlohmann::ordered_json vars = nlohmann::ordered_json::object();
      for (const auto& [k, v] : memory_latest_after->variables) vars[k] = v;
      j["memory_latest"] =
          nlohmann::ordered_json{{"t", memory_latest_after->timestep}, {"vars", vars}};
    } else {
      j["memory_latest"] = nullptr;
    }
    j["attempts"] = attempts;
    j["backend_failed"] = backend_failed;
    j["stale_memory"] = stale_memory;
    if (!backend_error.empty()) j["backend_error"] = backend_error;
    return j;
  }
};

struct DecisionResult {
  std::vector<ActionCommand> actions;
  DecisionStepTrace trace;
};

namespace detail {

// Latest record whose Tactic names a real state; falls back past corrupted
// records, or to nothing (initial state) when none qualifies.
inline const StrategyRecord* latest_valid_record(const MemoryDB& db, const MachineSpec& spec,
                                                 bool& stale) {
  const auto& records = db.records();
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    auto tactic = it->get("Tactic");
    if (tactic && spec.has_state(*tactic)) {
      stale = (it != records.rbegin());
      return &*it;
    }
  }
  stale = !records.empty();
  return nullptr;
}

}  // namespace detail

// One decision step: retrieve the latest strategy, compile the prompt,
// generate, extract strategies (storing the first non-empty fragment),
// validate actions, and return what may execute. Baseline mode skips the
// memory and state-machine parts entirely. Backend failure after the retry
// budget degrades to an empty batch ("hold"), never an abort.
inline DecisionResult decide_step(const AgentConfig& cfg, MemoryDB& db, const Observation& o,
                                  long long t) {
  cfg.validate();
  if (const StrategyRecord* latest = db.get_latest(); latest && t <= latest->timestep)
    throw MemoryError("decision timestep " + std::to_string(t) +
                      " is not beyond the stored history");

  DecisionResult result;
  DecisionStepTrace& trace = result.trace;
  trace.timestep = t;

  const bool masmp = cfg.mode == AgentMode::masmp;
  const StrategyRecord* prompt_record = masmp ? db.get_latest() : nullptr;

  // The oracle side channel gets the latest record that still names a real
  // state; the prompt shows the memory verbatim (text is the model's view,
  // the curated record is the executor's).
  const StrategyRecord* oracle_record = nullptr;
  if (masmp) {
    bool stale = false;
    oracle_record = detail::latest_valid_record(db, *cfg.spec, stale);
    trace.stale_memory = stale;
  }

  std::string obs_text = render_observation(o);
  std::string prompt = masmp ? compile_prompt(*cfg.spec, obs_text, prompt_record)
                             : compile_baseline_prompt(obs_text);
  trace.prompt_hash = fnv1a64(prompt);

  GenerationRequest request;
  request.prompt = prompt;
  request.max_tokens = cfg.gen_max_tokens;
  request.temperature = cfg.gen_temperature;
  request.seed = cfg.gen_seed;
  request.observation = &o;
  request.last_strategy = oracle_record;
  request.include_strategy_lines = masmp;

  std::string output;
  bool generated = false;
  for (int attempt = 0; attempt <= cfg.retry_budget && !generated; ++attempt) {
    ++trace.attempts;
    try {
      output = cfg.backend->generate(request);
      generated = true;
    } catch (const BackendError& e) {
      trace.backend_error = e.what();
    }
  }
  if (!generated) {
    trace.backend_failed = true;
    if (const StrategyRecord* latest = db.get_latest())
      trace.memory_latest_after = *latest;
    return result;  // hold: empty action batch, memory untouched
  }
  trace.raw_output = output;

  if (masmp) {
    trace.extracted = extract_strategies(output);
    if (!trace.extracted.empty()) db.add_memory(trace.extracted.front(), t);
  }

  auto candidates = extract_actions(output);
  const UnitCatalog& catalog = cfg.catalog ? *cfg.catalog : shared_default_catalog();
  auto [kept, report] = validate_actions(candidates, catalog, o);
  result.actions = std::move(kept);
  trace.validity = std::move(report);
  trace.executed = result.actions;
  if (const StrategyRecord* latest = db.get_latest()) trace.memory_latest_after = *latest;
  return result;
}

// ============================================================================
// Episode runner
// ============================================================================

struct SimTraceRecord {
  long long tick = 0;
  PlayerId player = PlayerId::a;
  std::vector<std::string> actions;
  std::optional<CombatSummary> combat;
  int minerals = 0;
  int gas = 0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tick"] = tick;
    j["acting_player"] = player_name(player);
    j["actions"] = actions;
    if (combat)
      j["combat_summary"] =
          nlohmann::ordered_json{{"own_losses", combat->own_losses},
                                 {"enemy_losses", combat->enemy_losses}};
    else
      j["combat_summary"] = nullptr;
    j["resources"] = nlohmann::ordered_json{{"minerals", minerals}, {"gas", gas}};
    return j;
  }
};

struct MatchResult {
  Outcome outcome = Outcome::draw;  // from player a's (the agent's) seat
  long long final_tick = 0;
  uint64_t seed = 0;
  int difficulty = 0;
  AgentMode mode = AgentMode::masmp;
  // Completed productions per type: full episode and the early-game window.
  std::map<std::string, int> production_a;
  std::map<std::string, int> production_b;
  std::map<std::string, int> early_production_a;
  std::map<std::string, int> early_production_b;

  bool win() const { return outcome == Outcome::win_a; }

  nlohmann::ordered_json to_json() const {
    auto counts = [](const std::map<std::string, int>& m) {
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      for (const auto& [k, v] : m) j[k] = v;
      return j;
    };
    nlohmann::ordered_json j;
    j["mode"] = agent_mode_name(mode);
    j["difficulty"] = difficulty;
    j["seed"] = seed;
    j["outcome"] = outcome == Outcome::win_a ? "win" : (outcome == Outcome::win_b ? "loss" : "draw");
    j["final_tick"] = final_tick;
    j["production_a"] = counts(production_a);
    j["production_b"] = counts(production_b);
    j["early_production_a"] = counts(early_production_a);
    j["early_production_b"] = counts(early_production_b);
    return j;
  }
};

struct EpisodeResult {
  MatchResult result;
  std::vector<DecisionStepTrace> decisions;
  std::vector<SimTraceRecord> sim_trace;
};

struct EpisodeParams {
  uint64_t seed = 1;
  int difficulty = 1;
  OpponentAnchors anchors;
  WorldConfig world_cfg;
  UnitCatalog catalog = default_catalog();
};

// Runs one full episode: the agent (player a) decides every decision_period
// ticks, the scripted opponent (player b) acts every tick, the world steps
// until terminal or the tick limit. Step errors degrade to holds; an episode
// never aborts mid-match.
inline EpisodeResult run_agent_episode(const AgentConfig& cfg, const EpisodeParams& params) {
  cfg.validate();
  params.catalog.validate();
  OpponentScript script = opponent_script_for(params.difficulty, params.anchors, params.catalog,
                                              params.world_cfg.worker_type);
  WorldState world = initial_world(params.catalog, params.world_cfg, params.seed);
  world.player(PlayerId::b).income_mult_permille = script.income_mult_permille;

  EpisodeResult episode;
  MemoryDB db;  // fresh per episode
  AgentConfig step_cfg = cfg;
  step_cfg.catalog = &params.catalog;

  while (terminal_check(world, params.world_cfg) == Outcome::ongoing) {
    std::vector<ActionCommand> actions_a;
    if (world.tick % cfg.decision_period == 0) {
      Observation obs_a = observe(world, PlayerId::a, params.catalog);
      DecisionResult decision = decide_step(step_cfg, db, obs_a, world.tick);
      actions_a = decision.actions;
      episode.decisions.push_back(std::move(decision.trace));
    }

    Observation obs_b = observe(world, PlayerId::b, params.catalog);
    std::vector<ActionCandidate> b_candidates;
    for (auto& cmd : run_opponent(script, world, params.catalog, PlayerId::b,
                                  params.world_cfg.worker_type))
      b_candidates.push_back({cmd, cmd.to_text()});
    auto [actions_b, report_b] = validate_actions(b_candidates, params.catalog, obs_b);

    StepResult step = step_world(world, actions_a, actions_b, params.catalog, params.world_cfg);

    for (const auto& c : step.completions) {
      auto& full = c.player == PlayerId::a ? episode.result.production_a
                                           : episode.result.production_b;
      ++full[c.type];
      if (c.tick <= params.world_cfg.production_cutoff_tick) {
        auto& early = c.player == PlayerId::a ? episode.result.early_production_a
                                              : episode.result.early_production_b;
        ++early[c.type];
      }
    }
    for (PlayerId p : {PlayerId::a, PlayerId::b}) {
      const auto& executed = step.executed[static_cast<size_t>(p)];
      if (executed.empty() && !step.combat_occurred) continue;
      SimTraceRecord rec;
      rec.tick = world.tick;
      rec.player = p;
      for (const auto& a : executed) rec.actions.push_back(a.to_text());
      if (step.combat_occurred) rec.combat = step.combat[static_cast<size_t>(p)];
      rec.minerals = step.world.player(p).minerals;
      rec.gas = step.world.player(p).gas;
      episode.sim_trace.push_back(std::move(rec));
    }

    world = std::move(step.world);
  }

  episode.result.outcome = terminal_check(world, params.world_cfg);
  episode.result.final_tick = world.tick;
  episode.result.seed = params.seed;
  episode.result.difficulty = params.difficulty;
  episode.result.mode = cfg.mode;
  return episode;
}

}  // namespace strategos
