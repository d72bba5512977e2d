// strategos — state-machine-prompted agent runtime and evaluation harness.
//
// Subcommands:
//   run        one episode (agent vs scripted opponent), optional trace files
//   eval       the full (mode x difficulty) evaluation matrix
//   replay     render a decision trace JSONL file as a readable report
//   check-spec parse and validate a machine spec file

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "strategos/strategos.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw strategos::Error("cannot open file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

strategos::BackendDescriptor backend_from_flag(const std::string& flag,
                                               strategos::BackendDescriptor base) {
  // "oracle" | "scripted:<path>" | "remote"
  if (flag.empty()) return base;
  if (flag == "oracle") {
    base.kind = strategos::BackendKind::oracle;
  } else if (flag == "remote") {
    base.kind = strategos::BackendKind::remote;
  } else if (flag.rfind("scripted:", 0) == 0) {
    base.kind = strategos::BackendKind::scripted;
    base.transcript_path = flag.substr(9);
  } else {
    throw strategos::ConfigError("unknown backend '" + flag +
                                 "' (use oracle, remote, or scripted:<path>)");
  }
  return base;
}

std::vector<int> parse_difficulties(const std::string& text) {
  // "1-7" or "1,3,5"
  std::vector<int> out;
  if (text.find('-') != std::string::npos) {
    size_t dash = text.find('-');
    int lo = std::stoi(text.substr(0, dash));
    int hi = std::stoi(text.substr(dash + 1));
    for (int d = lo; d <= hi; ++d) out.push_back(d);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  }
  if (out.empty()) throw strategos::ConfigError("no difficulties selected");
  return out;
}

int cmd_run(const std::string& config_path, const std::string& spec_path,
            const std::string& mode_name, const std::string& backend_flag, int difficulty,
            uint64_t seed, long long tick_limit_override, const std::string& trace_out,
            const std::string& sim_trace_out) {
  using namespace strategos;
  RunConfig run_cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
  apply_env_overrides(run_cfg.backend);

  MachineSpec spec = spec_path.empty() ? default_machine_spec()
                                       : parse_spec(read_file(spec_path), run_cfg.catalog);
  auto mode = parse_agent_mode(mode_name);
  if (!mode) throw ConfigError("unknown mode '" + mode_name + "' (use masmp or baseline)");

  BackendDescriptor desc = backend_from_flag(backend_flag, run_cfg.backend);
  auto backend = make_backend(desc, &spec);

  AgentConfig agent;
  agent.mode = *mode;
  agent.spec = &spec;
  agent.backend = backend.get();
  agent.catalog = &run_cfg.catalog;
  agent.decision_period = run_cfg.decision_period;
  agent.retry_budget = run_cfg.retry_budget;

  EpisodeParams params;
  params.seed = seed;
  params.difficulty = difficulty;
  params.anchors = run_cfg.anchors;
  params.world_cfg = run_cfg.world;
  params.catalog = run_cfg.catalog;
  if (tick_limit_override > 0) params.world_cfg.tick_limit = tick_limit_override;

  EpisodeResult episode = run_agent_episode(agent, params);

  if (!trace_out.empty()) {
    std::ofstream f(trace_out, std::ios::binary);
    if (!f) throw Error("cannot write trace file: " + trace_out);
    for (const auto& t : episode.decisions) f << t.to_json().dump() << '\n';
  }
  if (!sim_trace_out.empty()) {
    std::ofstream f(sim_trace_out, std::ios::binary);
    if (!f) throw Error("cannot write sim trace file: " + sim_trace_out);
    for (const auto& r : episode.sim_trace) f << r.to_json().dump() << '\n';
  }

  const MatchResult& r = episode.result;
  std::cout << "mode=" << agent_mode_name(r.mode) << " difficulty=" << r.difficulty
            << " seed=" << r.seed << " outcome="
            << (r.outcome == Outcome::win_a ? "win"
                                            : (r.outcome == Outcome::win_b ? "loss" : "draw"))
            << " final_tick=" << r.final_tick << " decisions=" << episode.decisions.size()
            << "\n";
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& spec_path,
             const std::string& modes_flag, const std::string& backend_flag,
             const std::string& difficulties_flag, int episodes, uint64_t seed_base, int workers,
             const std::string& out_dir, bool no_traces) {
  using namespace strategos;
  RunConfig run_cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
  apply_env_overrides(run_cfg.backend);

  EvalConfig cfg;
  cfg.modes.clear();
  {
    std::stringstream ss(modes_flag);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto m = parse_agent_mode(item);
      if (!m) throw ConfigError("unknown mode '" + item + "'");
      cfg.modes.push_back(*m);
    }
  }
  cfg.difficulties = parse_difficulties(difficulties_flag);
  cfg.episodes_per_cell = episodes;
  cfg.seed_base = seed_base;
  cfg.workers = workers;
  cfg.out_dir = out_dir;
  cfg.backend = backend_from_flag(backend_flag, run_cfg.backend);
  cfg.world_cfg = run_cfg.world;
  cfg.anchors = run_cfg.anchors;
  cfg.catalog = run_cfg.catalog;
  cfg.decision_period = run_cfg.decision_period;
  cfg.retry_budget = run_cfg.retry_budget;
  cfg.write_traces = !no_traces;
  if (!spec_path.empty()) cfg.spec_text = read_file(spec_path);

  EvalReport report = run_eval(cfg);
  std::cout << report.to_csv(cfg.catalog);
  if (!out_dir.empty())
    std::cout << "# wrote " << out_dir << "/report.csv, results.jsonl"
              << (cfg.write_traces ? ", traces/" : "") << "\n";
  return 0;
}

int cmd_replay(const std::string& trace_path) {
  using namespace strategos;
  std::ifstream f(trace_path, std::ios::binary);
  if (!f) throw Error("cannot open trace file: " + trace_path);
  std::string line;
  int line_no = 0;
  std::string prev_state = "(start)";
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed trace line " + std::to_string(line_no) + ": " + e.what());
    }
    std::string state = prev_state;
    if (j.contains("strategies") && !j["strategies"].empty())
      for (const auto& kv : j["strategies"][0])
        if (kv[0] == "Tactic") state = kv[1].get<std::string>();
    std::cout << "t=" << j.value("t", 0LL);
    if (state != prev_state)
      std::cout << "  state: " << prev_state << " -> " << state;
    else
      std::cout << "  state: " << state;
    if (j.value("stale_memory", false)) std::cout << "  [stale memory]";
    if (j.value("backend_failed", false)) std::cout << "  [backend failed -> hold]";
    std::cout << "\n";
    if (j.contains("strategies") && !j["strategies"].empty()) {
      std::cout << "    strategy:";
      for (const auto& kv : j["strategies"][0])
        std::cout << " [" << kv[0].get<std::string>() << "]=" << kv[1].get<std::string>();
      std::cout << "\n";
    }
    if (j.contains("executed")) {
      std::cout << "    actions:";
      if (j["executed"].empty()) std::cout << " (hold)";
      for (const auto& a : j["executed"]) std::cout << " " << a.get<std::string>();
      std::cout << "\n";
    }
    if (j.contains("validity") && j["validity"].value("rejected", 0) > 0) {
      std::cout << "    rejected:";
      for (const auto& v : j["validity"]["verdicts"])
        if (v[1].get<std::string>() != "valid")
          std::cout << " " << v[0].get<std::string>() << "(" << v[1].get<std::string>() << ")";
      std::cout << "\n";
    }
    prev_state = state;
  }
  return 0;
}

int cmd_check_spec(const std::string& spec_path, const std::string& config_path) {
  using namespace strategos;
  RunConfig run_cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
  std::string text = spec_path.empty() ? default_machine_spec_text() : read_file(spec_path);
  try {
    MachineSpec spec = parse_spec(text, run_cfg.catalog);
    std::cout << "ok: " << spec.states.size() << " states, " << spec.transitions.size()
              << " transitions, " << spec.rules.size() << " rules, " << spec.variables.size()
              << " variables\n";
    std::cout << "states:";
    for (const auto& s : spec.states) std::cout << " " << s;
    std::cout << " (initial: " << spec.initial_state << ")\n";
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strategos: state-machine-prompted agent runtime and evaluation harness"};
  app.require_subcommand(1);

  std::string config_path, spec_path, mode = "masmp", backend_flag, trace_out, sim_trace_out;
  int difficulty = 1;
  uint64_t seed = 1;
  long long tick_limit = 0;

  auto* run = app.add_subcommand("run", "Run a single episode");
  run->add_option("--config", config_path, "Run config JSON file");
  run->add_option("--spec", spec_path, "Machine spec file (default: built-in doctrine)");
  run->add_option("--mode", mode, "Agent mode: masmp or baseline")->capture_default_str();
  run->add_option("--backend", backend_flag, "oracle, remote, or scripted:<path>");
  run->add_option("--difficulty", difficulty, "Opponent difficulty 1..7")->capture_default_str();
  run->add_option("--seed", seed, "Episode seed")->capture_default_str();
  run->add_option("--tick-limit", tick_limit, "Override the configured tick limit");
  run->add_option("--trace-out", trace_out, "Write the decision trace JSONL here");
  run->add_option("--sim-trace-out", sim_trace_out, "Write the per-tick world trace JSONL here");

  std::string modes = "masmp,baseline", difficulties = "1-7", out_dir;
  int episodes = 5, workers = 1;
  uint64_t seed_base = 1;
  bool no_traces = false;

  auto* eval = app.add_subcommand("eval", "Run the evaluation matrix");
  eval->add_option("--config", config_path, "Run config JSON file");
  eval->add_option("--spec", spec_path, "Machine spec file (default: built-in doctrine)");
  eval->add_option("--modes", modes, "Comma-separated agent modes")->capture_default_str();
  eval->add_option("--backend", backend_flag, "oracle, remote, or scripted:<path>");
  eval->add_option("--difficulties", difficulties, "Range 1-7 or list 1,3,5")
      ->capture_default_str();
  eval->add_option("--episodes", episodes, "Episodes per cell")->capture_default_str();
  eval->add_option("--seed-base", seed_base, "Base seed for the episode grid")
      ->capture_default_str();
  eval->add_option("--workers", workers, "Parallel episode workers")->capture_default_str();
  eval->add_option("--out-dir", out_dir, "Directory for report.csv, results.jsonl, traces/");
  eval->add_flag("--no-traces", no_traces, "Skip writing per-episode trace files");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Render a decision trace as a readable report");
  replay->add_option("trace", replay_path, "Decision trace JSONL file")->required();

  auto* check = app.add_subcommand("check-spec", "Parse and validate a machine spec file");
  check->add_option("spec", spec_path, "Machine spec file (default: built-in doctrine)");
  check->add_option("--config", config_path, "Run config JSON (for the unit catalog)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, spec_path, mode, backend_flag, difficulty, seed, tick_limit,
                     trace_out, sim_trace_out);
    if (eval->parsed())
      return cmd_eval(config_path, spec_path, modes, backend_flag, difficulties, episodes,
                      seed_base, workers, out_dir, no_traces);
    if (replay->parsed()) return cmd_replay(replay_path);
    if (check->parsed()) return cmd_check_spec(spec_path, config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
