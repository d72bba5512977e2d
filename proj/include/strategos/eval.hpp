#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "strategos/catalog.hpp"
#include "strategos/common.hpp"
#include "strategos/orchestrator.hpp"

namespace strategos {

// ============================================================================
// Metrics
// ============================================================================

// Wins over total, as a percentage. Draws and losses count only in the
// denominator. Exact on the integer inputs this artifact produces.
inline double win_rate(const std::vector<MatchResult>& results) {
  if (results.empty()) throw Error("win_rate needs at least one result");
  long long wins = 0;
  for (const auto& r : results) wins += r.win() ? 1 : 0;
  return static_cast<double>(wins) * 100.0 / static_cast<double>(results.size());
}

struct ProductionMetrics {
  double mean_advanced = 0.0;
  double mean_total = 0.0;
  double advanced_ratio_pct = 0.0;
  bool empty = false;  // flagged when no units were produced at all
  std::vector<std::pair<std::string, double>> type_shares_pct;  // catalog unit order
};

// Early-game unit production statistics for the agent side: mean completed
// advanced-tier units, advanced share of all completed units, and per-type
// shares. Units only (workers included); structures are excluded. Counts are
// tallied up to the configured cutoff tick when the results were produced.
inline ProductionMetrics production_metrics(const std::vector<MatchResult>& results,
                                            const UnitCatalog& catalog) {
  if (results.empty()) throw Error("production_metrics needs at least one result");
  ProductionMetrics m;
  long long advanced = 0;
  long long total = 0;
  std::map<std::string, long long> per_type;
  for (const auto& r : results) {
    for (const auto& [type, count] : r.early_production_a) {
      const UnitTypeDef* def = catalog.unit(type);
      if (!def) continue;  // structures are not unit production
      total += count;
      per_type[type] += count;
      if (def->tier == Tier::advanced) advanced += count;
    }
  }
  const double n = static_cast<double>(results.size());
  m.mean_advanced = static_cast<double>(advanced) / n;
  m.mean_total = static_cast<double>(total) / n;
  if (total == 0) {
    m.empty = true;
    m.advanced_ratio_pct = 0.0;
  } else {
    m.advanced_ratio_pct =
        static_cast<double>(advanced) * 100.0 / static_cast<double>(total);
  }
  for (const auto& u : catalog.units) {
    double share = total == 0 ? 0.0
                              : static_cast<double>(per_type[u.name]) * 100.0 /
                                    static_cast<double>(total);
    m.type_shares_pct.emplace_back(u.name, share);
  }
  return m;
}

// ============================================================================
// Evaluation matrix
// ============================================================================

struct EvalConfig {
  std::vector<AgentMode> modes = {AgentMode::masmp, AgentMode::baseline};
  std::vector<int> difficulties = {1, 2, 3, 4, 5, 6, 7};
  int episodes_per_cell = 5;
  uint64_t seed_base = 1;
  int workers = 1;
  std::string out_dir;  // empty: no files written
  BackendDescriptor backend;
  WorldConfig world_cfg;
  OpponentAnchors anchors;
  UnitCatalog catalog = default_catalog();
  long long decision_period = 8;
  int retry_budget = 2;
  std::string spec_text;  // empty: default machine spec
  bool write_traces = true;
};

struct EvalRow {
  AgentMode mode = AgentMode::masmp;
  int difficulty = 1;
  int episodes = 0;
  int wins = 0;
  int losses = 0;
  int draws = 0;
  double win_rate_pct = 0.0;
  ProductionMetrics production;
};

struct EvalReport {
  std::vector<EvalRow> rows;  // sorted by (mode, difficulty)
  std::vector<MatchResult> results;  // sorted by (mode, difficulty, seed)

  // CSV header: mode,difficulty,episodes,wins,losses,draws,win_rate_pct,
  // mean_advanced_units,mean_total_units,advanced_ratio_pct,share_<type>...
  std::string to_csv(const UnitCatalog& catalog) const {
    std::string out = "mode,difficulty,episodes,wins,losses,draws,win_rate_pct,"
                      "mean_advanced_units,mean_total_units,advanced_ratio_pct";
    for (const auto& u : catalog.units) out += ",share_" + u.name;
    out += "\n";
    char buf[64];
    auto fmt = [&buf](const char* spec_, double v) {
      std::snprintf(buf, sizeof(buf), spec_, v);
      return std::string(buf);
    };
    for (const auto& r : rows) {
      out += agent_mode_name(r.mode);
      out += "," + std::to_string(r.difficulty);
      out += "," + std::to_string(r.episodes);
      out += "," + std::to_string(r.wins);
      out += "," + std::to_string(r.losses);
      out += "," + std::to_string(r.draws);
      out += "," + fmt("%.1f", r.win_rate_pct);
      out += "," + fmt("%.2f", r.production.mean_advanced);
      out += "," + fmt("%.2f", r.production.mean_total);
      out += "," + fmt("%.2f", r.production.advanced_ratio_pct);
      for (const auto& [_, share] : r.production.type_shares_pct)
        out += "," + fmt("%.2f", share);
      out += "\n";
    }
    return out;
  }
};

// Episode seeds depend on (difficulty, index) but not on the mode, so both
// modes face identical opponent randomness — symmetric comparison.
inline uint64_t eval_episode_seed(uint64_t seed_base, int difficulty, int episode_index) {
  return seed_base + static_cast<uint64_t>(difficulty) * 1000ull +
         static_cast<uint64_t>(episode_index);
}

// Runs the full (mode x difficulty x episodes) matrix. Cells and episodes are
// independent; with workers > 1 they run on a small thread pool and are
// written back into index-determined slots, so output order and bytes do not
// depend on scheduling. Backend health is probed before any episode runs.
inline EvalReport run_eval(const EvalConfig& cfg) {
  cfg.catalog.validate();
  cfg.anchors.validate();
  const MachineSpec spec =
      cfg.spec_text.empty() ? default_machine_spec() : parse_spec(cfg.spec_text, cfg.catalog);

  {
    auto probe = make_backend(cfg.backend, &spec);
    HealthStatus health = probe->health_check();
    if (health != HealthStatus::ok)
      throw ConfigError(std::string("backend health check failed: ") +
                        health_status_name(health));
  }

  struct Job {
    AgentMode mode;
    int difficulty;
    int episode_index;
    uint64_t seed;
  };
  std::vector<Job> jobs;
  for (AgentMode mode : cfg.modes)
    for (int d : cfg.difficulties)
      for (int e = 0; e < cfg.episodes_per_cell; ++e)
        jobs.push_back({mode, d, e, eval_episode_seed(cfg.seed_base, d, e)});

  std::vector<EpisodeResult> episodes(jobs.size());
  std::atomic<size_t> next_job{0};
  auto worker = [&]() {
    // Each worker owns one backend instance per mode; the oracle is pure and
    // the scripted/remote kinds keep per-call state behind their own locks.
    auto backend = make_backend(cfg.backend, &spec);
    for (;;) {
      size_t i = next_job.fetch_add(1);
      if (i >= jobs.size()) break;
      const Job& job = jobs[i];
      AgentConfig agent;
      agent.mode = job.mode;
      agent.spec = &spec;
      agent.backend = backend.get();
      agent.catalog = &cfg.catalog;
      agent.decision_period = cfg.decision_period;
      agent.retry_budget = cfg.retry_budget;
      EpisodeParams params;
      params.seed = job.seed;
      params.difficulty = job.difficulty;
      params.anchors = cfg.anchors;
      params.world_cfg = cfg.world_cfg;
      params.catalog = cfg.catalog;
      episodes[i] = run_agent_episode(agent, params);
    }
  };
  int n_workers = std::max(1, cfg.workers);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  EvalReport report;
  for (AgentMode mode : cfg.modes) {
    for (int d : cfg.difficulties) {
      std::vector<MatchResult> cell;
      for (size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].mode == mode && jobs[i].difficulty == d)
          cell.push_back(episodes[i].result);
      if (cell.empty()) continue;
      EvalRow row;
      row.mode = mode;
      row.difficulty = d;
      row.episodes = static_cast<int>(cell.size());
      for (const auto& r : cell) {
        if (r.outcome == Outcome::win_a)
          ++row.wins;
        else if (r.outcome == Outcome::win_b)
          ++row.losses;
        else
          ++row.draws;
      }
      row.win_rate_pct = win_rate(cell);
      row.production = production_metrics(cell, cfg.catalog);
      report.rows.push_back(std::move(row));
      for (auto& r : cell) report.results.push_back(std::move(r));
    }
  }

  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    {
      std::ofstream f(fs::path(cfg.out_dir) / "report.csv", std::ios::binary);
      if (!f) throw Error("cannot write report.csv under " + cfg.out_dir);
      f << report.to_csv(cfg.catalog);
    }
    {
      std::ofstream f(fs::path(cfg.out_dir) / "results.jsonl", std::ios::binary);
      if (!f) throw Error("cannot write results.jsonl under " + cfg.out_dir);
      for (const auto& r : report.results) f << r.to_json().dump() << '\n';
    }
    if (cfg.write_traces) {
      fs::create_directories(fs::path(cfg.out_dir) / "traces");
      for (size_t i = 0; i < jobs.size(); ++i) {
        const Job& job = jobs[i];
        std::string name = std::string(agent_mode_name(job.mode)) + "_d" +
                           std::to_string(job.difficulty) + "_s" + std::to_string(job.seed) +
                           ".jsonl";
        std::ofstream f(fs::path(cfg.out_dir) / "traces" / name, std::ios::binary);
        for (const auto& t : episodes[i].decisions) f << t.to_json().dump() << '\n';
      }
    }
  }
  return report;
}

}  // namespace strategos
