#pragma once

// Shared builders for the test suites.

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "strategos/strategos.hpp"

namespace test_helpers {

using namespace strategos;

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("test helper: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("strategos_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

// Observation with a standing mid-game economy; tweak fields per test.
struct ObsBuilder {
  Observation obs;

  ObsBuilder() {
    obs.tick = 75;
    obs.minerals = 260;
    obs.gas = 60;
    obs.worker_count = 14;
    obs.structures = {{"base", 1}, {"forge", 1}};
    obs.base_structure_count = 1;
    obs.tech_structure_count = 1;
    obs.army_location = Region::own_home;
  }

  ObsBuilder& army_of(std::string type, int n, int hp, Region where) {
    obs.army.clear();
    for (int i = 0; i < n; ++i) obs.army.push_back({type, hp});
    obs.army_location = where;
    obs.advanced_supply = 0;
    return *this;
  }

  ObsBuilder& enemy(std::string type, int n) {
    obs.visible_enemy_army = {{std::move(type), n}};
    return *this;
  }

  ObsBuilder& resources(int minerals, int gas) {
    obs.minerals = minerals;
    obs.gas = gas;
    return *this;
  }

  Observation build() const { return obs; }
};

// The four-decision reinforcement scenario: the enemy commits a force, takes
// losses, then reveals a much larger force two decisions later.
inline std::vector<Observation> reinforcement_scenario() {
  std::vector<Observation> script;
  script.push_back(
      ObsBuilder().army_of("guard", 12, 50, Region::own_home).enemy("guard", 18).build());
  script.push_back(
      ObsBuilder().army_of("guard", 30, 50, Region::own_home).enemy("guard", 12).build());
  script.push_back(
      ObsBuilder().army_of("guard", 28, 50, Region::center).enemy("guard", 10).build());
  script.push_back(
      ObsBuilder().army_of("guard", 28, 50, Region::center).enemy("guard", 40).build());
  return script;
}

// Identical observation for the non-Markov witness pair: the right move
// depends on whether the doctrine was holding or already committed.
inline Observation ambiguous_observation() {
  return ObsBuilder()
      .army_of("guard", 10, 50, Region::own_home)
      .enemy("guard", 8)
      .resources(80, 0)
      .build();
}

inline StrategyRecord record_with_tactic(const std::string& tactic, long long t = 0) {
  StrategyRecord r;
  r.timestep = t;
  r.set("Tactic", tactic);
  return r;
}

// Uniform random observation over a small feature domain; used for predicate
// properties and oracle totality sweeps.
inline Observation random_observation(std::mt19937_64& rng) {
  auto roll = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  Observation o;
  o.tick = roll(0, 2000);
  o.minerals = roll(0, 1200);
  o.gas = roll(0, 400);
  o.worker_count = roll(0, 20);
  int bases = roll(0, 2);
  int forges = roll(0, 1);
  if (bases) o.structures.push_back({"base", bases});
  if (forges) o.structures.push_back({"forge", forges});
  o.base_structure_count = bases;
  o.tech_structure_count = forges;
  int guards = roll(0, 20);
  int raptors = roll(0, 8);
  for (int i = 0; i < guards; ++i) o.army.push_back({"guard", roll(1, 50)});
  for (int i = 0; i < raptors; ++i) o.army.push_back({"raptor", roll(1, 80)});
  o.advanced_supply = raptors;
  o.army_location = static_cast<Region>(roll(0, 2));
  if (roll(0, 1)) o.scout_location = static_cast<Region>(roll(0, 2));
  int enemies = roll(0, 30);
  if (enemies) o.visible_enemy_army = {{"guard", enemies}};
  int enemy_structs = roll(0, 2);
  if (enemy_structs) o.visible_enemy_structures = {{"base", enemy_structs}};
  if (roll(0, 1)) o.last_combat = CombatSummary{roll(0, 9), roll(0, 9)};
  if (roll(0, 4) == 0) o.production_queue.push_back({"guard", roll(1, 10)});
  return o;
}

}  // namespace test_helpers
