#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strategos/common.hpp"

namespace strategos {

// Regions as seen by one player. The world's absolute three-region map is
// translated into this player-relative view so a single machine spec can
// drive either side.
enum class Region { own_home, center, enemy_home };

inline const char* region_name(Region r) {
  switch (r) {
    case Region::own_home: return "own_home";
    case Region::center: return "center";
    case Region::enemy_home: return "enemy_home";
  }
  return "own_home";
}

inline std::optional<Region> parse_region(std::string_view s) {
  if (s == "own_home") return Region::own_home;
  if (s == "center") return Region::center;
  if (s == "enemy_home") return Region::enemy_home;
  return std::nullopt;
}

struct TypeCount {
  std::string type;
  int count = 0;
  bool operator==(const TypeCount&) const = default;
};

struct QueueItem {
  std::string type;
  int remaining = 0;  // ticks until completion
  bool operator==(const QueueItem&) const = default;
};

struct ArmyUnit {
  std::string type;
  int hp = 1;
  bool operator==(const ArmyUnit&) const = default;
};

struct CombatSummary {
  int own_losses = 0;
  int enemy_losses = 0;
  bool operator==(const CombatSummary&) const = default;
};

// Fog-of-war-filtered view of the world for one player. Enemy entries appear
// only for regions covered by this player's presence (army, home structures,
// or a stationed scout). The three *_count fields are derived at observation
// time so predicate evaluation needs nothing but this struct.
struct Observation {
  long long tick = 0;
  int minerals = 0;
  int gas = 0;
  int worker_count = 0;
  std::vector<TypeCount> structures;       // own, sorted by type name
  std::vector<QueueItem> production_queue; // own, enqueue order
  std::vector<ArmyUnit> army;              // own units with current hp
  int advanced_supply = 0;                 // own advanced-tier units in army
  int base_structure_count = 0;            // own structures with no prerequisite
  int tech_structure_count = 0;            // own structures gated on another structure
  Region army_location = Region::own_home; // meaningful only when army non-empty
  std::optional<Region> scout_location;
  std::vector<TypeCount> visible_enemy_army;       // sorted by type name
  std::vector<TypeCount> visible_enemy_structures; // sorted by type name
  std::optional<CombatSummary> last_combat;

  int army_supply() const { return static_cast<int>(army.size()); }
  int visible_enemy_supply() const {
    int n = 0;
    for (const auto& tc : visible_enemy_army) n += tc.count;
    return n;
  }
  int visible_enemy_structure_total() const {
    int n = 0;
    for (const auto& tc : visible_enemy_structures) n += tc.count;
    return n;
  }
  int structure_total() const {
    int n = 0;
    for (const auto& tc : structures) n += tc.count;
    return n;
  }
};

// ============================================================================
// Feature catalog — the closed set of numeric features predicate expressions
// may reference. Every feature is total over any Observation.
// ============================================================================

enum class Feature {
  tick,
  minerals,
  gas,
  worker_count,
  own_army_supply,
  own_advanced_supply,
  advanced_fraction,
  visible_enemy_army_supply,
  visible_enemy_structure_count,
  enemy_visible,
  own_structure_count,
  base_structure_count,
  tech_structure_count,
  production_queue_len,
  last_own_losses,
  last_enemy_losses,
  army_at_own_home,
  army_at_center,
  army_at_enemy_home,
};

struct FeatureInfo {
  Feature feature;
  const char* name;
};

inline const std::vector<FeatureInfo>& feature_catalog() {
  static const std::vector<FeatureInfo> table = {
      {Feature::tick, "tick"},
      {Feature::minerals, "minerals"},
      {Feature::gas, "gas"},
      {Feature::worker_count, "worker_count"},
      {Feature::own_army_supply, "own_army_supply"},
      {Feature::own_advanced_supply, "own_advanced_supply"},
      {Feature::advanced_fraction, "advanced_fraction"},
      {Feature::visible_enemy_army_supply, "visible_enemy_army_supply"},
      {Feature::visible_enemy_structure_count, "visible_enemy_structure_count"},
      {Feature::enemy_visible, "enemy_visible"},
      {Feature::own_structure_count, "own_structure_count"},
      {Feature::base_structure_count, "base_structure_count"},
      {Feature::tech_structure_count, "tech_structure_count"},
      {Feature::production_queue_len, "production_queue_len"},
      {Feature::last_own_losses, "last_own_losses"},
      {Feature::last_enemy_losses, "last_enemy_losses"},
      {Feature::army_at_own_home, "army_at_own_home"},
      {Feature::army_at_center, "army_at_center"},
      {Feature::army_at_enemy_home, "army_at_enemy_home"},
  };
  return table;
}

inline std::optional<Feature> parse_feature(std::string_view name) {
  for (const auto& fi : feature_catalog())
    if (name == fi.name) return fi.feature;
  return std::nullopt;
}

inline const char* feature_name(Feature f) {
  for (const auto& fi : feature_catalog())
    if (fi.feature == f) return fi.name;
  return "?";
}

inline double feature_value(const Observation& o, Feature f) {
  switch (f) {
    case Feature::tick: return static_cast<double>(o.tick);
    case Feature::minerals: return o.minerals;
    case Feature::gas: return o.gas;
    case Feature::worker_count: return o.worker_count;
    case Feature::own_army_supply: return o.army_supply();
    case Feature::own_advanced_supply: return o.advanced_supply;
    case Feature::advanced_fraction:
      return o.army.empty() ? 0.0
                            : static_cast<double>(o.advanced_supply) /
                                  static_cast<double>(o.army.size());
    case Feature::visible_enemy_army_supply: return o.visible_enemy_supply();
    case Feature::visible_enemy_structure_count: return o.visible_enemy_structure_total();
    case Feature::enemy_visible: return o.visible_enemy_supply() > 0 ? 1.0 : 0.0;
    case Feature::own_structure_count: return o.structure_total();
    case Feature::base_structure_count: return o.base_structure_count;
    case Feature::tech_structure_count: return o.tech_structure_count;
    case Feature::production_queue_len: return static_cast<double>(o.production_queue.size());
    case Feature::last_own_losses: return o.last_combat ? o.last_combat->own_losses : 0.0;
    case Feature::last_enemy_losses: return o.last_combat ? o.last_combat->enemy_losses : 0.0;
    case Feature::army_at_own_home:
      return (!o.army.empty() && o.army_location == Region::own_home) ? 1.0 : 0.0;
    case Feature::army_at_center:
      return (!o.army.empty() && o.army_location == Region::center) ? 1.0 : 0.0;
    case Feature::army_at_enemy_home:
      return (!o.army.empty() && o.army_location == Region::enemy_home) ? 1.0 : 0.0;
  }
  return 0.0;
}

// ============================================================================
// Textual rendering (o_t as the prompt sees it)
// ============================================================================

namespace detail {

inline std::string type_count_list(const std::vector<TypeCount>& items) {
  std::vector<std::string> parts;
  for (const auto& tc : items) parts.push_back(tc.type + " x" + std::to_string(tc.count));
  return join(parts, ", ");
}

inline std::string army_breakdown(const std::vector<ArmyUnit>& army) {
  // Aggregate by type, preserving first-seen order.
  std::vector<TypeCount> counts;
  for (const auto& u : army) {
    bool found = false;
    for (auto& tc : counts)
      if (tc.type == u.type) {
        ++tc.count;
        found = true;
        break;
      }
    if (!found) counts.push_back({u.type, 1});
  }
  return type_count_list(counts);
}

}  // namespace detail

// Pure, stable key-value rendering. Every field a predicate feature draws on
// appears verbatim; absence of enemy contact is stated, never omitted.
inline std::string render_observation(const Observation& o) {
  std::string out;
  auto line = [&out](const std::string& s) {
    out += s;
    out += '\n';
  };
  line("tick: " + std::to_string(o.tick));
  line("minerals: " + std::to_string(o.minerals));
  line("gas: " + std::to_string(o.gas));
  line("workers: " + std::to_string(o.worker_count));
  line("own army supply: " + std::to_string(o.army_supply()));
  line("own advanced units: " + std::to_string(o.advanced_supply));
  line("advanced fraction: " + std::to_string(o.advanced_supply) + "/" +
       std::to_string(o.army_supply()));
  if (o.army.empty())
    line("army: none");
  else
    line("army: " + detail::army_breakdown(o.army) + " at " + region_name(o.army_location));
  line("structures (" + std::to_string(o.structure_total()) +
       "): " + (o.structures.empty() ? "none" : detail::type_count_list(o.structures)));
  line("base structures: " + std::to_string(o.base_structure_count));
  line("tech structures: " + std::to_string(o.tech_structure_count));
  if (o.production_queue.empty()) {
    line("production queue (0): empty");
  } else {
    std::vector<std::string> parts;
    for (const auto& q : o.production_queue)
      parts.push_back(q.type + "(" + std::to_string(q.remaining) + " ticks)");
    line("production queue (" + std::to_string(o.production_queue.size()) +
         "): " + join(parts, ", "));
  }
  line(std::string("scout position: ") +
       (o.scout_location ? region_name(*o.scout_location) : "none"));
  line("visible enemy army supply: " + std::to_string(o.visible_enemy_supply()));
  if (o.visible_enemy_army.empty())
    line("visible enemy army: no enemy units visible");
  else
    line("visible enemy army: " + detail::type_count_list(o.visible_enemy_army));
  if (o.visible_enemy_structures.empty())
    line("visible enemy structures: none visible");
  else
    line("visible enemy structures: " + detail::type_count_list(o.visible_enemy_structures));
  if (o.last_combat)
    line("last combat: lost " + std::to_string(o.last_combat->own_losses) + ", destroyed " +
         std::to_string(o.last_combat->enemy_losses));
  else
    line("last combat: none");
  return out;
}

}  // namespace strategos
