#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "strategos/common.hpp"

namespace strategos {

enum class Tier { basic, advanced };

inline const char* tier_name(Tier t) { return t == Tier::basic ? "basic" : "advanced"; }

inline std::optional<Tier> parse_tier(std::string_view s) {
  if (s == "basic") return Tier::basic;
  if (s == "advanced") return Tier::advanced;
  return std::nullopt;
}

// A trainable unit type. Advanced-tier types gate on a prerequisite structure.
struct UnitTypeDef {
  std::string name;
  int mineral_cost = 0;
  int gas_cost = 0;
  int build_ticks = 1;
  Tier tier = Tier::basic;
  int attack = 0;  // damage dealt per combat tick
  int hp = 1;
  std::string prerequisite;  // structure name; empty = none
};

// A buildable structure type. Structures do not fight; they are what a
// player defends and what sieges destroy.
struct StructureTypeDef {
  std::string name;
  int mineral_cost = 0;
  int gas_cost = 0;
  int build_ticks = 1;
  int hp = 1;
  std::string prerequisite;  // structure name; empty = none
};

class UnitCatalog {
 public:
  std::vector<UnitTypeDef> units;
  std::vector<StructureTypeDef> structures;

  const UnitTypeDef* unit(std::string_view name) const {
    for (const auto& u : units)
      if (u.name == name) return &u;
    return nullptr;
  }

  const StructureTypeDef* structure(std::string_view name) const {
    for (const auto& s : structures)
      if (s.name == name) return &s;
    return nullptr;
  }

  bool is_unit(std::string_view name) const { return unit(name) != nullptr; }
  bool is_structure(std::string_view name) const { return structure(name) != nullptr; }

  bool is_advanced(std::string_view name) const {
    const UnitTypeDef* u = unit(name);
    return u && u->tier == Tier::advanced;
  }

  // Throws ConfigError if any catalog invariant is broken.
  void validate() const {
    if (units.empty()) throw ConfigError("catalog declares no unit types");
    if (structures.empty()) throw ConfigError("catalog declares no structure types");
    for (const auto& u : units) {
      if (!is_identifier(u.name)) throw ConfigError("unit name is not a token: '" + u.name + "'");
      if (u.mineral_cost <= 0)
        throw ConfigError("unit '" + u.name + "' must have a positive mineral cost");
      if (u.gas_cost < 0) throw ConfigError("unit '" + u.name + "' has a negative gas cost");
      if (u.build_ticks <= 0)
        throw ConfigError("unit '" + u.name + "' must have positive build ticks");
      if (u.hp <= 0) throw ConfigError("unit '" + u.name + "' must have positive hp");
      if (u.attack < 0) throw ConfigError("unit '" + u.name + "' has negative attack");
      if (u.tier == Tier::advanced && u.prerequisite.empty())
        throw ConfigError("advanced unit '" + u.name + "' must name a prerequisite structure");
      if (u.tier == Tier::basic && !u.prerequisite.empty())
        throw ConfigError("basic unit '" + u.name + "' must not have a prerequisite");
      if (!u.prerequisite.empty() && !is_structure(u.prerequisite))
        throw ConfigError("unit '" + u.name + "' requires unknown structure '" + u.prerequisite +
                          "'");
    }
    for (const auto& s : structures) {
      if (!is_identifier(s.name))
        throw ConfigError("structure name is not a token: '" + s.name + "'");
      if (s.mineral_cost <= 0)
        throw ConfigError("structure '" + s.name + "' must have a positive mineral cost");
      if (s.gas_cost < 0) throw ConfigError("structure '" + s.name + "' has a negative gas cost");
      if (s.build_ticks <= 0)
        throw ConfigError("structure '" + s.name + "' must have positive build ticks");
      if (s.hp <= 0) throw ConfigError("structure '" + s.name + "' must have positive hp");
      if (!s.prerequisite.empty() && !is_structure(s.prerequisite))
        throw ConfigError("structure '" + s.name + "' requires unknown structure '" +
                          s.prerequisite + "'");
    }
    auto dup = [](auto names) {
      std::sort(names.begin(), names.end());
      return std::adjacent_find(names.begin(), names.end()) != names.end();
    };
    std::vector<std::string> all;
    for (const auto& u : units) all.push_back(u.name);
    for (const auto& s : structures) all.push_back(s.name);
    if (dup(all)) throw ConfigError("duplicate type name in catalog");
  }
};

// The checked-in default catalog: one worker, two basic and two advanced
// combat units, a base and one tech structure gating the advanced tier.
inline UnitCatalog default_catalog() {
  UnitCatalog c;
  c.units = {
      {"worker", 50, 0, 8, Tier::basic, 0, 20, ""},
      {"guard", 100, 0, 10, Tier::basic, 5, 50, ""},
      {"archer", 125, 0, 12, Tier::basic, 7, 35, ""},
      {"raptor", 125, 50, 16, Tier::advanced, 12, 80, "forge"},
      {"golem", 200, 100, 24, Tier::advanced, 20, 150, "forge"},
  };
  c.structures = {
      {"base", 400, 0, 40, 400, ""},
      {"forge", 150, 0, 20, 200, "base"},
  };
  return c;
}

// Shared immutable instance for call sites that don't carry a config.
inline const UnitCatalog& shared_default_catalog() {
  static const UnitCatalog c = default_catalog();
  return c;
}

// ---- JSON (config file) ----

inline void to_json(nlohmann::ordered_json& j, const UnitTypeDef& u) {
  j = {{"name", u.name},         {"mineral_cost", u.mineral_cost},
       {"gas_cost", u.gas_cost}, {"build_ticks", u.build_ticks},
       {"tier", tier_name(u.tier)}, {"attack", u.attack},
       {"hp", u.hp}};
  if (!u.prerequisite.empty()) j["prerequisite"] = u.prerequisite;
}

inline void to_json(nlohmann::ordered_json& j, const StructureTypeDef& s) {
  j = {{"name", s.name},         {"mineral_cost", s.mineral_cost},
       {"gas_cost", s.gas_cost}, {"build_ticks", s.build_ticks},
       {"hp", s.hp}};
  if (!s.prerequisite.empty()) j["prerequisite"] = s.prerequisite;
}

inline UnitTypeDef unit_from_json(const nlohmann::json& j) {
  UnitTypeDef u;
  u.name = j.at("name").get<std::string>();
  u.mineral_cost = j.at("mineral_cost").get<int>();
  u.gas_cost = j.at("gas_cost").get<int>();
  u.build_ticks = j.at("build_ticks").get<int>();
  auto tier = parse_tier(j.at("tier").get<std::string>());
  if (!tier) throw ConfigError("unit '" + u.name + "': unknown tier");
  u.tier = *tier;
  u.attack = j.at("attack").get<int>();
  u.hp = j.at("hp").get<int>();
  u.prerequisite = j.value("prerequisite", std::string{});
  return u;
}

inline StructureTypeDef structure_from_json(const nlohmann::json& j) {
  StructureTypeDef s;
  s.name = j.at("name").get<std::string>();
  s.mineral_cost = j.at("mineral_cost").get<int>();
  s.gas_cost = j.at("gas_cost").get<int>();
  s.build_ticks = j.at("build_ticks").get<int>();
  s.hp = j.at("hp").get<int>();
  s.prerequisite = j.value("prerequisite", std::string{});
  return s;
}

inline nlohmann::ordered_json catalog_to_json(const UnitCatalog& c) {
  nlohmann::ordered_json j;
  j["units"] = nlohmann::ordered_json::array();
  for (const auto& u : c.units) {
    nlohmann::ordered_json ju;
    to_json(ju, u);
    j["units"].push_back(ju);
  }
  j["structures"] = nlohmann::ordered_json::array();
  for (const auto& s : c.structures) {
    nlohmann::ordered_json js;
    to_json(js, s);
    j["structures"].push_back(js);
  }
  return j;
}

inline UnitCatalog catalog_from_json(const nlohmann::json& j) {
  UnitCatalog c;
  for (const auto& ju : j.at("units")) c.units.push_back(unit_from_json(ju));
  for (const auto& js : j.at("structures")) c.structures.push_back(structure_from_json(js));
  c.validate();
  return c;
}

}  // namespace strategos
