#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "strategos/actions.hpp"
#include "strategos/catalog.hpp"
#include "strategos/common.hpp"
#include "strategos/observation.hpp"

namespace strategos {

// ============================================================================
// Map & players. The world is an abstract three-region graph
// home_a -- center -- home_b; armies move one region per tick.
// ============================================================================

enum class AbsRegion { home_a = 0, center = 1, home_b = 2 };
enum class PlayerId { a = 0, b = 1 };

inline const char* abs_region_name(AbsRegion r) {
  switch (r) {
    case AbsRegion::home_a: return "home_a";
    case AbsRegion::center: return "center";
    case AbsRegion::home_b: return "home_b";
  }
  return "center";
}

inline const char* player_name(PlayerId p) { return p == PlayerId::a ? "a" : "b"; }

inline PlayerId opponent_of(PlayerId p) { return p == PlayerId::a ? PlayerId::b : PlayerId::a; }

inline AbsRegion home_of(PlayerId p) {
  return p == PlayerId::a ? AbsRegion::home_a : AbsRegion::home_b;
}

inline AbsRegion to_absolute(PlayerId p, Region r) {
  switch (r) {
    case Region::own_home: return home_of(p);
    case Region::center: return AbsRegion::center;
    case Region::enemy_home: return home_of(opponent_of(p));
  }
  return AbsRegion::center;
}

inline Region to_relative(PlayerId p, AbsRegion r) {
  if (r == AbsRegion::center) return Region::center;
  return r == home_of(p) ? Region::own_home : Region::enemy_home;
}

inline AbsRegion step_toward(AbsRegion cur, AbsRegion dest) {
  int c = static_cast<int>(cur);
  int d = static_cast<int>(dest);
  if (c < d) return static_cast<AbsRegion>(c + 1);
  if (c > d) return static_cast<AbsRegion>(c - 1);
  return cur;
}

// ============================================================================
// World state
// ============================================================================

struct StructureInstance {
  std::string type;
  int hp = 1;
  bool operator==(const StructureInstance&) const = default;
};

struct QueueEntry {
  std::string type;
  int remaining = 0;
  bool is_structure = false;
  long long enqueued_tick = 0;
  bool operator==(const QueueEntry&) const = default;
};

struct PlayerState {
  int minerals = 0;
  int gas = 0;
  long long mineral_carry_micro = 0;  // sub-unit income remainder, denominator 10^6
  long long gas_carry_micro = 0;
  int income_mult_permille = 1000;
  int worker_count = 0;
  std::vector<StructureInstance> structures;
  std::vector<QueueEntry> production_queue;
  std::vector<ArmyUnit> army;
  AbsRegion army_location = AbsRegion::center;
  AbsRegion army_destination = AbsRegion::center;
  std::optional<AbsRegion> scout_location;
  long long scout_placed_tick = -1;
  std::optional<CombatSummary> last_combat;

  bool operator==(const PlayerState&) const = default;

  int structure_count(std::string_view type) const {
    int n = 0;
    for (const auto& s : structures) n += (s.type == type) ? 1 : 0;
    return n;
  }
  bool has_structure(std::string_view type) const { return structure_count(type) > 0; }
};

struct WorldState {
  long long tick = 0;
  std::array<PlayerState, 2> players;
  uint64_t rng_seed = 0;

  bool operator==(const WorldState&) const = default;

  PlayerState& player(PlayerId p) { return players[static_cast<size_t>(p)]; }
  const PlayerState& player(PlayerId p) const { return players[static_cast<size_t>(p)]; }
};

// Fixed world parameters; checked into config so episodes are reproducible.
struct WorldConfig {
  int starting_minerals = 200;
  int starting_gas = 0;
  int starting_workers = 12;
  int mineral_rate_permille = 1000;  // minerals per worker per tick, x1000
  int gas_rate_permille = 200;       // gas per worker per tick, x1000
  std::string worker_type = "worker";
  long long tick_limit = 2000;
  long long production_cutoff_tick = 672;  // early-game metric window
};

inline WorldState initial_world(const UnitCatalog& catalog, const WorldConfig& cfg,
                                uint64_t seed) {
  const StructureTypeDef* base = nullptr;
  for (const auto& s : catalog.structures)
    if (s.prerequisite.empty()) {
      base = &s;
      break;
    }
  if (!base) throw ConfigError("catalog has no prerequisite-free base structure");
  WorldState w;
  w.tick = 0;
  w.rng_seed = seed;
  for (PlayerId p : {PlayerId::a, PlayerId::b}) {
    PlayerState& ps = w.player(p);
    ps.minerals = cfg.starting_minerals;
    ps.gas = cfg.starting_gas;
    ps.worker_count = cfg.starting_workers;
    ps.structures.push_back({base->name, base->hp});
    ps.army_location = home_of(p);
    ps.army_destination = home_of(p);
  }
  return w;
}

// ============================================================================
// Observation (fog of war)
// ============================================================================

namespace detail {

inline std::vector<AbsRegion> presence_regions(const PlayerState& ps, PlayerId p) {
  std::vector<AbsRegion> out;
  if (ps.worker_count > 0 || !ps.structures.empty()) out.push_back(home_of(p));
  if (!ps.army.empty() &&
      std::find(out.begin(), out.end(), ps.army_location) == out.end())
    out.push_back(ps.army_location);
  if (ps.scout_location &&
      std::find(out.begin(), out.end(), *ps.scout_location) == out.end())
    out.push_back(*ps.scout_location);
  return out;
}

inline std::vector<TypeCount> count_by_type_sorted(const std::vector<ArmyUnit>& units) {
  std::vector<TypeCount> counts;
  for (const auto& u : units) {
    bool found = false;
    for (auto& tc : counts)
      if (tc.type == u.type) {
        ++tc.count;
        found = true;
      }
    if (!found) counts.push_back({u.type, 1});
  }
  std::sort(counts.begin(), counts.end(),
            [](const TypeCount& x, const TypeCount& y) { return x.type < y.type; });
  return counts;
}

inline std::vector<TypeCount> count_structures_sorted(
    const std::vector<StructureInstance>& structures) {
  std::vector<TypeCount> counts;
  for (const auto& s : structures) {
    bool found = false;
    for (auto& tc : counts)
      if (tc.type == s.type) {
        ++tc.count;
        found = true;
      }
    if (!found) counts.push_back({s.type, 1});
  }
  std::sort(counts.begin(), counts.end(),
            [](const TypeCount& x, const TypeCount& y) { return x.type < y.type; });
  return counts;
}

}  // namespace detail

// Player p's fog-filtered view: enemy entries appear only for regions covered
// by p's presence (home while standing, army position, stationed scout).
inline Observation observe(const WorldState& w, PlayerId p, const UnitCatalog& catalog) {
  const PlayerState& own = w.player(p);
  const PlayerState& foe = w.player(opponent_of(p));
  Observation o;
  o.tick = w.tick;
  o.minerals = own.minerals;
  o.gas = own.gas;
  o.worker_count = own.worker_count;
  o.structures = detail::count_structures_sorted(own.structures);
  for (const auto& q : own.production_queue) o.production_queue.push_back({q.type, q.remaining});
  o.army = own.army;
  o.advanced_supply = 0;
  for (const auto& u : own.army)
    if (catalog.is_advanced(u.type)) ++o.advanced_supply;
  o.base_structure_count = 0;
  o.tech_structure_count = 0;
  for (const auto& s : own.structures) {
    const StructureTypeDef* def = catalog.structure(s.type);
    if (def && def->prerequisite.empty())
      ++o.base_structure_count;
    else
      ++o.tech_structure_count;
  }
  o.army_location = to_relative(p, own.army_location);
  if (own.scout_location) o.scout_location = to_relative(p, *own.scout_location);

  std::vector<AbsRegion> presence = detail::presence_regions(own, p);
  auto present = [&presence](AbsRegion r) {
    return std::find(presence.begin(), presence.end(), r) != presence.end();
  };
  if (!foe.army.empty() && present(foe.army_location))
    o.visible_enemy_army = detail::count_by_type_sorted(foe.army);
  if (!foe.structures.empty() && present(home_of(opponent_of(p))))
    o.visible_enemy_structures = detail::count_structures_sorted(foe.structures);
  o.last_combat = own.last_combat;
  return o;
}

// ============================================================================
// Stepping
// ============================================================================

enum class Outcome { ongoing, win_a, win_b, draw };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::ongoing: return "ongoing";
    case Outcome::win_a: return "win_a";
    case Outcome::win_b: return "win_b";
    case Outcome::draw: return "draw";
  }
  return "ongoing";
}

// Win when the opposing home-base structure count reaches zero; draw at the
// tick limit or on simultaneous elimination.
inline Outcome terminal_check(const WorldState& w, const WorldConfig& cfg) {
  bool a_dead = w.player(PlayerId::a).structures.empty();
  bool b_dead = w.player(PlayerId::b).structures.empty();
  if (a_dead && b_dead) return Outcome::draw;
  if (a_dead) return Outcome::win_b;
  if (b_dead) return Outcome::win_a;
  if (w.tick >= cfg.tick_limit) return Outcome::draw;
  return Outcome::ongoing;
}

struct Completion {
  PlayerId player;
  std::string type;
  bool is_structure = false;
  long long tick = 0;
};

struct StepResult {
  WorldState world;
  std::array<std::vector<ActionCommand>, 2> executed;  // echo of the applied batches
  std::vector<Completion> completions;
  bool combat_occurred = false;
  // Per-player losses this tick (own perspective), valid when combat_occurred.
  std::array<CombatSummary, 2> combat;
};

namespace detail {

// Applies `damage` to `units`, removing whole units lowest-current-hp-first
// (ties by type name, then stable index); leftover damage wounds the next
// unit in that order. Returns the number of units removed.
template <typename T>
int apply_damage_lowest_first(std::vector<T>& units, long long damage) {
  if (units.empty() || damage <= 0) return 0;
  std::vector<size_t> order(units.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&units](size_t x, size_t y) {
    if (units[x].hp != units[y].hp) return units[x].hp < units[y].hp;
    return units[x].type < units[y].type;
  });
  std::vector<bool> dead(units.size(), false);
  int removed = 0;
  for (size_t idx : order) {
    if (damage <= 0) break;
    if (damage >= units[idx].hp) {
      damage -= units[idx].hp;
      dead[idx] = true;
      ++removed;
    } else {
      units[idx].hp -= static_cast<int>(damage);
      damage = 0;
    }
  }
  std::vector<T> survivors;
  survivors.reserve(units.size() - static_cast<size_t>(removed));
  for (size_t i = 0; i < units.size(); ++i)
    if (!dead[i]) survivors.push_back(std::move(units[i]));
  units = std::move(survivors);
  return removed;
}

inline long long army_attack(const std::vector<ArmyUnit>& army, const UnitCatalog& catalog) {
  long long total = 0;
  for (const auto& u : army) {
    const UnitTypeDef* def = catalog.unit(u.type);
    if (def) total += def->attack;
  }
  return total;
}

}  // namespace detail

// Advances the world by one tick. Both action batches must already have
// passed validate_actions against the acting player's observation of this
// very state; anything invalid here is a contract violation, never silently
// dropped. Deterministic: identical (world, batches) give identical results.
inline StepResult step_world(const WorldState& world,
                             const std::vector<ActionCommand>& actions_a,
                             const std::vector<ActionCommand>& actions_b,
                             const UnitCatalog& catalog, const WorldConfig& cfg) {
  // Contract re-check through the same judge the orchestrator uses.
  for (PlayerId p : {PlayerId::a, PlayerId::b}) {
    const auto& batch = p == PlayerId::a ? actions_a : actions_b;
    if (batch.empty()) continue;
    Observation own_view = observe(world, p, catalog);
    std::vector<ActionCandidate> candidates;
    for (const auto& cmd : batch) candidates.push_back({cmd, cmd.to_text()});
    auto [kept, report] = validate_actions(candidates, catalog, own_view);
    if (report.rejected > 0) {
      for (size_t i = 0; i < report.verdicts.size(); ++i)
        if (report.verdicts[i] != Verdict::valid)
          throw ContractViolation("unvalidated action reached step_world: " +
                                  batch[i].to_text() + " (" +
                                  verdict_name(report.verdicts[i]) + ")");
    }
  }

  StepResult result;
  result.world = world;
  WorldState& w = result.world;

  // Phase 1: purchases and orders.
  for (PlayerId p : {PlayerId::a, PlayerId::b}) {
    PlayerState& ps = w.player(p);
    const auto& batch = p == PlayerId::a ? actions_a : actions_b;
    for (const auto& cmd : batch) {
      switch (cmd.verb) {
        case Verb::train: {
          const UnitTypeDef* def = catalog.unit(cmd.argument);
          ps.minerals -= def->mineral_cost;
          ps.gas -= def->gas_cost;
          ps.production_queue.push_back({def->name, def->build_ticks, false, world.tick});
          break;
        }
        case Verb::build: {
          const StructureTypeDef* def = catalog.structure(cmd.argument);
          ps.minerals -= def->mineral_cost;
          ps.gas -= def->gas_cost;
          ps.production_queue.push_back({def->name, def->build_ticks, true, world.tick});
          break;
        }
        case Verb::attack:
          ps.army_destination = to_absolute(p, *parse_region(cmd.argument));
          break;
        case Verb::retreat:
          ps.army_destination = home_of(p);
          break;
        case Verb::scout:
          ps.scout_location = to_absolute(p, *parse_region(cmd.argument));
          ps.scout_placed_tick = world.tick;
          break;
        case Verb::noop:
          break;
      }
      result.executed[static_cast<size_t>(p)].push_back(cmd);
    }
  }

  // Phase 2: income (integer micro-unit accumulation; exact and carry-stable).
  for (PlayerId p : {PlayerId::a, PlayerId::b}) {
    PlayerState& ps = w.player(p);
    long long workers = ps.worker_count;
    ps.mineral_carry_micro +=
        workers * static_cast<long long>(cfg.mineral_rate_permille) * ps.income_mult_permille;
    ps.minerals += static_cast<int>(ps.mineral_carry_micro / 1000000);
    ps.mineral_carry_micro %= 1000000;
    ps.gas_carry_micro +=
        workers * static_cast<long long>(cfg.gas_rate_permille) * ps.income_mult_permille;
    ps.gas += static_cast<int>(ps.gas_carry_micro / 1000000);
    ps.gas_carry_micro %= 1000000;
  }

  // Phase 3: production queues advance; completions join the board.
  for (PlayerId p : {PlayerId::a, PlayerId::b}) {
    PlayerState& ps = w.player(p);
    std::vector<QueueEntry> still_building;
    for (auto& q : ps.production_queue) {
      if (q.enqueued_tick < world.tick) --q.remaining;  // not on the enqueue tick
      if (q.remaining > 0) {
        still_building.push_back(q);
        continue;
      }
      result.completions.push_back({p, q.type, q.is_structure, world.tick});
      if (q.is_structure) {
        const StructureTypeDef* def = catalog.structure(q.type);
        ps.structures.push_back({q.type, def->hp});
      } else if (q.type == cfg.worker_type) {
        ps.worker_count += 1;
      } else {
        const UnitTypeDef* def = catalog.unit(q.type);
        if (ps.army.empty()) ps.army_location = home_of(p);
        ps.army.push_back({q.type, def->hp});
      }
    }
    ps.production_queue = std::move(still_building);
  }

  // Phase 4: movement, one region per tick toward the destination.
  for (PlayerId p : {PlayerId::a, PlayerId::b}) {
    PlayerState& ps = w.player(p);
    if (!ps.army.empty()) ps.army_location = step_toward(ps.army_location, ps.army_destination);
  }

  // Phase 5: combat. Armies sharing a region exchange their total attack
  // simultaneously; losses come off lowest-hp-first. A home region with no
  // defending army at the start of the phase is open to siege.
  PlayerState& pa = w.player(PlayerId::a);
  PlayerState& pb = w.player(PlayerId::b);
  bool armies_meet = !pa.army.empty() && !pb.army.empty() && pa.army_location == pb.army_location;
  bool a_sieges = !pa.army.empty() && pa.army_location == AbsRegion::home_b &&
                  (pb.army.empty() || pb.army_location != AbsRegion::home_b);
  bool b_sieges = !pb.army.empty() && pb.army_location == AbsRegion::home_a &&
                  (pa.army.empty() || pa.army_location != AbsRegion::home_a);

  int a_losses = 0;
  int b_losses = 0;
  if (armies_meet) {
    long long dmg_to_b = detail::army_attack(pa.army, catalog);
    long long dmg_to_a = detail::army_attack(pb.army, catalog);
    a_losses = detail::apply_damage_lowest_first(pa.army, dmg_to_a);
    b_losses = detail::apply_damage_lowest_first(pb.army, dmg_to_b);
  }
  if (a_sieges)
    detail::apply_damage_lowest_first(pb.structures, detail::army_attack(pa.army, catalog));
  if (b_sieges)
    detail::apply_damage_lowest_first(pa.structures, detail::army_attack(pb.army, catalog));

  // Phase 6: scouts in a region occupied by an enemy army are lost. A scout
  // placed this very tick survives until the next, so a contested region is
  // observed exactly once before the scout dies.
  for (PlayerId p : {PlayerId::a, PlayerId::b}) {
    PlayerState& ps = w.player(p);
    const PlayerState& foe = w.player(opponent_of(p));
    if (ps.scout_location && ps.scout_placed_tick < world.tick && !foe.army.empty() &&
        foe.army_location == *ps.scout_location) {
      ps.scout_location.reset();
      ps.scout_placed_tick = -1;
    }
  }

  // Phase 7: combat summaries (persist until the next combat).
  if (a_losses + b_losses > 0) {
    result.combat_occurred = true;
    pa.last_combat = CombatSummary{a_losses, b_losses};
    pb.last_combat = CombatSummary{b_losses, a_losses};
    result.combat[0] = *pa.last_combat;
    result.combat[1] = *pb.last_combat;
  }

  // Armies that ceased to exist snap home so location stays canonical.
  for (PlayerId p : {PlayerId::a, PlayerId::b}) {
    PlayerState& ps = w.player(p);
    if (ps.army.empty()) {
      ps.army_location = home_of(p);
      ps.army_destination = home_of(p);
    }
  }

  w.tick = world.tick + 1;
  return result;
}

// ============================================================================
// Scripted opponents — difficulty-graded stand-ins for a built-in AI.
// ============================================================================

struct TypeWeight {
  std::string type;
  int weight = 0;
};

struct OpponentScript {
  int difficulty = 1;
  int income_mult_permille = 1000;
  long long first_attack_tick = 600;
  long long attack_period = 400;
  int advanced_mix_permille = 0;
  int worker_cap = 12;
  std::vector<TypeWeight> unit_mix;  // training distribution, weights sum > 0
};

// Anchor parameter sets for difficulty 1 and 7; levels in between are linear
// interpolations (integer arithmetic, step chosen so all steps are exact).
struct OpponentAnchorParams {
  int income_mult_permille = 1000;
  long long first_attack_tick = 600;
  long long attack_period = 400;
  int advanced_mix_permille = 0;
  int worker_cap = 12;
};

struct OpponentAnchors {
  OpponentAnchorParams level1{800, 600, 420, 0, 12};
  OpponentAnchorParams level7{2000, 240, 120, 600, 18};

  void validate() const {
    if (level1.income_mult_permille <= 0 || level1.first_attack_tick <= 0 ||
        level1.attack_period <= 0 || level7.income_mult_permille <= 0 ||
        level7.first_attack_tick <= 0 || level7.attack_period <= 0)
      throw ConfigError("opponent anchors: rates, ticks and periods must be positive");
    if (level7.income_mult_permille < level1.income_mult_permille)
      throw ConfigError("opponent anchors: income multiplier must be non-decreasing");
    if (level7.first_attack_tick > level1.first_attack_tick)
      throw ConfigError("opponent anchors: first attack tick must be non-increasing");
    if (level7.attack_period > level1.attack_period)
      throw ConfigError("opponent anchors: attack period must be non-increasing");
    if (level7.advanced_mix_permille < level1.advanced_mix_permille)
      throw ConfigError("opponent anchors: advanced mix must be non-decreasing");
    if (level7.worker_cap < level1.worker_cap)
      throw ConfigError("opponent anchors: worker cap must be non-decreasing");
  }
};

inline OpponentScript opponent_script_for(int difficulty, const OpponentAnchors& anchors,
                                          const UnitCatalog& catalog,
                                          const std::string& worker_type = "worker") {
  if (difficulty < 1 || difficulty > 7)
    throw ConfigError("opponent difficulty must be in 1..7, got " + std::to_string(difficulty));
  anchors.validate();
  auto lerp = [difficulty](long long v1, long long v7) {
    return v1 + (v7 - v1) * (difficulty - 1) / 6;
  };
  OpponentScript s;
  s.difficulty = difficulty;
  s.income_mult_permille = static_cast<int>(
      lerp(anchors.level1.income_mult_permille, anchors.level7.income_mult_permille));
  s.first_attack_tick = lerp(anchors.level1.first_attack_tick, anchors.level7.first_attack_tick);
  s.attack_period = lerp(anchors.level1.attack_period, anchors.level7.attack_period);
  s.advanced_mix_permille = static_cast<int>(
      lerp(anchors.level1.advanced_mix_permille, anchors.level7.advanced_mix_permille));
  s.worker_cap =
      static_cast<int>(lerp(anchors.level1.worker_cap, anchors.level7.worker_cap));

  // Training distribution: the advanced share splits 70/30 over advanced
  // types, the rest 60/40 over non-worker basic types (catalog order).
  std::vector<std::string> basics, advanceds;
  for (const auto& u : catalog.units) {
    if (u.name == worker_type) continue;
    (u.tier == Tier::advanced ? advanceds : basics).push_back(u.name);
  }
  int adv = s.advanced_mix_permille;
  int bas = 1000 - adv;
  const std::array<int, 2> basic_split = {6, 4};
  const std::array<int, 2> adv_split = {7, 3};
  for (size_t i = 0; i < basics.size(); ++i)
    s.unit_mix.push_back(
        {basics[i], bas * basic_split[std::min<size_t>(i, 1)] / 10});
  for (size_t i = 0; i < advanceds.size(); ++i)
    s.unit_mix.push_back(
        {advanceds[i], adv * adv_split[std::min<size_t>(i, 1)] / 10});
  return s;
}

// One tick's worth of orders for the scripted side. Deterministic in
// (script, world, seed): economy first, army training drawn from the mix,
// then movement on the attack schedule.
inline std::vector<ActionCommand> run_opponent(const OpponentScript& script,
                                               const WorldState& world,
                                               const UnitCatalog& catalog,
                                               PlayerId self = PlayerId::b,
                                               const std::string& worker_type = "worker") {
  if (script.difficulty < 1 || script.difficulty > 7)
    throw ConfigError("opponent difficulty out of range");
  const PlayerState& ps = world.player(self);
  const PlayerState& foe = world.player(opponent_of(self));
  std::vector<ActionCommand> actions;
  int minerals_left = ps.minerals;
  int gas_left = ps.gas;
  SplitMix64 rng(world.rng_seed ^ (static_cast<uint64_t>(world.tick) * 0x9e3779b97f4a7c15ull) ^
                 static_cast<uint64_t>(self));

  auto queued = [&ps](std::string_view type) {
    for (const auto& q : ps.production_queue)
      if (q.type == type) return true;
    return false;
  };

  // Economy: keep the worker line running.
  const UnitTypeDef* worker = catalog.unit(worker_type);
  int queued_workers = 0;
  for (const auto& q : ps.production_queue)
    if (!q.is_structure && q.type == worker_type) ++queued_workers;
  if (worker && ps.worker_count + queued_workers < script.worker_cap &&
      worker->mineral_cost <= minerals_left && worker->gas_cost <= gas_left) {
    actions.push_back({Verb::train, worker->name});
    minerals_left -= worker->mineral_cost;
    gas_left -= worker->gas_cost;
  }

  // Tech: one prerequisite structure unlocks the advanced share of the mix.
  if (script.advanced_mix_permille > 0) {
    for (const auto& u : catalog.units) {
      if (u.tier != Tier::advanced || u.prerequisite.empty()) continue;
      if (!ps.has_structure(u.prerequisite) && !queued(u.prerequisite)) {
        const StructureTypeDef* def = catalog.structure(u.prerequisite);
        bool prereq_ok = def->prerequisite.empty() || ps.has_structure(def->prerequisite);
        if (prereq_ok && def->mineral_cost <= minerals_left && def->gas_cost <= gas_left) {
          actions.push_back({Verb::build, def->name});
          minerals_left -= def->mineral_cost;
          gas_left -= def->gas_cost;
        }
      }
      break;  // one tech structure is all the default catalog needs
    }
  }

  // Army: up to three weighted draws; stop at the first unaffordable pick.
  long long total_weight = 0;
  for (const auto& tw : script.unit_mix) total_weight += tw.weight;
  for (int draw = 0; draw < 3 && total_weight > 0; ++draw) {
    long long roll = static_cast<long long>(rng.below(static_cast<uint64_t>(total_weight)));
    const TypeWeight* pick = nullptr;
    for (const auto& tw : script.unit_mix) {
      roll -= tw.weight;
      if (roll < 0) {
        pick = &tw;
        break;
      }
    }
    if (!pick) break;
    const UnitTypeDef* def = catalog.unit(pick->type);
    if (!def || def->mineral_cost > minerals_left || def->gas_cost > gas_left) break;
    if (!def->prerequisite.empty() && !ps.has_structure(def->prerequisite)) break;
    actions.push_back({Verb::train, def->name});
    minerals_left -= def->mineral_cost;
    gas_left -= def->gas_cost;
  }

  // Movement: defend the home base first, otherwise attack on schedule.
  if (!ps.army.empty()) {
    bool home_threatened = !foe.army.empty() && foe.army_location == home_of(self);
    if (home_threatened && ps.army_location != home_of(self)) {
      actions.push_back({Verb::retreat, ""});
    } else if (world.tick >= script.first_attack_tick &&
               (world.tick - script.first_attack_tick) % script.attack_period == 0) {
      actions.push_back({Verb::attack, "enemy_home"});
    }
  }
  return actions;
}

}  // namespace strategos
