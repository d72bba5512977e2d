#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strategos/catalog.hpp"
#include "strategos/common.hpp"
#include "strategos/memory.hpp"
#include "strategos/observation.hpp"

namespace strategos {

// ============================================================================
// Action commands
//
// The closed verb set and its argument arity:
//   Train(unit_type)  Build(structure_type)  Attack(region)  Scout(region)
//   Retreat()         NoOp()
// ============================================================================

enum class Verb { train, build, attack, retreat, scout, noop };

inline const char* verb_name(Verb v) {
  switch (v) {
    case Verb::train: return "Train";
    case Verb::build: return "Build";
    case Verb::attack: return "Attack";
    case Verb::retreat: return "Retreat";
    case Verb::scout: return "Scout";
    case Verb::noop: return "NoOp";
  }
  return "NoOp";
}

inline std::optional<Verb> parse_verb(std::string_view s) {
  std::string lc = to_lower(s);
  if (lc == "train") return Verb::train;
  if (lc == "build") return Verb::build;
  if (lc == "attack") return Verb::attack;
  if (lc == "retreat") return Verb::retreat;
  if (lc == "scout") return Verb::scout;
  if (lc == "noop") return Verb::noop;
  return std::nullopt;
}

inline bool verb_takes_argument(Verb v) { return v != Verb::retreat && v != Verb::noop; }

struct ActionCommand {
  Verb verb = Verb::noop;
  std::string argument;  // unit type, structure name, or region token; empty for none

  std::string to_text() const { return std::string(verb_name(verb)) + "(" + argument + ")"; }
  bool operator==(const ActionCommand&) const = default;
};

// ============================================================================
// Extraction from raw generated text
// ============================================================================

// One parsed-but-unvalidated action line. `command` is absent when the line
// looked like an action but did not fit the grammar (reported unknown_verb).
struct ActionCandidate {
  std::optional<ActionCommand> command;
  std::string raw;  // the source line, trimmed
  bool operator==(const ActionCandidate&) const = default;
};

namespace detail {

// Strategy line: `[Name]:<value>` — Name an identifier, value non-empty with
// no angle brackets. Whitespace around the line and the colon is tolerated;
// anything else must match exactly.
inline std::optional<std::pair<std::string, std::string>> match_strategy_line(
    std::string_view raw) {
  std::string_view s = trim(raw);
  if (s.size() < 6 || s.front() != '[') return std::nullopt;
  size_t close = s.find(']');
  if (close == std::string_view::npos) return std::nullopt;
  std::string_view name = s.substr(1, close - 1);
  if (!is_identifier(name)) return std::nullopt;
  size_t pos = close + 1;
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  if (pos >= s.size() || s[pos] != ':') return std::nullopt;
  ++pos;
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  if (pos >= s.size() || s[pos] != '<') return std::nullopt;
  size_t end = s.find('>', pos + 1);
  if (end == std::string_view::npos) return std::nullopt;
  std::string_view value = s.substr(pos + 1, end - pos - 1);
  if (value.empty() || value.find('<') != std::string_view::npos) return std::nullopt;
  if (!trim(s.substr(end + 1)).empty()) return std::nullopt;  // no trailing text
  return std::make_pair(std::string(name), std::string(value));
}

// Action label: a line starting (after whitespace) with `Action:`,
// case-insensitive. Returns the remainder after the colon.
inline std::optional<std::string_view> match_action_label(std::string_view raw) {
  std::string_view s = trim(raw);
  if (s.size() < 7) return std::nullopt;
  if (to_lower(s.substr(0, 6)) != "action") return std::nullopt;
  size_t pos = 6;
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  if (pos >= s.size() || s[pos] != ':') return std::nullopt;
  return s.substr(pos + 1);
}

// Body grammar: `Verb(arg)` or `Verb()`; arg an identifier token.
inline std::optional<ActionCommand> match_action_body(std::string_view body) {
  std::string_view s = trim(body);
  size_t open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') return std::nullopt;
  std::string_view verb_text = trim(s.substr(0, open));
  std::optional<Verb> verb = parse_verb(verb_text);
  if (!verb) return std::nullopt;
  std::string_view arg = trim(s.substr(open + 1, s.size() - open - 2));
  if (arg.find('(') != std::string_view::npos) return std::nullopt;
  if (!arg.empty() && !is_identifier(arg)) return std::nullopt;
  return ActionCommand{*verb, std::string(arg)};
}

}  // namespace detail

// Scans raw text for `[Name]:<value>` lines. Consecutive variable lines group
// into one record fragment; any other line closes the current fragment.
// Non-matching text never fails — it simply yields no fragments.
inline std::vector<StrategyRecord> extract_strategies(std::string_view raw) {
  std::vector<StrategyRecord> fragments;
  bool in_fragment = false;
  for (const auto& line : split_lines(raw)) {
    auto m = detail::match_strategy_line(line);
    if (m) {
      if (!in_fragment) {
        fragments.emplace_back();
        in_fragment = true;
      }
      fragments.back().set(m->first, m->second);  // repeated name: later value wins
    } else {
      in_fragment = false;
    }
  }
  return fragments;
}

// Parses `Action: Verb(arg)` lines in order. Action-labelled lines whose body
// does not fit the grammar become candidates without a command so the
// validity report can account for them.
inline std::vector<ActionCandidate> extract_actions(std::string_view raw) {
  std::vector<ActionCandidate> out;
  for (const auto& line : split_lines(raw)) {
    auto body = detail::match_action_label(line);
    if (!body) continue;
    ActionCandidate c;
    c.raw = std::string(trim(line));
    c.command = detail::match_action_body(*body);
    out.push_back(std::move(c));
  }
  return out;
}

// ============================================================================
// Validation — the hallucination filter
// ============================================================================

enum class Verdict {
  valid,
  unknown_verb,
  unknown_argument,
  unaffordable,
  prerequisite_missing,
  illegal_target,
};

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::valid: return "valid";
    case Verdict::unknown_verb: return "unknown_verb";
    case Verdict::unknown_argument: return "unknown_argument";
    case Verdict::unaffordable: return "unaffordable";
    case Verdict::prerequisite_missing: return "prerequisite_missing";
    case Verdict::illegal_target: return "illegal_target";
  }
  return "unknown_verb";
}

// Every candidate receives exactly one verdict; accepted + rejected always
// equals the candidate count.
struct ValidityReport {
  std::vector<Verdict> verdicts;           // aligned with the candidate list
  std::vector<std::string> raw_lines;      // aligned, for auditing
  int accepted = 0;
  int rejected = 0;
};

namespace detail {

// Checks one candidate against the schema, the fog-filtered observation, and
// the budget already reserved by earlier kept actions in the same batch.
inline Verdict judge_action(const ActionCommand& cmd, const UnitCatalog& catalog,
                            const Observation& o, int& minerals_left, int& gas_left) {
  auto has_structure = [&o](std::string_view name) {
    for (const auto& tc : o.structures)
      if (tc.type == name && tc.count > 0) return true;
    return false;
  };
  switch (cmd.verb) {
    case Verb::train: {
      const UnitTypeDef* u = catalog.unit(cmd.argument);
      if (!u) return Verdict::unknown_argument;
      if (!u->prerequisite.empty() && !has_structure(u->prerequisite))
        return Verdict::prerequisite_missing;
      if (u->mineral_cost > minerals_left || u->gas_cost > gas_left)
        return Verdict::unaffordable;
      minerals_left -= u->mineral_cost;
      gas_left -= u->gas_cost;
      return Verdict::valid;
    }
    case Verb::build: {
      const StructureTypeDef* s = catalog.structure(cmd.argument);
      if (!s) return Verdict::unknown_argument;
      if (!s->prerequisite.empty() && !has_structure(s->prerequisite))
        return Verdict::prerequisite_missing;
      if (s->mineral_cost > minerals_left || s->gas_cost > gas_left)
        return Verdict::unaffordable;
      minerals_left -= s->mineral_cost;
      gas_left -= s->gas_cost;
      return Verdict::valid;
    }
    case Verb::attack: {
      if (!parse_region(cmd.argument)) return Verdict::unknown_argument;
      if (o.army.empty()) return Verdict::illegal_target;  // no army to move
      return Verdict::valid;
    }
    case Verb::retreat: {
      if (!cmd.argument.empty()) return Verdict::unknown_argument;
      if (o.army.empty()) return Verdict::illegal_target;
      return Verdict::valid;
    }
    case Verb::scout: {
      if (!parse_region(cmd.argument)) return Verdict::unknown_argument;
      return Verdict::valid;
    }
    case Verb::noop: {
      if (!cmd.argument.empty()) return Verdict::unknown_argument;
      return Verdict::valid;
    }
  }
  return Verdict::unknown_verb;
}

}  // namespace detail

// Keeps only actions that are schema-valid, affordable given observed
// resources (earlier kept actions reserve their cost), prerequisite-satisfied
// and target-legal. The report covers every candidate.
inline std::pair<std::vector<ActionCommand>, ValidityReport> validate_actions(
    const std::vector<ActionCandidate>& candidates, const UnitCatalog& catalog,
    const Observation& o) {
  std::vector<ActionCommand> kept;
  ValidityReport report;
  int minerals_left = o.minerals;
  int gas_left = o.gas;
  for (const auto& c : candidates) {
    Verdict v = c.command
                    ? detail::judge_action(*c.command, catalog, o, minerals_left, gas_left)
                    : Verdict::unknown_verb;
    report.verdicts.push_back(v);
    report.raw_lines.push_back(c.raw);
    if (v == Verdict::valid) {
      kept.push_back(*c.command);
      ++report.accepted;
    } else {
      ++report.rejected;
    }
  }
  return {std::move(kept), std::move(report)};
}

}  // namespace strategos
