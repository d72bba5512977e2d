#pragma once

#include <string>
#include <vector>

#include "strategos/common.hpp"
#include "strategos/machine.hpp"
#include "strategos/memory.hpp"
#include "strategos/observation.hpp"

namespace strategos {

// Prompt compilation is a pure function: identical inputs yield byte-identical
// output (line endings normalized to '\n'). The skeleton below is also shipped
// as assets/prompt_template_v1.txt; a golden test keeps the two in sync.

inline constexpr int kPromptTemplateVersion = 1;

inline const char* prompt_template_text() {
  return R"(You are the macro-level commander of one side in a real-time strategy match. Decide the next orders from the current observation, the tactical doctrine below, and your last recorded strategy. Follow the doctrine: resolve your tactical state first, then emit the orders its policy prescribes.

## State machine
{{STATE_MACHINE}}

## Behavior trees
{{BEHAVIOR_TREES}}

## Standing rules
{{ATOMIC_RULES}}

## Output format
{{OUTPUT_CONTRACT}}

## Observation
{{OBSERVATION}}

## Last strategy
{{MEMORY}}
)";
}

inline const char* baseline_prompt_template_text() {
  return R"(You are the macro-level commander of one side in a real-time strategy match. Decide the next orders from the current observation alone.

## Output format
{{OUTPUT_CONTRACT}}

## Observation
{{OBSERVATION}}
)";
}

namespace detail {

inline void replace_slot(std::string& text, std::string_view key, std::string_view value) {
  std::string pattern = "{{" + std::string(key) + "}}";
  size_t pos = text.find(pattern);
  if (pos == std::string::npos)
    throw Error("prompt template is missing slot " + pattern);
  text.replace(pos, pattern.size(), value);
}

inline std::string render_state_machine_section(const MachineSpec& spec) {
  std::string out;
  out += "States: " + join(spec.states, ", ") +
         " (the first listed state is the initial state).\n";
  out += "Transitions (checked in priority order, lowest number first):\n";
  for (const auto& t : spec.transitions)
    out += "- " + t.from_state + " -> " + t.to_state + " when " + t.gloss + "\n";
  out += "State-action mapping: in each state, execute that state's behavior tree below.";
  return out;
}

inline void render_bt_node(const BTNode& n, int indent, std::string& out) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  switch (n.kind()) {
    case BTNode::Kind::selector:
      out += pad + "selector (first child that succeeds wins):\n";
      for (const auto& c : n.children()) render_bt_node(c, indent + 1, out);
      break;
    case BTNode::Kind::sequence:
      out += pad + "sequence (stop at first failure):\n";
      for (const auto& c : n.children()) render_bt_node(c, indent + 1, out);
      break;
    case BTNode::Kind::condition:
      out += pad + "condition: " + n.condition_text() + "\n";
      break;
    case BTNode::Kind::action:
      out += pad + "action: " + n.command().to_text() + "\n";
      break;
  }
}

inline std::string render_bt_section(const MachineSpec& spec) {
  std::string out;
  for (const auto& st : spec.states) {  // declaration order, not map order
    out += "Policy for state \"" + st + "\":\n";
    render_bt_node(spec.policies.at(st), 1, out);
  }
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

inline std::string render_rules_section(const MachineSpec& spec) {
  if (spec.rules.empty()) return "(none)";
  std::string out;
  for (const auto& r : spec.rules) {
    std::vector<std::string> acts;
    for (const auto& a : r.actions) acts.push_back(a.to_text());
    out += "- when " + r.gloss + ": " + join(acts, ", ") + "\n";
  }
  out.pop_back();
  return out;
}

inline std::string render_contract_section(const MachineSpec* spec) {
  std::string out;
  out += "First write one short paragraph of reasoning.\n";
  if (spec) {
    out += "Then write exactly one line per strategy variable, in this exact form:\n";
    for (const auto& v : spec->variables) out += "[" + v.name + "]:<value>\n";
    out += "The Tactic value must be one of the tactical states.\n";
  }
  out +=
      "Then write one line per order, in this exact form:\n"
      "Action: Verb(argument)\n"
      "Allowed orders: Train(unit_type), Build(structure_type), Attack(region), "
      "Scout(region), Retreat(), NoOp().\n"
      "Regions: own_home, center, enemy_home. Use only unit and structure types that exist in "
      "this match.";
  return out;
}

inline std::string render_memory_section(const StrategyRecord* last) {
  if (!last) return "No prior strategy recorded.";
  std::string out = "Recorded at decision step " + std::to_string(last->timestep) + ":\n";
  for (const auto& [k, v] : last->variables) out += "[" + k + "]:<" + v + ">\n";
  out.pop_back();
  return out;
}

}  // namespace detail

// The memory-augmented prompt (doctrine + observation + latest strategy).
inline std::string compile_prompt(const MachineSpec& spec, const std::string& obs_text,
                                  const StrategyRecord* last) {
  std::string text = prompt_template_text();
  detail::replace_slot(text, "STATE_MACHINE", detail::render_state_machine_section(spec));
  detail::replace_slot(text, "BEHAVIOR_TREES", detail::render_bt_section(spec));
  detail::replace_slot(text, "ATOMIC_RULES", detail::render_rules_section(spec));
  detail::replace_slot(text, "OUTPUT_CONTRACT", detail::render_contract_section(&spec));
  detail::replace_slot(text, "OBSERVATION", trim(obs_text));
  detail::replace_slot(text, "MEMORY", detail::render_memory_section(last));
  return text;
}

// The memoryless baseline prompt: same observation slot, no state machine,
// no rules, no memory, and an output contract without strategy variables.
inline std::string compile_baseline_prompt(const std::string& obs_text) {
  std::string text = baseline_prompt_template_text();
  detail::replace_slot(text, "OUTPUT_CONTRACT", detail::render_contract_section(nullptr));
  detail::replace_slot(text, "OBSERVATION", trim(obs_text));
  return text;
}

}  // namespace strategos
