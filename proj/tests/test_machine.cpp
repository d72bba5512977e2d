#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"

using namespace strategos;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using test_helpers::ObsBuilder;
using test_helpers::record_with_tactic;

namespace {
const char* kMinimalSpec = R"(STATES
solo
POLICY solo
(action NoOp())
VARIABLES
Tactic
)";

const char* kTieBreakSpec = R"(STATES
s
t
u
TRANSITIONS
s -> t : 2 : minerals >= 0 : "always true, lower priority"
s -> u : 1 : minerals >= 0 : "always true, fires first"
POLICY s
(action NoOp())
POLICY t
(action NoOp())
POLICY u
(action NoOp())
VARIABLES
Tactic
)";
}  // namespace

TEST_CASE("minimal spec parses") {
  MachineSpec spec = parse_spec(kMinimalSpec);
  CHECK(spec.states == std::vector<std::string>{"solo"});
  CHECK(spec.initial_state == "solo");
  CHECK(spec.transitions.empty());
  CHECK(spec.rules.empty());
  REQUIRE(spec.policies.count("solo") == 1);
}

TEST_CASE("default spec ships the three-state doctrine") {
  const MachineSpec& spec = default_machine_spec();
  CHECK(spec.states == std::vector<std::string>{"opening", "defensive", "aggressive"});
  CHECK(spec.initial_state == "opening");
  CHECK(spec.transitions.size() == 5);
  CHECK(spec.rules.size() == 2);
  REQUIRE(spec.variables.size() == 2);
  CHECK(spec.variables[0].name == "Tactic");
  CHECK(spec.variables[1].name == "PriorityUnit");
}

TEST_CASE("parse errors name the construct and position") {
  // Unknown state in a transition.
  std::string bad = std::string("STATES\nalpha\nTRANSITIONS\n") +
                    "alpha -> rush : 1 : minerals >= 0 : \"g\"\n" +
                    "POLICY alpha\n(action NoOp())\nVARIABLES\nTactic\n";
  CHECK_THROWS_MATCHES(parse_spec(bad), ParseError,
                       MessageMatches(ContainsSubstring("unknown state 'rush'") &&
                                      ContainsSubstring("line 4")));

  // Unknown feature inside a transition expression.
  bad = std::string("STATES\nalpha\nbeta\nTRANSITIONS\n") +
        "alpha -> beta : 1 : mana >= 5 : \"g\"\n" +
        "POLICY alpha\n(action NoOp())\nPOLICY beta\n(action NoOp())\nVARIABLES\nTactic\n";
  CHECK_THROWS_MATCHES(parse_spec(bad), ParseError,
                       MessageMatches(ContainsSubstring("unknown feature reference 'mana'")));

  // Duplicate priority within one from_state.
  bad = std::string("STATES\na\nb\nTRANSITIONS\n") +
        "a -> b : 1 : minerals >= 0 : \"x\"\n" +
        "a -> b : 1 : gas >= 0 : \"y\"\n" +
        "POLICY a\n(action NoOp())\nPOLICY b\n(action NoOp())\nVARIABLES\nTactic\n";
  CHECK_THROWS_MATCHES(parse_spec(bad), ParseError,
                       MessageMatches(ContainsSubstring("duplicate transition priority")));

  // Unknown section text.
  CHECK_THROWS_MATCHES(parse_spec("WEIRD\nstuff\n"), ParseError,
                       MessageMatches(ContainsSubstring("unknown section")));

  // Missing policy for a declared state.
  CHECK_THROWS_MATCHES(parse_spec("STATES\nalpha\nVARIABLES\nTactic\n"), ParseError,
                       MessageMatches(ContainsSubstring("no POLICY")));

  // Tactic must be declared.
  CHECK_THROWS_MATCHES(parse_spec("STATES\nalpha\nPOLICY alpha\n(action NoOp())\n"), ParseError,
                       MessageMatches(ContainsSubstring("Tactic")));

  // Malformed action template.
  bad = "STATES\na\nPOLICY a\n(action Swim(fast))\nVARIABLES\nTactic\n";
  CHECK_THROWS_AS(parse_spec(bad), ParseError);

  // Unknown unit in an action template.
  bad = "STATES\na\nPOLICY a\n(action Train(dragon))\nVARIABLES\nTactic\n";
  CHECK_THROWS_MATCHES(parse_spec(bad), ParseError,
                       MessageMatches(ContainsSubstring("unknown unit type 'dragon'")));

  // Selector needs a child.
  bad = "STATES\na\nPOLICY a\n(selector)\nVARIABLES\nTactic\n";
  CHECK_THROWS_AS(parse_spec(bad), ParseError);

  // Non-Tactic variables need a binding for every state.
  bad = std::string("STATES\na\nb\nPOLICY a\n(action NoOp())\nPOLICY b\n(action NoOp())\n") +
        "VARIABLES\nTactic\nPriorityUnit : a=guard\n";
  CHECK_THROWS_MATCHES(parse_spec(bad), ParseError,
                       MessageMatches(ContainsSubstring("missing a binding for state 'b'")));
}

TEST_CASE("behavior tree semantics: selector and sequence") {
  // selector: first succeeding child wins; sequence: stops at first failure.
  std::string text = R"(STATES
only
POLICY only
(selector
  (sequence (condition minerals >= 1000) (action Train(golem)))
  (sequence (condition minerals >= 100) (action Train(guard)) (action Scout(center)))
  (action NoOp()))
VARIABLES
Tactic
)";
  MachineSpec spec = parse_spec(text);
  Observation rich = ObsBuilder().resources(500, 0).build();
  SymbolicDecision d = symbolic_execute(spec, rich, nullptr);
  REQUIRE(d.actions.size() == 2);  // the second branch emits both its actions
  CHECK(d.actions[0] == ActionCommand{Verb::train, "guard"});
  CHECK(d.actions[1] == ActionCommand{Verb::scout, "center"});

  Observation broke = ObsBuilder().resources(50, 0).build();
  d = symbolic_execute(spec, broke, nullptr);
  REQUIRE(d.actions.size() == 1);
  CHECK(d.actions[0].verb == Verb::noop);
}

TEST_CASE("symbolic execution: empty prev starts at the initial state") {
  Observation o = ObsBuilder().resources(200, 0).build();
  o.structures = {{"base", 1}};
  o.base_structure_count = 1;
  o.tech_structure_count = 0;
  o.worker_count = 12;
  SymbolicDecision d = symbolic_execute(default_machine_spec(), o, nullptr);
  CHECK(d.state == "opening");
  // Opening policy: worker line first; no atomic rule applies at 200 minerals.
  REQUIRE(d.actions.size() == 1);
  CHECK(d.actions[0] == ActionCommand{Verb::train, "worker"});
  CHECK(d.record.get("Tactic") == "opening");
  CHECK(d.record.get("PriorityUnit") == "worker");
}

TEST_CASE("symbolic execution: defensive to aggressive on force advantage") {
  Observation o =
      ObsBuilder().army_of("guard", 30, 50, Region::own_home).enemy("guard", 12).build();
  StrategyRecord prev = record_with_tactic("defensive");
  SymbolicDecision d = symbolic_execute(default_machine_spec(), o, &prev);
  CHECK(d.state == "aggressive");
  CHECK(d.previous_state == "defensive");
  REQUIRE(d.fired_gloss.has_value());
  CHECK(*d.fired_gloss == "clear force advantage, push out");
  CHECK(d.record.get("Tactic") == "aggressive");
}

TEST_CASE("symbolic execution: aggressive retreats when outweighed") {
  Observation o =
      ObsBuilder().army_of("guard", 28, 50, Region::center).enemy("guard", 40).build();
  StrategyRecord prev = record_with_tactic("aggressive");
  SymbolicDecision d = symbolic_execute(default_machine_spec(), o, &prev);
  CHECK(d.state == "defensive");
  bool has_retreat = false;
  for (const auto& a : d.actions) has_retreat |= (a.verb == Verb::retreat);
  CHECK(has_retreat);
}

TEST_CASE("symbolic execution: stale memory is an explicit error") {
  Observation o = ObsBuilder().build();
  StrategyRecord prev = record_with_tactic("flying_fortress");
  CHECK_THROWS_AS(symbolic_execute(default_machine_spec(), o, &prev), StaleMemoryError);
  StrategyRecord no_tactic;
  no_tactic.set("PriorityUnit", "guard");
  CHECK_THROWS_AS(symbolic_execute(default_machine_spec(), o, &no_tactic), StaleMemoryError);
}

TEST_CASE("ties break by lowest priority") {
  MachineSpec spec = parse_spec(kTieBreakSpec);
  Observation o;
  StrategyRecord prev = record_with_tactic("s");
  SymbolicDecision d = symbolic_execute(spec, o, &prev);
  CHECK(d.state == "u");
}

TEST_CASE("state closure and purity over random observations") {
  std::mt19937_64 rng(23);
  const MachineSpec& spec = default_machine_spec();
  for (int i = 0; i < 2000; ++i) {
    Observation o = test_helpers::random_observation(rng);
    std::string tactic = spec.states[rng() % spec.states.size()];
    StrategyRecord prev = record_with_tactic(tactic);
    SymbolicDecision d1 = symbolic_execute(spec, o, &prev);
    SymbolicDecision d2 = symbolic_execute(spec, o, &prev);
    CHECK(spec.has_state(d1.state));               // closure
    CHECK(d1.state == d2.state);                   // purity
    CHECK(d1.actions == d2.actions);
    CHECK(d1.record == d2.record);
  }
}

TEST_CASE("fired transition is unique under priorities (small-domain sweep)") {
  const MachineSpec& spec = default_machine_spec();
  for (int own = 0; own <= 12; ++own) {
    for (int enemy = 0; enemy <= 12; ++enemy) {
      for (long long tick : {0LL, 400LL}) {
        Observation o;
        o.tick = tick;
        for (int i = 0; i < own; ++i) o.army.push_back({"guard", 50});
        if (enemy) o.visible_enemy_army = {{"guard", enemy}};
        for (const auto& from : spec.states) {
          std::vector<const TransitionRule*> fired;
          for (const auto& t : spec.transitions)
            if (t.from_state == from && t.predicate.evaluate(o)) fired.push_back(&t);
          // All simultaneously-true transitions must have distinct priorities.
          for (size_t x = 0; x < fired.size(); ++x)
            for (size_t y = x + 1; y < fired.size(); ++y)
              CHECK(fired[x]->priority != fired[y]->priority);
        }
      }
    }
  }
}

TEST_CASE("comments and blank lines are ignored everywhere") {
  std::string text = R"(# leading comment
STATES
# a comment inside a section
alpha

POLICY alpha
# comment inside a policy
(action NoOp())

VARIABLES
Tactic
)";
  MachineSpec spec = parse_spec(text);
  CHECK(spec.states.size() == 1);
}

TEST_CASE("rules section: predicate, actions and gloss") {
  std::string text = R"(STATES
a
POLICY a
(action NoOp())
RULES
minerals >= 600 => Build(base), Train(guard) : "bank high: expand and reinforce"
VARIABLES
Tactic
)";
  MachineSpec spec = parse_spec(text);
  REQUIRE(spec.rules.size() == 1);
  CHECK(spec.rules[0].actions.size() == 2);
  CHECK(spec.rules[0].gloss == "bank high: expand and reinforce");
  Observation rich = ObsBuilder().resources(800, 0).build();
  SymbolicDecision d = symbolic_execute(spec, rich, nullptr);
  REQUIRE(d.actions.size() == 3);  // NoOp from the policy, then the rule's two
  CHECK(d.actions[1] == ActionCommand{Verb::build, "base"});
  CHECK(d.actions[2] == ActionCommand{Verb::train, "guard"});
}
