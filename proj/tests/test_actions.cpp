#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"

using namespace strategos;

TEST_CASE("strategy extraction: the documented block form") {
  auto fragments = extract_strategies(
      "We have the advantage, committing now.\n"
      "[Tactic]:<aggressive>\n"
      "[PriorityUnit]:<stalker>\n"
      "Action: Attack(enemy_home)\n");
  REQUIRE(fragments.size() == 1);
  CHECK(fragments[0].get("Tactic") == "aggressive");
  CHECK(fragments[0].get("PriorityUnit") == "stalker");
  CHECK(fragments[0].variables.size() == 2);
}

TEST_CASE("strategy extraction: no matches yields an empty list") {
  CHECK(extract_strategies("nothing bracketed here\njust prose\n").empty());
  CHECK(extract_strategies("").empty());
  CHECK(extract_strategies("[Tactic]:aggressive").empty());  // missing angle brackets
}

TEST_CASE("strategy extraction: near-miss corpus follows the grammar exactly") {
  struct Case {
    const char* text;
    bool matches;
  };
  // Whitespace around the line and colon is tolerated; everything else must
  // match the pattern [Name]:<value> exactly.
  const Case corpus[] = {
      {"[Tactic]:<aggressive>", true},
      {"  [Tactic] : <aggressive>  ", true},
      {"[Tactic]:\t<aggressive>", true},
      {"[Under_score2]:<x y z>", true},  // values may hold spaces, not brackets
      {"[Tactic]:<aggressive> trailing", false},
      {"[Tactic]:<>", false},
      {"[Tactic]:<agg<ressive>", false},
      {"[Tac tic]:<x>", false},
      {"[]:<x>", false},
      {"[Tactic]<aggressive>", false},
      {"Tactic:<aggressive>", false},
      {"[Tactic]::<aggressive>", false},
      {"[Tactic]:<aggressive>>", false},
      {"[9Tactic]:<x>", false},
      {"[Tactic]:< >", true},  // a lone space is non-empty; trimming is the caller's business
  };
  for (const auto& c : corpus) {
    INFO(c.text);
    CHECK(extract_strategies(c.text).size() == (c.matches ? 1u : 0u));
  }
}

TEST_CASE("strategy extraction: consecutive lines group, gaps split") {
  auto fragments = extract_strategies(
      "[Tactic]:<defensive>\n"
      "[PriorityUnit]:<guard>\n"
      "some commentary\n"
      "[Tactic]:<aggressive>\n");
  REQUIRE(fragments.size() == 2);
  CHECK(fragments[0].get("Tactic") == "defensive");
  CHECK(fragments[0].get("PriorityUnit") == "guard");
  CHECK(fragments[1].get("Tactic") == "aggressive");
}

TEST_CASE("strategy extraction: repeated name in one block keeps the last value") {
  auto fragments = extract_strategies("[Tactic]:<defensive>\n[Tactic]:<aggressive>\n");
  REQUIRE(fragments.size() == 1);
  CHECK(fragments[0].get("Tactic") == "aggressive");
  CHECK(fragments[0].variables.size() == 1);
}

TEST_CASE("action extraction: grammar and order") {
  auto candidates = extract_actions(
      "I will reinforce and push.\n"
      "Action: Train(stalker)\n"
      "prose in between does not matter\n"
      "action:attack(enemy_home)\n"
      "Action: Summon(dragon)\n");
  REQUIRE(candidates.size() == 3);
  REQUIRE(candidates[0].command.has_value());
  CHECK(candidates[0].command->verb == Verb::train);
  CHECK(candidates[0].command->argument == "stalker");
  REQUIRE(candidates[1].command.has_value());
  CHECK(candidates[1].command->verb == Verb::attack);  // verb case-normalized
  CHECK(candidates[1].command->argument == "enemy_home");
  CHECK_FALSE(candidates[2].command.has_value());  // unknown verb stays a candidate
}

TEST_CASE("action extraction: decoys and malformed bodies") {
  CHECK(extract_actions("Actions: Train(guard)").empty());     // wrong label
  CHECK(extract_actions("Act: Train(guard)").empty());
  CHECK(extract_actions("the Action: is described").size() == 0);  // label must start the line
  auto c = extract_actions("Action: Retreat");  // parens are mandatory
  REQUIRE(c.size() == 1);
  CHECK_FALSE(c[0].command.has_value());
  c = extract_actions("Action: Train(guard) extra");
  REQUIRE(c.size() == 1);
  CHECK_FALSE(c[0].command.has_value());
  c = extract_actions("Action: Retreat()");
  REQUIRE(c.size() == 1);
  REQUIRE(c[0].command.has_value());
  CHECK(c[0].command->verb == Verb::retreat);
  CHECK(c[0].command->argument.empty());
}

TEST_CASE("extraction is total on arbitrary byte noise") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> len(0, 200);
  const char alphabet[] = "Aa[]<>():\n\t TactionRetr!@#%09_z";
  std::uniform_int_distribution<size_t> pick(0, sizeof(alphabet) - 2);
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    int n = len(rng);
    for (int k = 0; k < n; ++k) s.push_back(alphabet[pick(rng)]);
    (void)extract_strategies(s);
    (void)extract_actions(s);
  }
  SUCCEED();
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {
Observation poor_observation() {
  // 150 minerals, no gas, just a base; army empty.
  Observation o = test_helpers::ObsBuilder().resources(150, 0).build();
  o.structures = {{"base", 1}};
  o.base_structure_count = 1;
  o.tech_structure_count = 0;
  return o;
}

std::vector<ActionCandidate> wrap(std::initializer_list<ActionCommand> cmds) {
  std::vector<ActionCandidate> out;
  for (const auto& c : cmds) out.push_back({c, c.to_text()});
  return out;
}
}  // namespace

TEST_CASE("validation: advanced unit without its prerequisite structure") {
  auto [kept, report] =
      validate_actions(wrap({{Verb::train, "raptor"}}), default_catalog(), poor_observation());
  CHECK(kept.empty());
  REQUIRE(report.verdicts.size() == 1);
  CHECK(report.verdicts[0] == Verdict::prerequisite_missing);
  CHECK(report.rejected == 1);
}

TEST_CASE("validation: sequential budget, first kept, second unaffordable") {
  // 150 minerals buys one 100-mineral guard, not two.
  auto [kept, report] = validate_actions(
      wrap({{Verb::train, "guard"}, {Verb::train, "guard"}}), default_catalog(),
      poor_observation());
  REQUIRE(kept.size() == 1);
  REQUIRE(report.verdicts.size() == 2);
  CHECK(report.verdicts[0] == Verdict::valid);
  CHECK(report.verdicts[1] == Verdict::unaffordable);
  CHECK(report.accepted == 1);
  CHECK(report.rejected == 1);
}

TEST_CASE("validation: gas is budgeted too") {
  Observation o = test_helpers::ObsBuilder().resources(500, 20).build();  // has forge
  auto [kept, report] =
      validate_actions(wrap({{Verb::train, "raptor"}}), default_catalog(), o);
  CHECK(kept.empty());
  CHECK(report.verdicts[0] == Verdict::unaffordable);  // 50 gas needed, 20 observed
}

TEST_CASE("validation: an all-valid batch rejects nothing") {
  Observation o = test_helpers::ObsBuilder()
                      .army_of("guard", 5, 50, Region::own_home)
                      .resources(400, 100)
                      .build();
  auto [kept, report] = validate_actions(
      wrap({{Verb::train, "guard"}, {Verb::train, "raptor"}, {Verb::attack, "center"},
            {Verb::scout, "enemy_home"}, {Verb::noop, ""}}),
      default_catalog(), o);
  CHECK(kept.size() == 5);
  CHECK(report.rejected == 0);
  CHECK(report.accepted == 5);
}

TEST_CASE("validation: unknown argument, illegal target, bad arity") {
  Observation o = poor_observation();  // army empty
  auto [kept, report] = validate_actions(
      wrap({{Verb::train, "dragon"},    // no such unit
            {Verb::attack, "north"},    // no such region
            {Verb::attack, "center"},   // no army to move
            {Verb::retreat, ""},        // no army to move
            {Verb::retreat, "center"},  // arity violation
            {Verb::noop, "x"}}),        // arity violation
      default_catalog(), o);
  CHECK(kept.empty());
  REQUIRE(report.verdicts.size() == 6);
  CHECK(report.verdicts[0] == Verdict::unknown_argument);
  CHECK(report.verdicts[1] == Verdict::unknown_argument);
  CHECK(report.verdicts[2] == Verdict::illegal_target);
  CHECK(report.verdicts[3] == Verdict::illegal_target);
  CHECK(report.verdicts[4] == Verdict::unknown_argument);
  CHECK(report.verdicts[5] == Verdict::unknown_argument);
}

TEST_CASE("validation: every candidate receives exactly one verdict") {
  std::mt19937_64 rng(3);
  Observation o = test_helpers::random_observation(rng);
  auto candidates = extract_actions(
      "Action: Train(guard)\nAction: Summon(x)\nAction: Build(forge)\n"
      "Action: Attack(center)\nAction: NoOp()\n");
  auto [kept, report] = validate_actions(candidates, default_catalog(), o);
  CHECK(report.verdicts.size() == candidates.size());
  CHECK(report.accepted + report.rejected == static_cast<int>(candidates.size()));
  CHECK(kept.size() == static_cast<size_t>(report.accepted));
}
