#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace strategos;
using test_helpers::ObsBuilder;
using test_helpers::record_with_tactic;

namespace {

Observation fixed_observation() {
  return ObsBuilder()
      .army_of("guard", 30, 50, Region::own_home)
      .enemy("guard", 12)
      .build();
}

// The seven template sections, in their fixed order.
const std::vector<std::string> kSectionHeaders = {
    "## State machine", "## Behavior trees", "## Standing rules",
    "## Output format", "## Observation",    "## Last strategy",
};

std::vector<std::string> split_sections(const std::string& prompt) {
  std::vector<size_t> cuts;
  for (const auto& h : kSectionHeaders) {
    size_t pos = prompt.find(h);
    REQUIRE(pos != std::string::npos);
    cuts.push_back(pos);
  }
  std::vector<std::string> sections;
  sections.push_back(prompt.substr(0, cuts[0]));  // preamble
  for (size_t i = 0; i < cuts.size(); ++i) {
    size_t end = i + 1 < cuts.size() ? cuts[i + 1] : prompt.size();
    sections.push_back(prompt.substr(cuts[i], end - cuts[i]));
  }
  return sections;
}

size_t count_occurrences(const std::string& hay, const std::string& needle) {
  size_t n = 0;
  for (size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("observation rendering: purity, absence lines, verbatim numbers") {
  Observation o = fixed_observation();
  std::string text = render_observation(o);
  CHECK(render_observation(o) == text);  // byte-identical on repeat
  CHECK(text.find("own army supply: 30") != std::string::npos);
  CHECK(text.find("visible enemy army supply: 12") != std::string::npos);
  CHECK(text.find("minerals: 260") != std::string::npos);
  CHECK(text.find("gas: 60") != std::string::npos);

  Observation quiet = ObsBuilder().build();
  std::string quiet_text = render_observation(quiet);
  CHECK(quiet_text.find("visible enemy army: no enemy units visible") != std::string::npos);
  CHECK(quiet_text.find("visible enemy structures: none visible") != std::string::npos);
  CHECK(quiet_text.find("last combat: none") != std::string::npos);
}

TEST_CASE("memory slot embeds the last record in the documented variable syntax") {
  StrategyRecord last = record_with_tactic("defensive", 74);
  last.set("PriorityUnit", "guard");
  std::string prompt =
      compile_prompt(default_machine_spec(), render_observation(fixed_observation()), &last);
  CHECK(prompt.find("[Tactic]:<defensive>") != std::string::npos);
  CHECK(prompt.find("[PriorityUnit]:<guard>") != std::string::npos);
}

TEST_CASE("absent memory: sentinel line and no embedded variable values") {
  std::string prompt =
      compile_prompt(default_machine_spec(), render_observation(fixed_observation()), nullptr);
  auto sections = split_sections(prompt);
  const std::string& memory = sections.back();
  CHECK(memory.find("No prior strategy recorded.") != std::string::npos);
  CHECK(memory.find("]:<") == std::string::npos);
}

TEST_CASE("prompt compilation is byte-deterministic") {
  StrategyRecord last = record_with_tactic("defensive", 74);
  std::string a =
      compile_prompt(default_machine_spec(), render_observation(fixed_observation()), &last);
  std::string b =
      compile_prompt(default_machine_spec(), render_observation(fixed_observation()), &last);
  CHECK(a == b);
  CHECK(a.find('\r') == std::string::npos);  // normalized line endings
}

TEST_CASE("golden file: masmp prompt bytes are pinned") {
  StrategyRecord last = record_with_tactic("defensive", 74);
  last.set("PriorityUnit", "guard");
  std::string prompt =
      compile_prompt(default_machine_spec(), render_observation(fixed_observation()), &last);
  std::string golden =
      test_helpers::read_file(std::string(STRATEGOS_GOLDEN_DIR) + "/prompt_masmp.golden.txt");
  CHECK(prompt == golden);
}

TEST_CASE("golden file: baseline prompt bytes are pinned") {
  std::string prompt = compile_baseline_prompt(render_observation(fixed_observation()));
  std::string golden =
      test_helpers::read_file(std::string(STRATEGOS_GOLDEN_DIR) + "/prompt_baseline.golden.txt");
  CHECK(prompt == golden);
}

TEST_CASE("baseline prompt: no state machine, no memory, no Tactic anywhere") {
  std::string prompt = compile_baseline_prompt(render_observation(fixed_observation()));
  CHECK(prompt.find("[Tactic]") == std::string::npos);
  CHECK(prompt.find("## State machine") == std::string::npos);
  CHECK(prompt.find("## Behavior trees") == std::string::npos);
  CHECK(prompt.find("## Standing rules") == std::string::npos);
  CHECK(prompt.find("## Last strategy") == std::string::npos);
  CHECK(prompt.find("## Output format") != std::string::npos);
  CHECK(prompt.find("## Observation") != std::string::npos);
}

TEST_CASE("baseline and masmp share an identical observation slot") {
  std::string obs_text = render_observation(fixed_observation());
  std::string masmp = compile_prompt(default_machine_spec(), obs_text, nullptr);
  std::string baseline = compile_baseline_prompt(obs_text);
  // The observation section runs to the next header (masmp) or the end (baseline).
  size_t m_start = masmp.find("## Observation");
  size_t m_end = masmp.find("## Last strategy");
  std::string masmp_slot = masmp.substr(m_start, m_end - m_start);
  size_t b_start = baseline.find("## Observation");
  std::string baseline_slot = baseline.substr(b_start);
  // Allow for the trailing newline structure: both contain the same rendered text.
  CHECK(baseline_slot.find(masmp_slot.substr(0, masmp_slot.size() - 1)) != std::string::npos);
  CHECK(masmp_slot.find(obs_text.substr(0, obs_text.size() - 1)) != std::string::npos);
}

TEST_CASE("one-gloss change touches exactly one section") {
  std::string variant_text = default_machine_spec_text();
  const std::string needle = "clear force advantage, push out";
  size_t pos = variant_text.find(needle);
  REQUIRE(pos != std::string::npos);
  variant_text.replace(pos, needle.size(), "overwhelming local superiority");
  MachineSpec variant = parse_spec(variant_text);

  std::string obs_text = render_observation(fixed_observation());
  auto base_sections = split_sections(compile_prompt(default_machine_spec(), obs_text, nullptr));
  auto var_sections = split_sections(compile_prompt(variant, obs_text, nullptr));
  REQUIRE(base_sections.size() == var_sections.size());
  for (size_t i = 0; i < base_sections.size(); ++i) {
    bool is_state_machine = base_sections[i].rfind("## State machine", 0) == 0;
    if (is_state_machine)
      CHECK(base_sections[i] != var_sections[i]);
    else
      CHECK(base_sections[i] == var_sections[i]);
  }
}

TEST_CASE("declared names appear exactly once in their home sections") {
  const MachineSpec& spec = default_machine_spec();
  std::string prompt = compile_prompt(spec, render_observation(fixed_observation()), nullptr);
  auto sections = split_sections(prompt);
  const std::string& sm = sections[1];        // ## State machine
  const std::string& contract = sections[4];  // ## Output format

  // Each state is listed exactly once in the states line.
  size_t states_line_end = sm.find('\n', sm.find("States: "));
  std::string states_line = sm.substr(0, states_line_end);
  for (const auto& st : spec.states)
    CHECK(count_occurrences(states_line, st) == 1);

  // Each transition gloss appears exactly once in the whole prompt.
  for (const auto& t : spec.transitions)
    CHECK(count_occurrences(prompt, t.gloss) == 1);

  // Each strategy variable is named exactly once in the output contract.
  for (const auto& v : spec.variables)
    CHECK(count_occurrences(contract, "[" + v.name + "]") == 1);
}

TEST_CASE("template asset file matches the embedded template") {
  std::string asset =
      test_helpers::read_file(std::string(STRATEGOS_ASSETS_DIR) + "/prompt_template_v1.txt");
  CHECK(asset == prompt_template_text());
}

TEST_CASE("default machine spec asset matches the embedded doctrine") {
  std::string asset =
      test_helpers::read_file(std::string(STRATEGOS_ASSETS_DIR) + "/default_machine.spec");
  CHECK(asset == default_machine_spec_text());
}
