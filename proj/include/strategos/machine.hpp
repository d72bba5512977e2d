#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "strategos/actions.hpp"
#include "strategos/catalog.hpp"
#include "strategos/common.hpp"
#include "strategos/memory.hpp"
#include "strategos/observation.hpp"
#include "strategos/predicate.hpp"

namespace strategos {

// A condition is stored twice: the formal half drives the symbolic executor,
// the natural-language gloss is what the prompt shows.
struct TransitionRule {
  std::string from_state;
  PredicateExpr predicate;
  std::string predicate_text;  // formal source text, kept for documentation
  std::string to_state;
  std::string gloss;
  int priority = 0;  // lower fires first on ties
};

// Behavior tree node. Selector runs children until the first success,
// Sequence until the first failure, Condition succeeds iff its predicate
// holds, ActionLeaf emits its command and succeeds. Ticks are memoryless:
// one decision cycle is one full tick.
class BTNode {
 public:
  enum class Kind { selector, sequence, condition, action };

  static BTNode selector(std::vector<BTNode> children) {
    return BTNode(Kind::selector, std::move(children), {}, {});
  }
  static BTNode sequence(std::vector<BTNode> children) {
    return BTNode(Kind::sequence, std::move(children), {}, {});
  }
  static BTNode condition(PredicateExpr p, std::string text = {}) {
    BTNode n(Kind::condition, {}, std::move(p), {});
    n.condition_text_ = std::move(text);
    return n;
  }
  static BTNode action(ActionCommand cmd) { return BTNode(Kind::action, {}, {}, std::move(cmd)); }

  Kind kind() const { return kind_; }
  const std::vector<BTNode>& children() const { return children_; }
  const PredicateExpr& predicate() const { return predicate_; }
  const std::string& condition_text() const { return condition_text_; }
  const ActionCommand& command() const { return command_; }

  // One memoryless tick; emitted commands append to `out`.
  bool tick(const Observation& o, std::vector<ActionCommand>& out) const {
    switch (kind_) {
      case Kind::selector:
        for (const auto& c : children_)
          if (c.tick(o, out)) return true;
        return false;
      case Kind::sequence:
        for (const auto& c : children_)
          if (!c.tick(o, out)) return false;
        return true;
      case Kind::condition: return predicate_.evaluate(o);
      case Kind::action: out.push_back(command_); return true;
    }
    return false;
  }

  // Structural checks: finite depth, composite nodes non-empty.
  void validate(int depth = 0) const {
    if (depth > 64) throw ConfigError("behavior tree exceeds maximum depth");
    if (kind_ == Kind::selector || kind_ == Kind::sequence) {
      if (children_.empty())
        throw ConfigError("selector/sequence nodes need at least one child");
      for (const auto& c : children_) c.validate(depth + 1);
    }
  }

 private:
  BTNode(Kind k, std::vector<BTNode> children, PredicateExpr p, ActionCommand cmd)
      : kind_(k), children_(std::move(children)), predicate_(std::move(p)),
        command_(std::move(cmd)) {}

  Kind kind_;
  std::vector<BTNode> children_;
  PredicateExpr predicate_;
  std::string condition_text_;
  ActionCommand command_;
};

// Standalone predicate -> actions rule, applied after the state policy.
struct AtomicRule {
  PredicateExpr predicate;
  std::string predicate_text;
  std::vector<ActionCommand> actions;
  std::string gloss;
};

// A strategy variable. Tactic is implicit (bound to the resolved state);
// other variables carry one binding per state so emission is total.
struct VariableDecl {
  std::string name;
  std::map<std::string, std::string> per_state;  // state -> value; empty for Tactic
};

struct MachineSpec {
  std::vector<std::string> states;  // first entry is the initial state
  std::string initial_state;
  std::vector<TransitionRule> transitions;
  std::map<std::string, BTNode> policies;  // one per state
  std::vector<AtomicRule> rules;
  std::vector<VariableDecl> variables;  // includes Tactic

  bool has_state(std::string_view s) const {
    return std::find(states.begin(), states.end(), s) != states.end();
  }
};

// ============================================================================
// Spec DSL parser
//
// Line-oriented sections: STATES, TRANSITIONS, POLICY <state>, RULES,
// VARIABLES. `#` starts a comment; blank lines are ignored. The first state
// listed is the initial state. Grammar details live in docs/spec-format.md.
// ============================================================================

namespace detail {

struct SpecLine {
  std::string text;
  int number = 0;
};

inline std::string strip_comment(const std::string& line) {
  // A '#' outside quotes starts a comment.
  bool in_quotes = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quotes = !in_quotes;
    if (line[i] == '#' && !in_quotes) return line.substr(0, i);
  }
  return line;
}

// Splits "a -> b : prio : expr : "gloss"" respecting the quoted gloss.
inline std::vector<std::string> split_transition_fields(const std::string& s) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  for (char c : s) {
    if (c == '"') in_quotes = !in_quotes;
    if (c == ':' && !in_quotes) {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::string unquote(std::string_view s, int line) {
  std::string_view t = trim(s);
  if (t.size() < 2 || t.front() != '"' || t.back() != '"')
    throw ParseError("expected a quoted gloss", line, 1);
  return std::string(t.substr(1, t.size() - 2));
}

// S-expression tokenizer for POLICY bodies. `Verb(arg)` directly after
// `action` lexes as a single atom.
struct SToken {
  enum Kind { lparen, rparen, atom } kind;
  std::string text;
  int line;
  int column;
};

inline std::vector<SToken> lex_sexpr(const std::vector<SpecLine>& lines) {
  std::vector<SToken> tokens;
  for (const auto& ln : lines) {
    const std::string& s = ln.text;
    size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      int col = static_cast<int>(i) + 1;
      if (c == '(') {
        tokens.push_back({SToken::lparen, "(", ln.number, col});
        ++i;
      } else if (c == ')') {
        tokens.push_back({SToken::rparen, ")", ln.number, col});
        ++i;
      } else {
        size_t start = i;
        int paren_depth = 0;
        while (i < s.size()) {
          char d = s[i];
          if (paren_depth == 0 &&
              (std::isspace(static_cast<unsigned char>(d)) || d == ')' || (d == '(' && i == start)))
            break;
          if (d == '(') ++paren_depth;
          if (d == ')') {
            if (paren_depth == 0) break;
            --paren_depth;
          }
          ++i;
        }
        if (i == start) ++i;  // lone '(' handled above; defensive progress
        tokens.push_back({SToken::atom, s.substr(start, i - start), ln.number, col});
      }
    }
  }
  return tokens;
}

inline void validate_action_template(const ActionCommand& cmd, const UnitCatalog& catalog,
                                     int line, int col);

class PolicyParser {
 public:
  PolicyParser(std::vector<SToken> tokens, const UnitCatalog& catalog)
      : tokens_(std::move(tokens)), catalog_(catalog) {}

  BTNode parse() {
    BTNode n = parse_node();
    if (pos_ < tokens_.size())
      throw ParseError("unexpected trailing tokens after policy tree", tokens_[pos_].line,
                       tokens_[pos_].column);
    return n;
  }

 private:
  const SToken& peek() {
    if (pos_ >= tokens_.size())
      throw ParseError("unterminated policy tree (missing ')')",
                       tokens_.empty() ? 0 : tokens_.back().line, 1);
    return tokens_[pos_];
  }

  BTNode parse_node() {
    const SToken& open = peek();
    if (open.kind != SToken::lparen)
      throw ParseError("expected '(' to open a policy node", open.line, open.column);
    ++pos_;
    const SToken& head = peek();
    if (head.kind != SToken::atom)
      throw ParseError("expected node kind (selector/sequence/condition/action)", head.line,
                       head.column);
    std::string kind = head.text;
    int kind_line = head.line;
    int kind_col = head.column;
    ++pos_;
    if (kind == "selector" || kind == "sequence") {
      std::vector<BTNode> children;
      while (peek().kind == SToken::lparen) children.push_back(parse_node());
      expect_rparen();
      if (children.empty())
        throw ParseError(kind + " node needs at least one child", kind_line, kind_col);
      return kind == "selector" ? BTNode::selector(std::move(children))
                                : BTNode::sequence(std::move(children));
    }
    if (kind == "condition") {
      // Collect atoms up to the closing paren and parse them as one expression.
      std::string expr_text;
      int expr_line = peek().line;
      int expr_col = peek().column;
      while (peek().kind == SToken::atom) {
        if (!expr_text.empty()) expr_text += ' ';
        expr_text += tokens_[pos_].text;
        ++pos_;
      }
      expect_rparen();
      PredicateExpr p = parse_predicate(expr_text, expr_line, expr_col);
      return BTNode::condition(std::move(p), expr_text);
    }
    if (kind == "action") {
      const SToken& a = peek();
      if (a.kind != SToken::atom)
        throw ParseError("expected an action call like Train(worker)", a.line, a.column);
      auto cmd = match_action_body(a.text);
      if (!cmd) throw ParseError("malformed action '" + a.text + "'", a.line, a.column);
      validate_action_template(*cmd, catalog_, a.line, a.column);
      ++pos_;
      expect_rparen();
      return BTNode::action(std::move(*cmd));
    }
    throw ParseError("unknown policy node kind '" + kind + "'", kind_line, kind_col);
  }

  void expect_rparen() {
    const SToken& t = peek();
    if (t.kind != SToken::rparen)
      throw ParseError("expected ')' to close a policy node", t.line, t.column);
    ++pos_;
  }

  std::vector<SToken> tokens_;
  const UnitCatalog& catalog_;
  size_t pos_ = 0;
};

// Action templates must instantiate to schema-valid commands: known verb,
// argument token of the right kind for the verb's arity.
inline void validate_action_template(const ActionCommand& cmd, const UnitCatalog& catalog,
                                     int line, int col) {
  switch (cmd.verb) {
    case Verb::train:
      if (!catalog.is_unit(cmd.argument))
        throw ParseError("unknown unit type '" + cmd.argument + "'", line, col);
      break;
    case Verb::build:
      if (!catalog.is_structure(cmd.argument))
        throw ParseError("unknown structure type '" + cmd.argument + "'", line, col);
      break;
    case Verb::attack:
    case Verb::scout:
      if (!parse_region(cmd.argument))
        throw ParseError("unknown region '" + cmd.argument + "'", line, col);
      break;
    case Verb::retreat:
    case Verb::noop:
      if (!cmd.argument.empty())
        throw ParseError(std::string(verb_name(cmd.verb)) + " takes no argument", line, col);
      break;
  }
}

}  // namespace detail

inline MachineSpec parse_spec(std::string_view text, const UnitCatalog& catalog = default_catalog()) {
  MachineSpec spec;
  std::vector<std::string> raw_lines = split_lines(text);

  enum class Section { none, states, transitions, policy, rules, variables };
  Section section = Section::none;
  std::string policy_state;
  std::vector<detail::SpecLine> policy_body;
  int policy_line = 0;

  // Deferred texts: predicates are parsed after states are known, but action
  // templates and feature names are checked as encountered.
  struct PendingTransition {
    std::string from, to, expr, gloss;
    int priority;
    int line;
  };
  std::vector<PendingTransition> pending_transitions;

  auto flush_policy = [&]() {
    if (policy_state.empty()) return;
    auto tokens = detail::lex_sexpr(policy_body);
    if (tokens.empty())
      throw ParseError("POLICY " + policy_state + " has an empty body", policy_line, 1);
    detail::PolicyParser parser(std::move(tokens), catalog);
    BTNode tree = parser.parse();
    tree.validate();
    spec.policies.emplace(policy_state, std::move(tree));
    policy_state.clear();
    policy_body.clear();
  };

  int line_no = 0;
  for (const auto& raw : raw_lines) {
    ++line_no;
    std::string stripped = detail::strip_comment(raw);
    std::string_view line = trim(stripped);
    if (line.empty()) continue;

    // Section headers.
    if (line == "STATES" || line == "TRANSITIONS" || line == "RULES" || line == "VARIABLES" ||
        line.substr(0, 7) == "POLICY ") {
      flush_policy();
      if (line == "STATES")
        section = Section::states;
      else if (line == "TRANSITIONS")
        section = Section::transitions;
      else if (line == "RULES")
        section = Section::rules;
      else if (line == "VARIABLES")
        section = Section::variables;
      else {
        section = Section::policy;
        policy_state = std::string(trim(line.substr(7)));
        policy_line = line_no;
        if (std::find(spec.states.begin(), spec.states.end(), policy_state) == spec.states.end())
          throw ParseError("POLICY for unknown state '" + policy_state + "'", line_no, 1);
        if (spec.policies.count(policy_state))
          throw ParseError("duplicate POLICY for state '" + policy_state + "'", line_no, 1);
      }
      continue;
    }

    switch (section) {
      case Section::none:
        throw ParseError("unknown section or text before the first section header: '" +
                             std::string(line) + "'",
                         line_no, 1);
      case Section::states: {
        if (!is_identifier(line))
          throw ParseError("state id must be a token, got '" + std::string(line) + "'", line_no,
                           1);
        if (spec.has_state(line))
          throw ParseError("duplicate state '" + std::string(line) + "'", line_no, 1);
        spec.states.emplace_back(line);
        break;
      }
      case Section::transitions: {
        // from -> to : priority : expr : "gloss"
        size_t arrow = line.find("->");
        if (arrow == std::string_view::npos)
          throw ParseError("transition needs 'from -> to'", line_no, 1);
        std::string from(trim(line.substr(0, arrow)));
        std::string rest(line.substr(arrow + 2));
        auto fields = detail::split_transition_fields(rest);
        if (fields.size() != 4)
          throw ParseError("transition needs 'from -> to : priority : expr : \"gloss\"'",
                           line_no, 1);
        PendingTransition t;
        t.from = from;
        t.to = std::string(trim(fields[0]));
        std::string prio_text(trim(fields[1]));
        try {
          t.priority = std::stoi(prio_text);
        } catch (const std::exception&) {
          throw ParseError("transition priority must be an integer, got '" + prio_text + "'",
                           line_no, 1);
        }
        t.expr = std::string(trim(fields[2]));
        t.gloss = detail::unquote(fields[3], line_no);
        t.line = line_no;
        pending_transitions.push_back(std::move(t));
        break;
      }
      case Section::policy:
        policy_body.push_back({stripped, line_no});
        break;
      case Section::rules: {
        // expr => Verb(arg)[, Verb(arg)]* : "gloss"
        size_t sep = line.find("=>");
        if (sep == std::string_view::npos)
          throw ParseError("rule needs 'expr => actions : \"gloss\"'", line_no, 1);
        std::string expr_text(trim(line.substr(0, sep)));
        std::string rest(line.substr(sep + 2));
        auto fields = detail::split_transition_fields(rest);
        if (fields.size() != 2)
          throw ParseError("rule needs 'expr => actions : \"gloss\"'", line_no, 1);
        AtomicRule rule;
        rule.predicate = parse_predicate(expr_text, line_no, 1);
        rule.predicate_text = expr_text;
        rule.gloss = detail::unquote(fields[1], line_no);
        std::string actions_text(trim(fields[0]));
        size_t pos = 0;
        while (pos < actions_text.size()) {
          size_t comma = actions_text.find(',', pos);
          std::string one = actions_text.substr(
              pos, comma == std::string::npos ? std::string::npos : comma - pos);
          auto cmd = detail::match_action_body(one);
          if (!cmd)
            throw ParseError("malformed action '" + std::string(trim(one)) + "' in rule",
                             line_no, 1);
          detail::validate_action_template(*cmd, catalog, line_no, 1);
          rule.actions.push_back(std::move(*cmd));
          if (comma == std::string::npos) break;
          pos = comma + 1;
        }
        if (rule.actions.empty())
          throw ParseError("rule emits no actions", line_no, 1);
        spec.rules.push_back(std::move(rule));
        break;
      }
      case Section::variables: {
        // Name            (Tactic or a fully state-bound variable)
        // Name : state=value state=value ...
        size_t colon = line.find(':');
        VariableDecl decl;
        if (colon == std::string_view::npos) {
          decl.name = std::string(trim(line));
        } else {
          decl.name = std::string(trim(line.substr(0, colon)));
          std::string_view bindings = line.substr(colon + 1);
          size_t pos = 0;
          while (pos < bindings.size()) {
            while (pos < bindings.size() &&
                   std::isspace(static_cast<unsigned char>(bindings[pos])))
              ++pos;
            if (pos >= bindings.size()) break;
            size_t end = pos;
            while (end < bindings.size() &&
                   !std::isspace(static_cast<unsigned char>(bindings[end])))
              ++end;
            std::string_view pair = bindings.substr(pos, end - pos);
            size_t eq = pair.find('=');
            if (eq == std::string_view::npos)
              throw ParseError("variable binding must be state=value", line_no, 1);
            std::string st(pair.substr(0, eq));
            std::string val(pair.substr(eq + 1));
            if (!spec.has_state(st))
              throw ParseError("variable binding for unknown state '" + st + "'", line_no, 1);
            if (val.empty() || val.find('<') != std::string::npos ||
                val.find('>') != std::string::npos)
              throw ParseError("variable value must be a non-empty angle-bracket-free token",
                               line_no, 1);
            decl.per_state[st] = val;
            pos = end;
          }
        }
        if (!is_identifier(decl.name))
          throw ParseError("variable name must be an identifier", line_no, 1);
        for (const auto& v : spec.variables)
          if (v.name == decl.name)
            throw ParseError("duplicate variable '" + decl.name + "'", line_no, 1);
        if (decl.name == "Tactic") {
          if (!decl.per_state.empty())
            throw ParseError("Tactic is bound to the machine state and takes no bindings",
                             line_no, 1);
        } else {
          for (const auto& st : spec.states)
            if (!decl.per_state.count(st))
              throw ParseError("variable '" + decl.name + "' is missing a binding for state '" +
                                   st + "'",
                               line_no, 1);
        }
        spec.variables.push_back(std::move(decl));
        break;
      }
    }
  }
  flush_policy();

  // Cross-checks.
  if (spec.states.empty()) throw ParseError("spec declares no states", line_no, 1);
  spec.initial_state = spec.states.front();
  for (const auto& t : pending_transitions) {
    if (!spec.has_state(t.from))
      throw ParseError("unknown state '" + t.from + "' in transition", t.line, 1);
    if (!spec.has_state(t.to))
      throw ParseError("unknown state '" + t.to + "' in transition", t.line, 1);
    TransitionRule rule;
    rule.from_state = t.from;
    rule.to_state = t.to;
    rule.priority = t.priority;
    rule.predicate = parse_predicate(t.expr, t.line, 1);
    rule.predicate_text = t.expr;
    rule.gloss = t.gloss;
    spec.transitions.push_back(std::move(rule));
  }
  for (size_t i = 0; i < pending_transitions.size(); ++i)
    for (size_t j = i + 1; j < pending_transitions.size(); ++j)
      if (pending_transitions[i].from == pending_transitions[j].from &&
          pending_transitions[i].priority == pending_transitions[j].priority)
        throw ParseError("duplicate transition priority " +
                             std::to_string(pending_transitions[j].priority) + " from state '" +
                             pending_transitions[j].from + "'",
                         pending_transitions[j].line, 1);
  for (const auto& st : spec.states)
    if (!spec.policies.count(st))
      throw ParseError("state '" + st + "' has no POLICY", 0, 0);
  bool has_tactic = false;
  for (const auto& v : spec.variables) has_tactic |= (v.name == "Tactic");
  if (!has_tactic)
    throw ParseError("VARIABLES must declare Tactic", 0, 0);
  return spec;
}

// ============================================================================
// Symbolic executor — the deterministic ground-truth oracle
// ============================================================================

struct SymbolicDecision {
  std::string state;                     // resolved state after transitions
  StrategyRecord record;                 // timestep 0; stamped when stored
  std::vector<ActionCommand> actions;    // policy actions then rule actions
  std::optional<std::string> fired_gloss;  // the transition that fired, if any
  std::string previous_state;
};

// Realizes one decision cycle without a language model: resolve the current
// state from the previous record, fire the highest-priority true transition,
// tick the state's behavior tree, then append all atomic-rule actions whose
// predicates hold. Pure and deterministic.
//
// Throws StaleMemoryError when `prev` names a state the spec does not have;
// the orchestrator owns the fallback policy.
inline SymbolicDecision symbolic_execute(const MachineSpec& spec, const Observation& o,
                                         const StrategyRecord* prev) {
  std::string current = spec.initial_state;
  if (prev) {
    auto tactic = prev->get("Tactic");
    if (!tactic || !spec.has_state(*tactic))
      throw StaleMemoryError("previous strategy names unknown state '" +
                             (tactic ? *tactic : std::string("<missing>")) + "'");
    current = *tactic;
  }

  SymbolicDecision d;
  d.previous_state = current;

  // Highest-priority (lowest number) transition whose predicate holds.
  const TransitionRule* fired = nullptr;
  for (const auto& t : spec.transitions) {
    if (t.from_state != current) continue;
    if (!t.predicate.evaluate(o)) continue;
    if (!fired || t.priority < fired->priority) fired = &t;
  }
  d.state = fired ? fired->to_state : current;
  if (fired) d.fired_gloss = fired->gloss;

  const BTNode& policy = spec.policies.at(d.state);
  policy.tick(o, d.actions);
  for (const auto& r : spec.rules)
    if (r.predicate.evaluate(o))
      for (const auto& a : r.actions) d.actions.push_back(a);

  for (const auto& v : spec.variables) {
    if (v.name == "Tactic")
      d.record.set("Tactic", d.state);
    else
      d.record.set(v.name, v.per_state.at(d.state));
  }
  return d;
}

// ============================================================================
// Default machine spec (reconstruction consistent with the three-state
// doctrine the tests exercise; see docs/spec-format.md for the grammar)
// ============================================================================

inline const char* default_machine_spec_text() {
  return R"(# Default macro doctrine: build up, hold, strike when clearly ahead.

STATES
opening
defensive
aggressive

TRANSITIONS
opening -> defensive : 1 : own_army_supply >= 6 : "initial force assembled, hold and gather intel"
opening -> defensive : 2 : tick >= 400 : "build-up window is over, switch to holding"
defensive -> aggressive : 1 : own_army_supply >= 2 * visible_enemy_army_supply and own_army_supply >= 10 : "clear force advantage, push out"
aggressive -> defensive : 1 : visible_enemy_army_supply > own_army_supply : "enemy force outweighs ours, fall back"
aggressive -> defensive : 2 : own_army_supply <= 4 : "army spent, regroup at home"

POLICY opening
(selector
  (sequence (condition worker_count < 16 and minerals >= 50) (action Train(worker)))
  (sequence (condition tech_structure_count < 1 and minerals >= 150) (action Build(forge)))
  (sequence (condition minerals >= 100) (action Train(guard)))
  (action Scout(center)))

POLICY defensive
(selector
  (sequence (condition army_at_own_home = 0 and own_army_supply >= 1) (action Retreat()))
  (sequence (condition worker_count < 16 and minerals >= 50) (action Train(worker)))
  (sequence (condition tech_structure_count < 1 and minerals >= 150) (action Build(forge)))
  (sequence (condition tech_structure_count >= 1 and minerals >= 125 and gas >= 50) (action Train(raptor)))
  (sequence (condition minerals >= 100) (action Train(guard)))
  (action Scout(enemy_home)))

POLICY aggressive
(sequence
  (selector
    (sequence (condition army_at_enemy_home = 0 and own_army_supply >= 1) (action Attack(enemy_home)))
    (condition tick >= 0))
  (selector
    (sequence (condition tech_structure_count >= 1 and gas >= 100 and minerals >= 200) (action Train(golem)))
    (sequence (condition tech_structure_count >= 1 and minerals >= 125 and gas >= 50) (action Train(raptor)))
    (sequence (condition minerals >= 100) (action Train(guard)))
    (condition tick >= 0)))

RULES
minerals >= 700 => Build(base) : "mineral bank overflowing, add a base"
gas >= 200 and tech_structure_count >= 1 => Train(golem) : "gas surplus, field a heavy unit"

VARIABLES
Tactic
PriorityUnit : opening=worker defensive=guard aggressive=raptor
)";
}

inline const MachineSpec& default_machine_spec() {
  static const MachineSpec spec = parse_spec(default_machine_spec_text());
  return spec;
}

}  // namespace strategos
