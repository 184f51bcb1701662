#include "cfgames/json_io.hpp"

#include "cfgames/errors.hpp"

namespace cfgames {

std::string_view to_string(PredicateKind kind) { return kind == PredicateKind::Reject ? "reject" : "accept"; }

std::optional<PredicateKind> predicate_from_string(std::string_view name) {
    if (name == "reject") return PredicateKind::Reject;
    if (name == "accept") return PredicateKind::Accept;
    return std::nullopt;
}

Json formula_json(const Nfa& nfa, const Formula& formula) {
    BoxNaming naming;
    naming.add(formula);
    naming.freeze();
    Json clauses = Json::array();
    Json boxes = Json::object();
    for (const auto& c : formula.clauses()) {
        Json clause = Json::array();
        for (const auto& b : c) {
            clause.push_back(naming.name(b));
            boxes[naming.name(b)] = render_box(nfa, b);
        }
        clauses.push_back(std::move(clause));
    }
    return Json{{"clauses", clauses}, {"boxes", boxes}, {"text", render_formula(formula, naming)}};
}

Json stats_json(const SolveStats& s) {
    return Json{{"engine", to_string(s.engine)},     {"rounds", s.rounds},
                {"evaluations", s.evaluations},     {"updates", s.updates},
                {"distinct_boxes", s.distinct_boxes}, {"clause_counts", s.clause_counts},
                {"wall_ms", s.wall_ms}};
}

Json saturation_json(const SaturationStats& s) {
    return Json{{"engine", "cachat"},          {"rounds", s.rounds},         {"transitions", s.transitions},
                {"dfa_states", s.dfa_states}, {"control_states", s.control_states}, {"wall_ms", s.wall_ms}};
}

Json solve_json(const Instance& instance, const Solution& solution, std::span<const Symbol> form, PredicateKind kind,
                bool with_stats) {
    const Formula value = eval_sentential(solution, form);
    const bool rejecting = is_rejecting(value, make_predicate(instance.nfa, kind));
    Json out{{"position", instance.grammar.render(form)},
             {"predicate", to_string(kind)},
             {"winner", rejecting ? "refuter" : "prover"},
             {"rejecting", rejecting},
             {"prover_forces_infinite", value.is_false()},
             {"formula", formula_json(instance.nfa, value)},
             {"engine", to_string(solution.stats.engine)}};
    if (with_stats) out["stats"] = stats_json(solution.stats);
    return out;
}

Json transcript_json(const GameGrammar& grammar, const Nfa& nfa, const Transcript& t) {
    Json steps = Json::array();
    for (const auto& s : t.steps)
        steps.push_back({{"position", grammar.render(s.position)},
                         {"chooser", to_string(s.chooser)},
                         {"rule", s.rule},
                         {"rendering", grammar.render_rule(s.rule)}});
    Json out{{"start", grammar.render(t.start)},
             {"steps", steps},
             {"final", grammar.render(t.final_form)},
             {"outcome", to_string(t.outcome)}};
    if (t.outcome == Outcome::CapReached) {
        out["note"] = "cap reached: inclusion holds so far, no winner declared";
        out["prover_forces_infinite"] = t.prover_forces_infinite;
    } else {
        std::vector<std::string> letters;
        for (Symbol s : t.final_form) letters.push_back(grammar.symbol_name(s));
        const Box box = word_box(nfa, letters);
        out["word"] = grammar.render(t.final_form);
        out["word_box"] = render_box(nfa, box);
        out["in_language"] = box_accepting(nfa, box);
    }
    return out;
}

Json verify_json(const GameGrammar& grammar, const VerifyReport& r) {
    Json words = Json::array();
    for (const auto& w : r.words) words.push_back(grammar.render(w));
    return Json{{"complete", r.complete}, {"all_good", r.all_good}, {"nodes", r.nodes},  {"branches", r.branches},
                {"max_depth", r.max_depth}, {"failures", r.failures}, {"words", words}};
}

Json table_json(const GameGrammar& grammar, const PositionalTable& table) {
    Json moves = Json::object();
    for (const auto& [form, rule] : table.moves)
        moves[grammar.render(form)] = {{"rule", rule}, {"rendering", grammar.render_rule(rule)}};
    return moves;
}

Json instance_summary_json(const Instance& instance) {
    const auto& g = instance.grammar;
    Json nts = Json::array();
    for (const auto& nt : g.nonterminals()) nts.push_back({{"name", nt.name}, {"owner", to_string(nt.owner)}});
    Json rules = Json::array();
    for (RuleId r = 0; r < g.num_rules(); ++r)
        rules.push_back({{"index", r}, {"lhs", g.name(g.rule(r).lhs)}, {"rendering", g.render_rule(r)}});
    std::vector<std::string> finals;
    for (StateId f : instance.nfa.finals()) finals.push_back(instance.nfa.state_names()[f]);
    Json out{{"nonterminals", nts},
             {"terminals", g.terminals()},
             {"rules", rules},
             {"states", instance.nfa.state_names()},
             {"initial", instance.nfa.state_names()[instance.nfa.initial()]},
             {"finals", finals},
             {"start", g.render(default_start(instance))},
             {"boxes", nullptr}};
    try {
        out["boxes"] = monoid_closure(instance.nfa, 100000).size();
    } catch (const PreconditionError&) {
        // too large to enumerate; left null
    }
    return out;
}

} // namespace cfgames
