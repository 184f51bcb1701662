#include "cfgames/cli.hpp"

#include "cfgames/bench.hpp"
#include "cfgames/cachat.hpp"
#include "cfgames/errors.hpp"
#include "cfgames/generator.hpp"
#include "cfgames/json_io.hpp"
#include "cfgames/service.hpp"
#include "cfgames/strategy.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace cfgames {

namespace {

struct Common {
    std::string file;
    std::string position;
};

SententialForm position_of(const Instance& inst, const std::string& text) {
    return text.empty() ? default_start(inst) : inst.grammar.parse_form(text);
}

void emit(std::ostream& out, const Json& j, bool compact) { out << (compact ? j.dump() : j.dump(2)) << '\n'; }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw PreconditionError("cannot write " + path);
    f << text;
}

// Long positions keep only their tail.
std::string abbreviate(std::string text) {
    constexpr std::size_t keep = 72;
    if (text.size() <= keep + 4) return text;
    auto tail = text.substr(text.size() - keep);
    return "... " + tail.substr(tail.find_first_not_of(' '));
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Inclusion games on context-free grammars against a regular specification"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    // solve
    Common solve_args;
    std::string engine = "naive", predicate = "reject";
    bool stats = false, compact = false;
    auto* solve_cmd = app.add_subcommand("solve", "Decide the winner of a position");
    solve_cmd->add_option("file", solve_args.file, "Instance file")->required();
    solve_cmd->add_option("--position", solve_args.position, "Sentential form (default: start)");
    solve_cmd->add_option("--engine", engine, "naive | naive-parallel | worklist");
    solve_cmd->add_option("--predicate", predicate, "reject | accept");
    solve_cmd->add_flag("--stats", stats, "Include solver statistics");
    solve_cmd->add_flag("--json", compact, "Single-line JSON");

    // strategy
    Common strat_args;
    std::string strat_out;
    std::size_t verify_budget = 100000;
    auto* strat_cmd = app.add_subcommand("strategy", "Synthesize and verify a winning strategy");
    strat_cmd->add_option("file", strat_args.file, "Instance file")->required();
    strat_cmd->add_option("--position", strat_args.position, "Sentential form (default: start)");
    strat_cmd->add_option("--out", strat_out, "Write the strategy JSON here");
    strat_cmd->add_option("--verify-budget", verify_budget, "Node budget for exhaustive verification");

    // play
    Common play_args;
    std::string human = "none", refuter_kind = "synthesized", prover_kind = "synthesized";
    std::size_t cap = 10000;
    std::uint64_t play_seed = 1;
    bool play_json = false;
    auto* play_cmd = app.add_subcommand("play", "Play a game, optionally against a human");
    play_cmd->add_option("file", play_args.file, "Instance file")->required();
    play_cmd->add_option("--position", play_args.position, "Sentential form (default: start)");
    play_cmd->add_option("--human", human, "refuter | prover | none");
    play_cmd->add_option("--cap", cap, "Maximum number of derivation steps");
    play_cmd->add_option("--refuter", refuter_kind, "Machine refuter: synthesized | random");
    play_cmd->add_option("--prover", prover_kind, "Machine prover: synthesized | random");
    play_cmd->add_option("--seed", play_seed, "Seed for random agents");
    play_cmd->add_flag("--json", play_json, "Print the transcript as JSON");

    // gen
    GenParams gen;
    std::string gen_out, combo;
    std::size_t refuter_rules = 0, prover_rules = 0;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance");
    gen_cmd->add_option("--combo", combo, "states/letters/non-terminals per player, e.g. 5/5/10");
    gen_cmd->add_option("--states", gen.states);
    gen_cmd->add_option("--letters", gen.letters);
    gen_cmd->add_option("--density", gen.density, "Transitions per letter as a multiple of the state count");
    gen_cmd->add_option("--final-fraction", gen.final_fraction);
    gen_cmd->add_flag("--initial-final", gen.initial_final, "Force the initial state to be final");
    gen_cmd->add_option("--refuter-nts", gen.refuter_nonterminals);
    gen_cmd->add_option("--prover-nts", gen.prover_nonterminals);
    auto* rr = gen_cmd->add_option("--refuter-rules", refuter_rules, "Default: 2 x refuter non-terminals");
    auto* pr = gen_cmd->add_option("--prover-rules", prover_rules, "Default: 2 x prover non-terminals");
    gen_cmd->add_option("--pa", gen.p_a, "Probability of the leading terminal");
    gen_cmd->add_option("--py", gen.p_y, "Probability of the non-terminal");
    gen_cmd->add_option("--pb", gen.p_b, "Probability of the trailing terminal");
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--out", gen_out, "Output file (default: stdout)");

    // bench
    BenchSpec bench;
    std::string combos, engines = "naive,worklist,cachat", bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "Compare engines on random instances");
    bench_cmd->add_option("--combos", combos, "Comma separated x/y/z list (default: the full table)");
    bench_cmd->add_option("--count", bench.count, "Instances per combo");
    bench_cmd->add_option("--timeout-ms", bench.timeout_ms, "Per-solve timeout");
    bench_cmd->add_option("--engines", engines, "Comma separated: naive, naive-parallel, worklist, cachat");
    bench_cmd->add_option("--seed", bench.base_seed, "Seed of the first instance");
    bench_cmd->add_option("--workers", bench.workers, "Concurrent solves");
    bench_cmd->add_option("--out", bench_out, "Prefix for .rows.csv, .summary.csv and .md outputs");

    // cachat
    Common cachat_args;
    bool no_minimize = false;
    auto* cachat_cmd = app.add_subcommand("cachat", "Solve with the pushdown saturation baseline");
    cachat_cmd->add_option("file", cachat_args.file, "Instance file")->required();
    cachat_cmd->add_option("--position", cachat_args.position, "Sentential form (default: start)");
    cachat_cmd->add_option("--predicate", predicate, "reject | accept");
    cachat_cmd->add_flag("--no-minimize", no_minimize, "Skip DFA minimization");

    // serve
    int port = 8080;
    std::string host = "127.0.0.1", instance_dir;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP play service");
    serve_cmd->add_option("--port", port);
    serve_cmd->add_option("--host", host);
    serve_cmd->add_option("--instance-dir", instance_dir, "Preload every *.game file; ids are file stems");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*solve_cmd) {
            auto inst = load_instance(solve_args.file);
            auto e = engine_from_string(engine);
            if (!e) throw PreconditionError("unknown engine '" + engine + "'");
            auto kind = predicate_from_string(predicate);
            if (!kind) throw PreconditionError("unknown predicate '" + predicate + "'");
            auto form = position_of(inst, solve_args.position);
            auto solution = solve(build_system(inst.grammar, inst.nfa), *e);
            emit(out, solve_json(inst, solution, form, *kind, stats), compact);
        } else if (*strat_cmd) {
            auto inst = load_instance(strat_args.file);
            auto form = position_of(inst, strat_args.position);
            auto solution = kleene_naive(build_system(inst.grammar, inst.nfa));
            Arena arena{inst.grammar, inst.nfa, solution, make_predicate(inst.nfa, PredicateKind::Reject)};
            Json j{{"position", inst.grammar.render(form)}};
            if (refuter_wins(solution, form, arena.pred)) {
                auto init = refuter_init(arena, form);
                Json image = Json::array();
                for (const auto& b : init.initial_image) image.push_back(render_box(inst.nfa, b));
                auto report = verify_refuter_exhaustive(arena, form, verify_budget);
                auto table = extract_positional_refuter(arena, form, verify_budget);
                auto replay = replay_positional_refuter(arena, table, form, verify_budget);
                j["winner"] = "refuter";
                j["initial_image"] = image;
                j["verify"] = verify_json(inst.grammar, report);
                j["table"] = table_json(inst.grammar, table);
                j["table_complete"] = table.complete;
                j["replay"] = verify_json(inst.grammar, replay);
            } else {
                auto table = extract_prover_table(arena, form, verify_budget);
                j["winner"] = "prover";
                j["table"] = table_json(inst.grammar, table);
                j["table_complete"] = table.complete;
                j["prover_forces_infinite"] = prover_forces_infinite(solution, form);
            }
            if (!strat_out.empty()) write_text(strat_out, j.dump(2) + "\n");
            emit(out, j, false);
        } else if (*play_cmd) {
            auto inst = load_instance(play_args.file);
            auto form = position_of(inst, play_args.position);
            auto solution = kleene_naive(build_system(inst.grammar, inst.nfa));
            Arena arena{inst.grammar, inst.nfa, solution, make_predicate(inst.nfa, PredicateKind::Reject)};
            if (human != "none" && human != "refuter" && human != "prover")
                throw PreconditionError("--human must be refuter, prover or none");
            auto machine = [&](const std::string& kind, Player role, std::uint64_t seed) -> std::unique_ptr<Agent> {
                if (human == to_string(role)) return std::make_unique<InteractiveAgent>(in, out);
                if (kind == "random") return std::make_unique<RandomAgent>(seed);
                if (kind != "synthesized") throw PreconditionError("agent must be synthesized or random");
                if (role == Player::Refuter) return std::make_unique<SynthesizedRefuter>();
                return std::make_unique<SynthesizedProver>();
            };
            auto refuter = machine(refuter_kind, Player::Refuter, play_seed);
            auto prover = machine(prover_kind, Player::Prover, play_seed + 1);
            PlaySession session(arena, form, cap);
            auto transcript = play(session, *refuter, *prover);
            auto j = transcript_json(inst.grammar, inst.nfa, transcript);
            if (play_json) {
                emit(out, j, false);
            } else {
                for (const auto& s : transcript.steps)
                    out << abbreviate(inst.grammar.render(s.position)) << "  [" << to_string(s.chooser) << "] "
                        << inst.grammar.render_rule(s.rule) << '\n';
                out << "final: " << abbreviate(inst.grammar.render(transcript.final_form)) << '\n';
                out << "outcome: " << to_string(transcript.outcome);
                if (transcript.outcome == Outcome::RefuterWins)
                    out << " (" << j["word"].get<std::string>() << " is not in the language)";
                else if (transcript.outcome == Outcome::ProverWins)
                    out << " (" << j["word"].get<std::string>() << " is in the language)";
                else
                    out << " (inclusion holds so far)";
                out << '\n';
            }
        } else if (*gen_cmd) {
            if (!combo.empty()) {
                auto c = parse_combo(combo);
                gen.states = c.states;
                gen.letters = c.letters;
                gen.refuter_nonterminals = gen.prover_nonterminals = c.nonterminals;
            }
            if (rr->count()) gen.refuter_rules = refuter_rules;
            if (pr->count()) gen.prover_rules = prover_rules;
            auto text = render_instance(gen_instance(gen), gen_metadata(gen));
            if (gen_out.empty()) out << text;
            else write_text(gen_out, text);
        } else if (*bench_cmd) {
            bench.combos.clear();
            if (combos.empty()) bench.combos = default_combos();
            else
                for (const auto& c : split_list(combos)) bench.combos.push_back(parse_combo(c));
            bench.engines = split_list(engines);
            auto result = run_bench(bench);
            write_markdown(out, result, bench.engines);
            if (result.disagreements) err << "warning: engines disagree on " << result.disagreements << " instances\n";
            if (!bench_out.empty()) {
                std::ostringstream rows, summary, md;
                write_rows_csv(rows, result);
                write_summary_csv(summary, result);
                write_markdown(md, result, bench.engines);
                write_text(bench_out + ".rows.csv", rows.str());
                write_text(bench_out + ".summary.csv", summary.str());
                write_text(bench_out + ".md", md.str());
            }
        } else if (*cachat_cmd) {
            auto inst = load_instance(cachat_args.file);
            auto kind = predicate_from_string(predicate);
            if (!kind) throw PreconditionError("unknown predicate '" + predicate + "'");
            auto form = position_of(inst, cachat_args.position);
            CachatOptions opts;
            opts.minimize = !no_minimize;
            opts.predicate = *kind;
            auto r = cachat_solve(inst, form, opts);
            emit(out,
                 Json{{"position", inst.grammar.render(form)},
                      {"predicate", to_string(*kind)},
                      {"winner", r.refuter_wins ? "refuter" : "prover"},
                      {"engine", "cachat"},
                      {"stats", saturation_json(r.stats)}},
                 false);
        } else if (*serve_cmd) {
            GameService service;
            if (!instance_dir.empty()) err << "loaded " << service.load_directory(instance_dir) << " instances\n";
            err << "listening on http://" << host << ':' << port << '\n';
            serve(service, host, port);
        }
    } catch (const ParseError& e) {
        err << "parse error at line " << e.line() << ": " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        err << "invalid instance: " << e.what() << '\n';
        return 2;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvariantError& e) {
        err << "internal invariant violated: " << e.what() << '\n';
        return 3;
    } catch (const TimeoutError& e) {
        err << "timeout: " << e.what() << '\n';
        return 1;
    } catch (const GameError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

} // namespace cfgames
