#include "cfgames/bench.hpp"

#include "cfgames/cachat.hpp"
#include "cfgames/errors.hpp"
#include "cfgames/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include <omp.h>

namespace cfgames {

void BenchSpec::check() const {
    if (count < 1) throw PreconditionError("bench count must be at least 1");
    if (timeout_ms <= 0) throw PreconditionError("bench timeout must be positive");
    if (combos.empty()) throw PreconditionError("bench needs at least one combo");
    for (const auto& e : engines)
        if (e != "cachat" && !engine_from_string(e)) throw PreconditionError("unknown engine '" + e + "'");
}

std::vector<Combo> default_combos() {
    std::vector<Combo> out;
    for (const char* c : {"5/5/5", "5/5/10", "5/10/5", "5/5/15", "5/10/10", "5/15/5", "5/5/20", "5/10/15", "10/5/5",
                          "10/5/10", "15/5/5", "10/10/5", "10/15/15", "10/15/20"})
        out.push_back(parse_combo(c));
    return out;
}

BenchRow run_engine(const Instance& instance, const std::string& engine, long timeout_ms) {
    BenchRow row{"", engine, 0, false, 0.0, "", ""};
    const auto start_form = default_start(instance);
    const auto start = std::chrono::steady_clock::now();
    const auto deadline = Deadline::after(std::chrono::milliseconds(timeout_ms));
    try {
        bool refuter;
        if (engine == "cachat") {
            CachatOptions opts;
            opts.deadline = deadline;
            refuter = cachat_refuter_wins(instance, start_form, opts);
        } else {
            auto e = engine_from_string(engine);
            if (!e) throw PreconditionError("unknown engine '" + engine + "'");
            const auto system = build_system(instance.grammar, instance.nfa);
            SolveOptions opts;
            opts.deadline = deadline;
            opts.keep_snapshots = false;
            const auto solution = solve(system, *e, opts);
            refuter = refuter_wins(solution, start_form, make_predicate(instance.nfa, PredicateKind::Reject));
        }
        row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        row.solved = row.ms <= static_cast<double>(timeout_ms);
        if (row.solved) row.winner = refuter ? "refuter" : "prover";
    } catch (const TimeoutError&) {
        row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    } catch (const std::exception& e) {
        row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        row.error = e.what();
    }
    return row;
}

namespace {

double median(std::vector<double> xs) {
    if (xs.empty()) return std::nan("");
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : (xs[m - 1] + xs[m]) / 2.0;
}

} // namespace

BenchResult run_bench(const BenchSpec& spec) {
    spec.check();
    struct Task {
        std::size_t combo;
        std::size_t index;
        std::size_t engine;
    };
    std::vector<Instance> instances;
    std::vector<std::uint64_t> seeds;
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < spec.combos.size(); ++c) {
        for (std::size_t i = 0; i < spec.count; ++i) {
            GenParams p = spec.base;
            p.states = spec.combos[c].states;
            p.letters = spec.combos[c].letters;
            p.refuter_nonterminals = p.prover_nonterminals = spec.combos[c].nonterminals;
            p.refuter_rules.reset();
            p.prover_rules.reset();
            p.seed = spec.base_seed + i;
            seeds.push_back(p.seed);
            instances.push_back(gen_instance(p));
            for (std::size_t e = 0; e < spec.engines.size(); ++e) tasks.push_back({c, instances.size() - 1, e});
        }
    }

    if (spec.warmup)
        for (const auto& e : spec.engines) (void)run_engine(instances.front(), e, spec.timeout_ms);

    std::vector<BenchRow> rows(tasks.size());
    const int workers = static_cast<int>(std::max<std::size_t>(spec.workers, 1));
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(tasks.size()); ++t) {
        const auto& task = tasks[static_cast<std::size_t>(t)];
        BenchRow row = run_engine(instances[task.index], spec.engines[task.engine], spec.timeout_ms);
        row.combo = spec.combos[task.combo].label();
        row.seed = seeds[task.index];
        rows[static_cast<std::size_t>(t)] = std::move(row);
    }

    BenchResult result;
    result.rows = rows;
    for (std::size_t k = 0; k < rows.size(); k += spec.engines.size()) {
        std::string winner;
        for (std::size_t e = 0; e < spec.engines.size(); ++e) {
            const auto& r = rows[k + e];
            if (!r.solved) continue;
            if (winner.empty()) winner = r.winner;
            else if (winner != r.winner) {
                ++result.disagreements;
                break;
            }
        }
    }
    for (const auto& combo : spec.combos) {
        for (const auto& engine : spec.engines) {
            std::vector<double> times;
            std::size_t total = 0;
            for (const auto& r : rows) {
                if (r.combo != combo.label() || r.engine != engine) continue;
                ++total;
                if (r.solved) times.push_back(r.ms);
            }
            double avg = std::nan("");
            if (!times.empty()) {
                avg = 0.0;
                for (double t : times) avg += t;
                avg /= static_cast<double>(times.size());
            }
            const double pct = total ? 100.0 * static_cast<double>(total - times.size()) / static_cast<double>(total) : 0.0;
            result.summary.push_back({combo.label(), engine, times.size(), total, avg, median(times), pct});
        }
    }
    return result;
}

void write_rows_csv(std::ostream& out, const BenchResult& result) {
    out << "combo,engine,seed,solved,ms,winner\n";
    out << std::fixed << std::setprecision(3);
    for (const auto& r : result.rows)
        out << r.combo << ',' << r.engine << ',' << r.seed << ',' << (r.solved ? 1 : 0) << ',' << r.ms << ','
            << (r.solved ? r.winner : (r.error.empty() ? "timeout" : "error")) << '\n';
}

void write_summary_csv(std::ostream& out, const BenchResult& result) {
    out << "combo,engine,avg_ms,timeout_pct\n";
    out << std::fixed << std::setprecision(3);
    for (const auto& s : result.summary) {
        out << s.combo << ',' << s.engine << ',';
        if (std::isnan(s.avg_ms)) out << "n/a";
        else out << s.avg_ms;
        out << ',' << std::setprecision(1) << s.timeout_pct << std::setprecision(3) << '\n';
    }
}

void write_markdown(std::ostream& out, const BenchResult& result, const std::vector<std::string>& engines) {
    out << "| combo |";
    for (const auto& e : engines) out << ' ' << e << " avg ms | " << e << " % timeout |";
    out << "\n|---|";
    for (std::size_t i = 0; i < engines.size(); ++i) out << "---:|---:|";
    out << '\n';
    std::map<std::pair<std::string, std::string>, const BenchSummary*> by_key;
    std::vector<std::string> combos;
    for (const auto& s : result.summary) {
        by_key[{s.combo, s.engine}] = &s;
        if (std::find(combos.begin(), combos.end(), s.combo) == combos.end()) combos.push_back(s.combo);
    }
    out << std::fixed;
    for (const auto& c : combos) {
        out << "| " << c << " |";
        for (const auto& e : engines) {
            auto it = by_key.find({c, e});
            if (it == by_key.end()) {
                out << " | |";
                continue;
            }
            const auto* s = it->second;
            if (std::isnan(s->avg_ms)) out << " n/a |";
            else out << ' ' << std::setprecision(1) << s->avg_ms << " |";
            out << ' ' << std::setprecision(0) << s->timeout_pct << " |";
        }
        out << '\n';
    }
}

} // namespace cfgames
