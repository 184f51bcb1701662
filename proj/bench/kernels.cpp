// Serial vs OpenMP Kleene rounds, with the worklist engine for reference.
#include "cfgames/errors.hpp"
#include "cfgames/generator.hpp"
#include "cfgames/solver.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace cfgames;

namespace {

struct Timing {
    std::vector<double> ms;
    std::size_t timeouts = 0;
};

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compare the serial and OpenMP naive Kleene kernels"};
    std::vector<std::string> combos{"5/5/10", "10/5/10", "5/10/20"};
    std::size_t count = 10;
    long timeout_ms = 10000;
    int threads = 0;
    std::uint64_t seed = 1;
    app.add_option("--combos", combos, "x/y/z combos");
    app.add_option("--count", count, "Instances per combo");
    app.add_option("--timeout-ms", timeout_ms);
    app.add_option("--threads", threads, "OpenMP threads (0: runtime default)");
    app.add_option("--seed", seed);
    CLI11_PARSE(app, argc, argv);
    if (threads > 0) omp_set_num_threads(threads);

    const std::vector<Engine> engines{Engine::Naive, Engine::NaiveParallel, Engine::Worklist};
    std::cout << "threads: " << omp_get_max_threads() << '\n';
    std::cout << "| combo | naive median ms | naive-parallel median ms | speedup | worklist median ms | timeouts | mismatches |\n";
    std::cout << "|---|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& label : combos) {
        const Combo c = parse_combo(label);
        std::vector<Timing> timing(engines.size());
        std::size_t timeouts = 0, mismatches = 0;
        for (std::size_t i = 0; i < count; ++i) {
            GenParams p;
            p.states = c.states;
            p.letters = c.letters;
            p.refuter_nonterminals = p.prover_nonterminals = c.nonterminals;
            p.seed = seed + i;
            const Instance inst = gen_instance(p);
            const auto system = build_system(inst.grammar, inst.nfa);
            std::optional<std::vector<Formula>> reference;
            for (std::size_t e = 0; e < engines.size(); ++e) {
                const auto start = std::chrono::steady_clock::now();
                try {
                    auto sol = solve(system, engines[e], {Deadline::after(std::chrono::milliseconds(timeout_ms)), false});
                    timing[e].ms.push_back(
                        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
                    if (!reference) reference = sol.final;
                    else if (*reference != sol.final) ++mismatches;
                } catch (const TimeoutError&) {
                    ++timing[e].timeouts;
                    ++timeouts;
                }
            }
        }
        const double serial = median(timing[0].ms), parallel = median(timing[1].ms);
        std::cout << std::fixed << std::setprecision(2) << "| " << label << " | " << serial << " | " << parallel
                  << " | " << (parallel > 0 ? serial / parallel : 0.0) << " | " << median(timing[2].ms) << " | "
                  << timeouts << " | " << mismatches << " |\n";
    }
    return 0;
}
