#pragma once

#include "cfgames/generator.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cfgames {

/// Engines compared by the harness: the three summary engines plus the
/// saturation baseline ("cachat").
struct BenchSpec {
    std::vector<Combo> combos;
    std::size_t count = 50;
    long timeout_ms = 10000;
    std::vector<std::string> engines{"naive", "worklist", "cachat"};
    std::uint64_t base_seed = 1;
    std::size_t workers = 1;
    bool warmup = true;
    /// Generator settings other than the combo sizes.
    GenParams base;

    void check() const;
};

/// The combos of the published experiment table.
std::vector<Combo> default_combos();

struct BenchRow {
    std::string combo;
    std::string engine;
    std::uint64_t seed;
    bool solved;
    double ms;
    std::string winner; ///< "refuter", "prover" or empty when unsolved
    std::string error;  ///< set when the engine failed for a reason other than the timeout
};

struct BenchSummary {
    std::string combo;
    std::string engine;
    std::size_t solved;
    std::size_t total;
    double avg_ms;    ///< over solved instances; NaN when none
    double median_ms; ///< over solved instances; NaN when none
    double timeout_pct;
};

struct BenchResult {
    std::vector<BenchRow> rows;          ///< ordered by (combo, seed, engine)
    std::vector<BenchSummary> summary;   ///< ordered by (combo, engine)
    std::size_t disagreements = 0;       ///< instances where solved engines disagree on the winner
};

/// One timed solve of the start symbol of an instance.
BenchRow run_engine(const Instance& instance, const std::string& engine, long timeout_ms);

BenchResult run_bench(const BenchSpec& spec);

void write_rows_csv(std::ostream& out, const BenchResult& result);
void write_summary_csv(std::ostream& out, const BenchResult& result);
void write_markdown(std::ostream& out, const BenchResult& result, const std::vector<std::string>& engines);

} // namespace cfgames
