#ifndef SMSP_BENCH_HPP
#define SMSP_BENCH_HPP

#include "smsp/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace smsp {

struct BenchConfig {
    std::string strategy; // Fixed, Flexible or Setup
    AllocConfig alloc;
};

/// Fixed size 1, Flexible sizes 2 and 3, Setup sizes 2 and 3; each with
/// lot_step 0 and 1 except size 3, which only uses lot_step 0.
std::vector<BenchConfig> standard_configs();

struct BenchInput {
    std::string id;
    std::string path;
};

struct BenchRow {
    std::string instance;
    std::string strategy;
    int size = 0;
    int lot_step = 0;
    std::optional<Objectives> objectives;
    Seconds stage1_time{0.0};
    Seconds stage2_time{0.0};
    bool stage1_optimal = false;
    bool stage2_optimal = false;
    std::string note;
};

struct BenchOptions {
    Seconds stage1_limit{450.0};
    Seconds stage2_limit{150.0};
    SearchMode search = SearchMode::GreedySeedThenBnb;
    std::uint64_t seed = 0;
    unsigned threads = 0; // 0: SMSP_THREADS, else the hardware concurrency
};

/// Solves one instance under one configuration. A stage that did not
/// finish reports the full limit as its time.
BenchRow bench_one(const std::string &id, const Instance &inst, const BenchConfig &cfg, const BenchOptions &opts);

/// Every input under every configuration, rows ordered by instance id and
/// then configuration. Failures become rows with a note.
std::vector<BenchRow> run_bench(std::vector<BenchInput> inputs, const std::vector<BenchConfig> &configs,
                                const BenchOptions &opts);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow &row);

/// Worker count: SMSP_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned bench_threads();

} // namespace smsp

#endif // SMSP_BENCH_HPP
