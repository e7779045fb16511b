#ifndef SMSP_SOLVER_HPP
#define SMSP_SOLVER_HPP

#include "smsp/instance.hpp"
#include "smsp/model.hpp"
#include "smsp/prealloc.hpp"
#include "smsp/schedule.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace smsp {

using Seconds = std::chrono::duration<double>;

enum class SearchMode {
    ExactBnb,          // one deterministic depth-first search
    GreedySeedThenBnb, // dispatch seed, then randomized restarts of growing size
};

struct IncumbentRecord {
    int stage = 1;
    std::int64_t elapsed_ms = 0; // since the start of solve
    Objectives objectives;
};

struct SolverConfig {
    Seconds stage1_limit{450.0};
    Seconds stage2_limit{150.0};
    AllocConfig prealloc;
    SearchMode search = SearchMode::ExactBnb;
    std::uint64_t rng_seed = 0;
    /// Called for every new incumbent, in order, with its schedule.
    std::function<void(const IncumbentRecord &, const GlobalSchedule &)> on_incumbent;

    /// Exact search without time limits.
    static SolverConfig unlimited();
};

class SolverConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SolveResult {
    std::optional<TimedSchedule> best;
    std::optional<Objectives> objectives;
    bool stage1_optimal = false;
    bool stage2_optimal = false;
    Seconds stage1_time{0.0};
    Seconds stage2_time{0.0};
    std::vector<IncumbentRecord> log;
    std::uint64_t nodes = 0;
};

void check_solver_config(const SolverConfig &cfg);

/// Two-stage search: least makespan, then fewest (setup, batch) violations
/// among schedules no longer than the stage-one result. Returns the best
/// schedule found; an empty result means the time ran out before any
/// schedule was found. Throws NoFeasibleSchedule when the search space is
/// exhausted without a schedule.
SolveResult solve(const Instance &inst, const SolverConfig &cfg);

/// Second stage on its own: fewest (setup, batch) violations among
/// schedules with makespan at most `fixed_makespan`.
SolveResult minimize_violations(const Instance &inst, Time fixed_makespan, const SolverConfig &cfg);

/// Bound on the makespan of every completion of `state`.
Time lower_bound(const PartialState &state);

} // namespace smsp

#endif // SMSP_SOLVER_HPP
