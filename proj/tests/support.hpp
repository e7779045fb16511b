#ifndef SMSP_TESTS_SUPPORT_HPP
#define SMSP_TESTS_SUPPORT_HPP

#include "smsp/instance.hpp"
#include "smsp/schedule.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace smsp::testing {

std::string data_path(const std::string &name);

/// The two-lot instance shipped in data/.
Instance two_lots();

/// The optimal two-lot schedule drawn as a Gantt chart (makespan 89).
GlobalSchedule two_lots_reference_schedule();

/// Small random instance: up to 3 lots, 4 steps per route, 2 machines per
/// group, mixed maintenance triggers. May be infeasible.
Instance micro_instance(std::uint64_t seed);

/// Start times by Bellman-Ford style relaxation over machine and route
/// precedence. nullopt when relaxation does not settle (a cycle).
std::optional<std::vector<std::vector<Time>>> longest_path_starts(const GlobalSchedule &gs, const Instance &inst);

/// Second, independent verdict on a schedule: the set of violated
/// constraint kinds (empty when feasible) and, if feasible, the objectives.
struct Verdict {
    std::set<IssueKind> kinds;
    std::optional<Objectives> objectives;
};
Verdict reference_verdict(const GlobalSchedule &gs, const Instance &inst);

enum class Mutation { DropMaintenance, SwapAdjacent, ShrinkBatch, DropSetupChange };
const char *mutation_name(Mutation m);

/// Applies one edit of the given kind at a random position; false if the
/// schedule has no place for that kind of edit.
bool mutate(GlobalSchedule &gs, Mutation kind, std::mt19937_64 &rng);

/// Constraint kinds that an edit of this kind can break on its own.
std::set<IssueKind> kinds_for(Mutation m);

} // namespace smsp::testing

#endif // SMSP_TESTS_SUPPORT_HPP
