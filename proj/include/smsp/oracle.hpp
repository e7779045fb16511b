#ifndef SMSP_ORACLE_HPP
#define SMSP_ORACLE_HPP

#include "smsp/instance.hpp"
#include "smsp/schedule.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>

namespace smsp {

/// Size caps for brute-force enumeration.
struct OracleLimits {
    int max_lots = 3;
    int max_ops_per_lot = 4;
    int max_machines_per_group = 2;
    std::uint64_t max_enumerated_states = 10'000'000;
};

class LimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Visits every feasible schedule of a small instance: all batch
/// partitions, machine assignments over whole tool groups, machine orders,
/// and maintenance placements (at most one of each kind per gap, longest
/// first). Setups appear exactly where a batch needs a different one.
/// Returns the number of schedules visited. Throws LimitExceeded when the
/// instance or the search exceeds `limits`.
std::uint64_t enumerate_schedules(const Instance &inst, const OracleLimits &limits,
                                  const std::function<void(const GlobalSchedule &, const Objectives &)> &visit);

struct OracleResult {
    Objectives objectives;
    GlobalSchedule schedule;
    std::uint64_t count = 0;
};

/// Lexicographically least (makespan, setup, batch) over all schedules,
/// first found on ties. Throws NoFeasibleSchedule if there is none.
OracleResult oracle_optimum(const Instance &inst, const OracleLimits &limits = {});

} // namespace smsp

#endif // SMSP_ORACLE_HPP
