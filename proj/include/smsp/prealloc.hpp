#ifndef SMSP_PREALLOC_HPP
#define SMSP_PREALLOC_HPP

#include "smsp/instance.hpp"
#include "smsp/schedule.hpp"

#include <map>
#include <stdexcept>
#include <vector>

namespace smsp {

/// Static machine preallocation.
///   sub_size 0  -> every operation may use its whole tool group
///   sub_size 1  -> every operation is fixed to one machine
///   sub_size k  -> operations are confined to one subgroup of at most k
///                  machines, or to a single machine of it with by_setup
struct AllocConfig {
    int sub_size = 0;
    int lot_step = 0; // 0: a lot keeps one index per tool group; 1: each visit advances
    bool by_setup = false;

    friend bool operator==(const AllocConfig &, const AllocConfig &) = default;
};

class AllocConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws AllocConfigError for negative sub_size or lot_step outside {0, 1}.
void check_alloc_config(const AllocConfig &cfg);

struct Subgroup {
    ToolGroupId group;
    int ordinal = 1; // 1-based
    std::vector<Machine> machines;

    friend bool operator==(const Subgroup &, const Subgroup &) = default;
};

/// Splits machines, in order, into ceil(N / sub_size) contiguous slices of
/// balanced size (sizes differ by at most one, larger slices first).
std::vector<Subgroup> partition_subgroups(const std::vector<Machine> &machines, int sub_size);

using OpIndexMap = std::map<OpRef, int>;

/// Lexicographic per-tool-group index of every operation, enumerating
/// operations in (lot, route index) order. Indexes restart at 0 per group.
std::map<ToolGroupId, OpIndexMap> index_operations(const Instance &inst, int lot_step);

/// Round robin: index k goes to subgroup (k mod count) + 1.
std::map<OpRef, Subgroup> allocate_subgroups(const OpIndexMap &indexes, const std::vector<Subgroup> &subgroups);

/// Within one subgroup, hands out setups (heaviest total processing time
/// first, ties by setup id) to the least loaded machine so far (ties by
/// machine id). Operations needing any setup form one pseudo-setup.
std::map<OpRef, MachineId> allocate_by_setup(const Subgroup &subgroup, const std::vector<OpRef> &ops,
                                             const Instance &inst);

using PreallocationMap = std::map<OpRef, std::vector<MachineId>>;

PreallocationMap build_prealloc(const Instance &inst, const AllocConfig &cfg);

} // namespace smsp

#endif // SMSP_PREALLOC_HPP
