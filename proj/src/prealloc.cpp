#include "smsp/prealloc.hpp"

#include <algorithm>

namespace smsp {

void check_alloc_config(const AllocConfig &cfg) {
    if (cfg.sub_size < 0) throw AllocConfigError("sub_size must be nonnegative");
    if (cfg.lot_step != 0 && cfg.lot_step != 1) throw AllocConfigError("lot_step must be 0 or 1");
}

std::vector<Subgroup> partition_subgroups(const std::vector<Machine> &machines, int sub_size) {
    std::vector<Subgroup> out;
    if (machines.empty() || sub_size < 1) return out;
    const auto n = machines.size();
    const auto size = static_cast<std::size_t>(sub_size);
    const std::size_t count = (n + size - 1) / size;
    const std::size_t small = n / count;
    const std::size_t larger = n % count; // this many slices get one extra machine
    std::size_t next = 0;
    for (std::size_t k = 0; k < count; ++k) {
        Subgroup sg;
        sg.group = machines.front().group;
        sg.ordinal = static_cast<int>(k) + 1;
        std::size_t take = small + (k < larger ? 1 : 0);
        sg.machines.assign(machines.begin() + static_cast<std::ptrdiff_t>(next),
                           machines.begin() + static_cast<std::ptrdiff_t>(next + take));
        next += take;
        out.push_back(std::move(sg));
    }
    return out;
}

std::map<ToolGroupId, OpIndexMap> index_operations(const Instance &inst, int lot_step) {
    std::map<ToolGroupId, OpIndexMap> out;
    std::map<ToolGroupId, int> next;
    for (const auto &lot : inst.lots()) {
        auto it = inst.routes.find(lot.product);
        if (it == inst.routes.end()) continue;
        std::map<ToolGroupId, int> lot_index;
        for (const auto &op : it->second.steps) {
            int index = 0;
            if (lot_step == 0) {
                auto [pos, fresh] = lot_index.emplace(op.group, 0);
                if (fresh) pos->second = next[op.group]++;
                index = pos->second;
            } else {
                index = next[op.group]++;
            }
            out[op.group][OpRef{lot.id, op.index}] = index;
        }
    }
    return out;
}

std::map<OpRef, Subgroup> allocate_subgroups(const OpIndexMap &indexes, const std::vector<Subgroup> &subgroups) {
    std::map<OpRef, Subgroup> out;
    if (subgroups.empty()) return out;
    for (const auto &[op, k] : indexes) {
        out.emplace(op, subgroups[static_cast<std::size_t>(k) % subgroups.size()]);
    }
    return out;
}

std::map<OpRef, MachineId> allocate_by_setup(const Subgroup &subgroup, const std::vector<OpRef> &ops,
                                             const Instance &inst) {
    std::map<OpRef, MachineId> out;
    if (subgroup.machines.empty()) return out;

    struct SetupLoad {
        SetupRef setup;
        Time total = 0;
        std::vector<OpRef> ops;
    };
    std::vector<SetupLoad> loads;
    for (const auto &op : ops) {
        const Lot *lot = inst.find_lot(op.lot);
        const OpSpec *spec = lot ? inst.find_op(lot->product, op.index) : nullptr;
        if (spec == nullptr) continue;
        auto it = std::find_if(loads.begin(), loads.end(), [&](const SetupLoad &l) { return l.setup == spec->setup; });
        if (it == loads.end()) {
            loads.push_back({spec->setup, 0, {}});
            it = std::prev(loads.end());
        }
        it->total += spec->proc_time;
        it->ops.push_back(op);
    }
    std::sort(loads.begin(), loads.end(), [](const SetupLoad &a, const SetupLoad &b) {
        if (a.total != b.total) return a.total > b.total;
        return a.setup < b.setup;
    });

    std::vector<Time> machine_load(subgroup.machines.size(), 0);
    for (const auto &sl : loads) {
        std::size_t best = 0;
        for (std::size_t m = 1; m < machine_load.size(); ++m) {
            if (machine_load[m] < machine_load[best] ||
                (machine_load[m] == machine_load[best] && subgroup.machines[m].id < subgroup.machines[best].id)) {
                best = m;
            }
        }
        machine_load[best] += sl.total;
        for (const auto &op : sl.ops) out[op] = subgroup.machines[best].id;
    }
    return out;
}

PreallocationMap build_prealloc(const Instance &inst, const AllocConfig &cfg) {
    check_alloc_config(cfg);
    PreallocationMap out;

    auto ids_of = [](const std::vector<Machine> &ms) {
        std::vector<MachineId> ids;
        ids.reserve(ms.size());
        for (const auto &m : ms) ids.push_back(m.id);
        return ids;
    };

    if (cfg.sub_size == 0) {
        for (const auto &lot : inst.lots()) {
            auto it = inst.routes.find(lot.product);
            if (it == inst.routes.end()) continue;
            for (const auto &op : it->second.steps) {
                out[OpRef{lot.id, op.index}] = ids_of(inst.group_machines(op.group));
            }
        }
        return out;
    }

    const auto indexes = index_operations(inst, cfg.lot_step);
    for (const auto &[group, group_indexes] : indexes) {
        const auto subgroups = partition_subgroups(inst.group_machines(group), cfg.sub_size);
        if (subgroups.empty()) continue;
        const auto allocation = allocate_subgroups(group_indexes, subgroups);
        if (cfg.by_setup && cfg.sub_size >= 2) {
            std::vector<std::vector<OpRef>> members(subgroups.size());
            for (const auto &[op, sg] : allocation) members[static_cast<std::size_t>(sg.ordinal - 1)].push_back(op);
            for (std::size_t k = 0; k < subgroups.size(); ++k) {
                for (const auto &[op, machine] : allocate_by_setup(subgroups[k], members[k], inst)) {
                    out[op] = {machine};
                }
            }
        } else {
            for (const auto &[op, sg] : allocation) out[op] = ids_of(sg.machines);
        }
    }
    return out;
}

} // namespace smsp
