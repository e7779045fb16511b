#include "smsp/oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace smsp {

namespace {

struct Family {
    const OpSpec *spec;
    std::vector<LotId> lots;
};

struct Batch {
    const OpSpec *spec;
    std::vector<LotId> lots;
};

/// All set partitions of `items` into blocks of at most `cap`, in the order
/// of their restricted growth strings.
std::vector<std::vector<std::vector<LotId>>> partitions(const std::vector<LotId> &items, int cap) {
    std::vector<std::vector<std::vector<LotId>>> out;
    std::vector<std::vector<LotId>> blocks;
    auto rec = [&](auto &&self, std::size_t k) -> void {
        if (k == items.size()) {
            out.push_back(blocks);
            return;
        }
        // index loop: the recursion grows `blocks`
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            if (static_cast<int>(blocks[b].size()) >= cap) continue;
            blocks[b].push_back(items[k]);
            self(self, k + 1);
            blocks[b].pop_back();
        }
        blocks.push_back({items[k]});
        self(self, k + 1);
        blocks.pop_back();
    };
    rec(rec, 0);
    return out;
}

class Enumerator {
public:
    Enumerator(const Instance &inst, const OracleLimits &limits,
               const std::function<void(const GlobalSchedule &, const Objectives &)> &visit)
        : inst_(inst), limits_(limits), visit_(visit) {
        for (const auto &[group, ms] : inst.machines) {
            for (const auto &m : ms) machines_.push_back(m);
        }
        std::map<ProductId, std::vector<LotId>> lots_of;
        for (const auto &lot : inst.lots()) lots_of[lot.product].push_back(lot.id);
        for (const auto &[product, lots] : lots_of) {
            for (const auto &step : inst.routes.at(product).steps) families_.push_back({&step, lots});
        }
    }

    std::uint64_t run() {
        batches_.clear();
        choose_partition(0);
        return count_;
    }

private:
    void tick() {
        if (++states_ > limits_.max_enumerated_states) {
            throw LimitExceeded("enumeration exceeded " + std::to_string(limits_.max_enumerated_states) + " states");
        }
    }

    void choose_partition(std::size_t f) {
        if (f == families_.size()) {
            assignment_.assign(batches_.size(), 0);
            choose_machine(0);
            return;
        }
        const auto &fam = families_[f];
        for (const auto &part : partitions(fam.lots, std::max(1, fam.spec->max_batch))) {
            const auto size = batches_.size();
            for (const auto &block : part) batches_.push_back({fam.spec, block});
            choose_partition(f + 1);
            batches_.resize(size);
        }
    }

    void choose_machine(std::size_t b) {
        tick();
        if (b == batches_.size()) {
            build_machine_options();
            return;
        }
        for (std::size_t m = 0; m < machines_.size(); ++m) {
            if (machines_[m].group != batches_[b].spec->group) continue;
            assignment_[b] = m;
            choose_machine(b + 1);
        }
    }

    void build_machine_options() {
        options_.assign(machines_.size(), {});
        for (std::size_t m = 0; m < machines_.size(); ++m) {
            std::vector<std::size_t> mine;
            for (std::size_t b = 0; b < batches_.size(); ++b) {
                if (assignment_[b] == m) mine.push_back(b);
            }
            std::sort(mine.begin(), mine.end());
            do {
                tick();
                if (!route_consistent(mine)) continue;
                MachineSchedule ms{machines_[m], {}};
                std::vector<std::int64_t> window(inst_.group_maints(machines_[m].group).size(), 0);
                fill_gaps(m, mine, 0, AnySetup{}, window, ms);
            } while (std::next_permutation(mine.begin(), mine.end()));
            if (options_[m].empty()) return;
        }
        GlobalSchedule gs;
        combine(0, gs);
    }

    /// A machine cannot run a later route step of a lot before an earlier one.
    [[nodiscard]] bool route_consistent(const std::vector<std::size_t> &order) const {
        std::map<LotId, int> last;
        for (auto b : order) {
            for (const auto &lot : batches_[b].lots) {
                auto [it, fresh] = last.emplace(lot, batches_[b].spec->index);
                if (!fresh) {
                    if (it->second > batches_[b].spec->index) return false;
                    it->second = batches_[b].spec->index;
                }
            }
        }
        return true;
    }

    /// Maintenance kinds of the machine's group, longest first.
    [[nodiscard]] std::vector<const MaintenanceSpec *> gap_order(const ToolGroupId &group) const {
        std::vector<const MaintenanceSpec *> out;
        for (const auto &m : inst_.group_maints(group)) out.push_back(&m);
        std::sort(out.begin(), out.end(), [](const MaintenanceSpec *a, const MaintenanceSpec *b) {
            if (a->duration != b->duration) return a->duration > b->duration;
            return a->label < b->label;
        });
        return out;
    }

    void fill_gaps(std::size_t m, const std::vector<std::size_t> &order, std::size_t j, SetupRef in_place,
                   std::vector<std::int64_t> window, MachineSchedule &ms) {
        if (j == order.size()) {
            tick();
            options_[m].push_back(ms);
            return;
        }
        const auto &batch = batches_[order[j]];
        const auto kinds = gap_order(machines_[m].group);
        const auto &declared = inst_.group_maints(machines_[m].group);
        const std::size_t n = kinds.size();
        for (std::uint32_t pattern = 0; pattern < (1U << n); ++pattern) {
            auto w = window;
            const auto size = ms.slots.size();
            bool ok = true;
            for (std::size_t c = 0; c < n && ok; ++c) {
                if (((pattern >> c) & 1U) == 0) continue;
                auto pos = static_cast<std::size_t>(kinds[c] - declared.data());
                if (w[pos] < kinds[c]->min) ok = false;
                w[pos] = 0;
                ms.slots.emplace_back(MaintSlot{kinds[c]->label});
            }
            if (ok) {
                SetupRef next = in_place;
                if (!is_any(batch.spec->setup) && in_place != batch.spec->setup) {
                    next = batch.spec->setup;
                    ms.slots.emplace_back(SetupSlot{std::get<Term>(batch.spec->setup)});
                }
                const auto k = static_cast<std::int64_t>(batch.lots.size());
                for (std::size_t c = 0; c < declared.size() && ok; ++c) {
                    w[c] += declared[c].trigger == Trigger::Lots ? k : k * (batch.spec->proc_time / k);
                    if (w[c] > declared[c].max) ok = false;
                }
                if (ok) {
                    BatchSlot slot;
                    for (const auto &lot : batch.lots) slot.ops.push_back({lot, batch.spec->index});
                    ms.slots.emplace_back(std::move(slot));
                    fill_gaps(m, order, j + 1, next, w, ms);
                }
            }
            ms.slots.resize(size);
        }
    }

    void combine(std::size_t m, GlobalSchedule &gs) {
        if (m == machines_.size()) {
            tick();
            auto eval = evaluate(gs, inst_);
            if (eval.ok()) {
                ++count_;
                visit_(gs, *eval.objectives);
            }
            return;
        }
        for (const auto &option : options_[m]) {
            gs.machines.push_back(option);
            combine(m + 1, gs);
            gs.machines.pop_back();
        }
    }

    const Instance &inst_;
    const OracleLimits &limits_;
    const std::function<void(const GlobalSchedule &, const Objectives &)> &visit_;
    std::vector<Machine> machines_;
    std::vector<Family> families_;
    std::vector<Batch> batches_;
    std::vector<std::size_t> assignment_;
    std::vector<std::vector<MachineSchedule>> options_;
    std::uint64_t states_ = 0;
    std::uint64_t count_ = 0;
};

void check_limits(const Instance &inst, const OracleLimits &limits) {
    if (limits.max_lots <= 0 || limits.max_ops_per_lot <= 0 || limits.max_machines_per_group <= 0 ||
        limits.max_enumerated_states == 0) {
        throw std::invalid_argument("oracle limits must be positive");
    }
    if (static_cast<int>(inst.lots().size()) > limits.max_lots) {
        throw LimitExceeded("instance has " + std::to_string(inst.lots().size()) + " lots");
    }
    for (const auto &lot : inst.lots()) {
        auto it = inst.routes.find(lot.product);
        if (it != inst.routes.end() && static_cast<int>(it->second.steps.size()) > limits.max_ops_per_lot) {
            throw LimitExceeded("route of product " + lot.product.text() + " is too long");
        }
    }
    for (const auto &[group, ms] : inst.machines) {
        if (static_cast<int>(ms.size()) > limits.max_machines_per_group) {
            throw LimitExceeded("tool group " + group.text() + " has too many machines");
        }
    }
}

} // namespace

std::uint64_t enumerate_schedules(const Instance &inst, const OracleLimits &limits,
                                  const std::function<void(const GlobalSchedule &, const Objectives &)> &visit) {
    check_limits(inst, limits);
    Enumerator e(inst, limits, visit);
    return e.run();
}

OracleResult oracle_optimum(const Instance &inst, const OracleLimits &limits) {
    std::optional<OracleResult> best;
    const auto count = enumerate_schedules(inst, limits, [&](const GlobalSchedule &gs, const Objectives &obj) {
        if (!best || obj < best->objectives) best = OracleResult{obj, gs, 0};
    });
    if (!best) throw NoFeasibleSchedule("no schedule satisfies the hard constraints");
    best->count = count;
    return *best;
}

} // namespace smsp
