#ifndef SMSP_MODEL_HPP
#define SMSP_MODEL_HPP

#include "smsp/instance.hpp"
#include "smsp/prealloc.hpp"
#include "smsp/schedule.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace smsp {

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dense, index-based view of an instance restricted by a preallocation.
/// Describes the search space: which lots may share a batch, which machines
/// a batch may use, and which setup and maintenance slots precede it.
class DecisionModel {
public:
    static constexpr std::size_t kMaxMaintPerGroup = 16;
    static constexpr std::size_t kMaxLotsPerProduct = 64;

    struct Maint {
        MaintLabel label;
        Trigger trigger;
        std::int64_t min;
        std::int64_t max;
        Time duration;
    };

    struct Setup {
        SetupId id;
        Time change_time;
        int min_ops;
    };

    struct Group {
        ToolGroupId id;
        std::vector<int> machines;
        std::vector<Maint> maints; // decreasing duration, then label
        std::vector<Setup> setups;
        std::vector<int> families;
    };

    struct MachineInfo {
        Machine machine;
        int group;
        int counter_base; // offset of this machine's maintenance counters
    };

    /// All operations sharing a product and route index; batches are
    /// subsets of one family.
    struct Family {
        ProductId product;
        int index;
        int group;
        Time proc;
        int min_batch;
        int max_batch;
        int setup; // index into Group::setups, -1 for any
        std::vector<int> lots;
    };

    struct LotInfo {
        LotId id;
        int product;
        int first_op;
        int length;
    };

    struct Op {
        int lot;
        int index; // 1-based
        int family;
        int slot_in_family; // bit position within the family's lots
        std::vector<int> allowed; // machine indexes, ascending
    };

    DecisionModel(const Instance &inst, const PreallocationMap &prealloc);

    [[nodiscard]] const Instance &instance() const { return *inst_; }
    [[nodiscard]] const std::vector<Group> &groups() const { return groups_; }
    [[nodiscard]] const std::vector<MachineInfo> &machines() const { return machines_; }
    [[nodiscard]] const std::vector<Family> &families() const { return families_; }
    [[nodiscard]] const std::vector<LotInfo> &lots() const { return lots_; }
    [[nodiscard]] const std::vector<Op> &ops() const { return ops_; }
    [[nodiscard]] std::size_t counter_count() const { return counter_count_; }
    /// Sum of processing times of route steps index..end, for each lot.
    [[nodiscard]] Time remaining_work(int lot, int done) const {
        return tails_[static_cast<std::size_t>(lot)][static_cast<std::size_t>(done)];
    }

    [[nodiscard]] int lot_index(const LotId &id) const;
    [[nodiscard]] int machine_index(const Machine &m) const;
    [[nodiscard]] int op_id(int lot, int index) const { return lots_[static_cast<std::size_t>(lot)].first_op + index - 1; }

    /// Every way to split the lots of a product into batches for one route
    /// step. Steps with max_batch 1 admit only the all-singletons split.
    /// Each block is listed in lot order and blocks by their first lot.
    [[nodiscard]] std::vector<std::vector<std::vector<LotId>>> batch_partitions(const ProductId &product, int index) const;

    /// Machines every member of the batch may use; empty if the members'
    /// preallocations are disjoint.
    [[nodiscard]] std::vector<MachineId> machine_choices(const std::vector<OpRef> &batch) const;

    /// Slots inserted in front of a batch: the chosen maintenances by
    /// decreasing duration, then a setup change if the required setup is
    /// not already in place.
    [[nodiscard]] std::vector<Slot> gap_slots(const Machine &machine, const SetupRef &in_place, const OpRef &op,
                                              const std::vector<MaintLabel> &maints) const;

    /// Total time of gap_slots.
    [[nodiscard]] Time gap_delay(const Machine &machine, const SetupRef &in_place, const OpRef &op,
                                 const std::vector<MaintLabel> &maints) const;

private:
    const Instance *inst_;
    std::vector<Group> groups_;
    std::vector<MachineInfo> machines_;
    std::vector<Family> families_;
    std::vector<LotInfo> lots_;
    std::vector<Op> ops_;
    std::vector<std::vector<Time>> tails_;
    std::size_t counter_count_ = 0;
};

/// One search decision: put a subset of a family's ready lots into a batch
/// on a machine, preceded by the maintenances in `maint_mask` (bits index
/// Group::maints).
struct Move {
    int family = -1;
    std::uint64_t members = 0; // bits index Family::lots
    int machine = -1;
    std::uint32_t maint_mask = 0;
};

/// What a move would do, computed without changing the state.
struct MoveEffect {
    Time start = 0;
    Time completion = 0;
    bool setup_change = false;
    std::int64_t setup_violation = 0;
    std::int64_t batch_violation = 0;
    Time gap = 0;
};

/// A schedule under construction: batches are appended one at a time to
/// the end of machine sequences, each after its route predecessors. Start
/// times of appended batches are final.
class PartialState {
public:
    explicit PartialState(const DecisionModel &model);

    /// Appends a batch given by instance identifiers. Returns false, leaving
    /// the state unchanged, if the batch is not ready, not allowed on the
    /// machine, or would break a hard constraint.
    bool append(const std::vector<OpRef> &batch, const MachineId &machine, const std::vector<MaintLabel> &maints);

    /// Admissible makespan bound for every completion of this state.
    [[nodiscard]] Time lower_bound() const;

    [[nodiscard]] bool complete() const { return scheduled_ == model_->ops().size(); }
    [[nodiscard]] Objectives objectives() const { return {makespan_, setup_violations_, batch_violations_}; }
    [[nodiscard]] GlobalSchedule schedule() const;
    [[nodiscard]] std::size_t depth() const { return path_.size(); }
    [[nodiscard]] const DecisionModel &model() const { return *model_; }

    // Low-level interface for the search.

    /// Bitmask (over Family::lots) of lots whose next step is this family.
    [[nodiscard]] std::uint64_t ready_members(int family) const;
    [[nodiscard]] bool probe(const Move &move, MoveEffect &effect) const;
    void push(const Move &move, const MoveEffect &effect);
    void pop();
    /// True if the move's batch waits directly on the most recent move.
    [[nodiscard]] bool depends_on_last(const Move &move) const;
    [[nodiscard]] Time last_start() const { return path_.empty() ? 0 : path_.back().effect.start; }
    [[nodiscard]] int last_machine() const { return path_.empty() ? -1 : path_.back().move.machine; }
    [[nodiscard]] Time machine_available(int machine) const { return machine_state_[static_cast<std::size_t>(machine)].avail; }
    /// Maintenance counter c (MachineInfo::counter_base + position in Group::maints).
    [[nodiscard]] std::int64_t counter(std::size_t c) const { return counters_[c]; }

private:
    struct MachineState {
        Time avail = 0;
        int setup = -1;      // in place, -1 for the initial "any"
        int batches_since = 0;
    };

    struct Frame {
        Move move;
        MoveEffect effect;
        MachineState machine_before;
        std::array<std::int64_t, DecisionModel::kMaxMaintPerGroup> counters_before{};
        Time makespan_before = 0;
    };

    const DecisionModel *model_;
    std::vector<int> next_;             // per lot: steps already scheduled
    std::vector<Time> completion_;      // per op
    std::vector<int> frame_of_op_;      // per op: index into path_
    std::vector<int> family_left_;      // per family: lots still to batch
    std::vector<MachineState> machine_state_;
    std::vector<std::int64_t> counters_;
    std::vector<Frame> path_;
    std::size_t scheduled_ = 0;
    Time makespan_ = 0;
    std::int64_t setup_violations_ = 0;
    std::int64_t batch_violations_ = 0;
};

} // namespace smsp

#endif // SMSP_MODEL_HPP
