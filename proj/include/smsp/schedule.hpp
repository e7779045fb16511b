#ifndef SMSP_SCHEDULE_HPP
#define SMSP_SCHEDULE_HPP

#include "smsp/instance.hpp"

#include <compare>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace smsp {

/// Operation l[i]: the index-th step on the route of lot `lot`.
struct OpRef {
    LotId lot;
    int index = 0;

    friend bool operator==(const OpRef &, const OpRef &) = default;
    friend auto operator<=>(const OpRef &, const OpRef &) = default;
};

struct BatchSlot {
    std::vector<OpRef> ops;
    friend bool operator==(const BatchSlot &, const BatchSlot &) = default;
};

struct SetupSlot {
    SetupId setup;
    friend bool operator==(const SetupSlot &, const SetupSlot &) = default;
};

struct MaintSlot {
    MaintLabel label;
    friend bool operator==(const MaintSlot &, const MaintSlot &) = default;
};

using Slot = std::variant<BatchSlot, SetupSlot, MaintSlot>;

struct MachineSchedule {
    Machine machine;
    std::vector<Slot> slots;
    friend bool operator==(const MachineSchedule &, const MachineSchedule &) = default;
};

/// One MachineSchedule per machine. Machines without an entry are idle.
struct GlobalSchedule {
    std::vector<MachineSchedule> machines;
    friend bool operator==(const GlobalSchedule &, const GlobalSchedule &) = default;
};

/// A schedule annotated with earliest start times; start[m][j] belongs to
/// schedule.machines[m].slots[j].
struct TimedSchedule {
    GlobalSchedule schedule;
    std::vector<std::vector<Time>> start;
    std::vector<std::vector<Time>> duration;

    [[nodiscard]] Time completion(std::size_t m, std::size_t j) const { return start[m][j] + duration[m][j]; }
};

struct Objectives {
    Time makespan = 0;
    std::int64_t setup_violations = 0;
    std::int64_t batch_violations = 0;

    friend bool operator==(const Objectives &, const Objectives &) = default;
    friend auto operator<=>(const Objectives &, const Objectives &) = default;
};

std::ostream &operator<<(std::ostream &os, const Objectives &o);

enum class IssueKind {
    // structural: the schedule does not describe this instance
    UnknownMachine,
    DuplicateMachine,
    EmptyBatch,
    UnknownOperation,
    WrongToolGroup,
    MixedBatch,
    UnknownSetup,
    UnknownMaintenance,
    DuplicateOperation,
    MissingOperation,
    // hard constraints on a single machine
    SetupNotInPlace,
    BatchTooLarge,
    MaintenanceOverdue,
    MaintenanceTooEarly,
    // global feasibility
    CyclicDependency,
};

[[nodiscard]] const char *describe(IssueKind kind);
[[nodiscard]] bool is_structural(IssueKind kind);

struct Issue {
    IssueKind kind;
    std::string machine; // "group/id", empty for schedule-wide issues
    std::size_t slot = 0; // 1-based; 0 when not tied to a slot
    std::string detail;
};

std::ostream &operator<<(std::ostream &os, const Issue &issue);

/// Raised when an operation needs a well-formed schedule but gets one with
/// structural issues.
class ScheduleError : public std::runtime_error {
public:
    explicit ScheduleError(std::vector<Issue> issues);
    [[nodiscard]] const std::vector<Issue> &issues() const { return issues_; }

private:
    std::vector<Issue> issues_;
};

/// No schedule satisfies the hard constraints.
class NoFeasibleSchedule : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MachineCheck {
    std::vector<Issue> structural;
    std::vector<Issue> violations;
    [[nodiscard]] bool feasible() const { return structural.empty() && violations.empty(); }
};

/// Setup in place when each slot begins. Position 0 is always AnySetup.
std::vector<SetupRef> setup_states(const MachineSchedule &ms);

/// Hard constraints on one machine: required setups in place, batch sizes
/// within max, and every maintenance window within [min, max].
MachineCheck check_machine(const MachineSchedule &ms, const Instance &inst);

/// Position of a slot inside a GlobalSchedule (0-based indices).
struct SlotPos {
    std::size_t machine = 0;
    std::size_t slot = 0;
    friend bool operator==(const SlotPos &, const SlotPos &) = default;
};

struct CyclicDependency {
    /// Closed walk of waiting edges; each edge goes from a slot to one that
    /// must wait for it.
    std::vector<std::pair<SlotPos, SlotPos>> cycle;
    std::string message;
};

/// Earliest start times. Machine order and route order both impose waiting;
/// a cycle among them means some start time is unbounded.
/// Throws ScheduleError if the schedule is structurally broken.
std::variant<TimedSchedule, CyclicDependency> compute_start_times(const GlobalSchedule &gs, const Instance &inst);

Time makespan(const TimedSchedule &ts);

std::int64_t count_setup_violations(const GlobalSchedule &gs, const Instance &inst);
std::int64_t count_batch_violations(const GlobalSchedule &gs, const Instance &inst);

struct Evaluation {
    std::optional<Objectives> objectives;
    std::optional<TimedSchedule> timed;
    std::vector<Issue> issues;

    [[nodiscard]] bool ok() const { return objectives.has_value(); }
};

/// Full verdict for a candidate schedule: structure, per-machine
/// feasibility, coverage, global feasibility, then the three objectives.
Evaluation evaluate(const GlobalSchedule &gs, const Instance &inst);

std::string machine_name(const Machine &m);

} // namespace smsp

#endif // SMSP_SCHEDULE_HPP
