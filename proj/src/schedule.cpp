#include "smsp/schedule.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace smsp {

std::ostream &operator<<(std::ostream &os, const Objectives &o) {
    return os << '(' << o.makespan << ", " << o.setup_violations << ", " << o.batch_violations << ')';
}

const char *describe(IssueKind kind) {
    switch (kind) {
    case IssueKind::UnknownMachine: return "unknown machine";
    case IssueKind::DuplicateMachine: return "machine listed twice";
    case IssueKind::EmptyBatch: return "empty batch";
    case IssueKind::UnknownOperation: return "unknown operation";
    case IssueKind::WrongToolGroup: return "operation on wrong tool group";
    case IssueKind::MixedBatch: return "batch mixes operations";
    case IssueKind::UnknownSetup: return "unknown setup";
    case IssueKind::UnknownMaintenance: return "unknown maintenance";
    case IssueKind::DuplicateOperation: return "operation scheduled twice";
    case IssueKind::MissingOperation: return "operation not scheduled";
    case IssueKind::SetupNotInPlace: return "setup not in place";
    case IssueKind::BatchTooLarge: return "batch exceeds max_batch";
    case IssueKind::MaintenanceOverdue: return "maintenance window exceeded";
    case IssueKind::MaintenanceTooEarly: return "maintenance before window minimum";
    case IssueKind::CyclicDependency: return "circular waiting dependency";
    }
    return "?";
}

bool is_structural(IssueKind kind) {
    return kind <= IssueKind::MissingOperation;
}

std::ostream &operator<<(std::ostream &os, const Issue &issue) {
    os << describe(issue.kind);
    if (!issue.machine.empty()) {
        os << " on " << issue.machine;
        if (issue.slot > 0) os << " slot " << issue.slot;
    }
    if (!issue.detail.empty()) os << ": " << issue.detail;
    return os;
}

namespace {

std::string summarize(const std::vector<Issue> &issues) {
    std::ostringstream os;
    os << "schedule is malformed";
    if (!issues.empty()) os << ": " << issues.front();
    if (issues.size() > 1) os << " (+" << issues.size() - 1 << " more)";
    return os.str();
}

std::string op_name(const OpRef &op) { return op.lot.text() + "[" + std::to_string(op.index) + "]"; }

const OpSpec *resolve(const Instance &inst, const OpRef &op) {
    const Lot *lot = inst.find_lot(op.lot);
    return lot == nullptr ? nullptr : inst.find_op(lot->product, op.index);
}

Time slot_duration(const Slot &slot, const Machine &m, const Instance &inst) {
    if (const auto *b = std::get_if<BatchSlot>(&slot)) {
        const OpSpec *spec = b->ops.empty() ? nullptr : resolve(inst, b->ops.front());
        return spec ? spec->proc_time : 0;
    }
    if (const auto *s = std::get_if<SetupSlot>(&slot)) {
        const SetupSpec *spec = inst.find_setup(m.group, s->setup);
        return spec ? spec->change_time : 0;
    }
    const MaintenanceSpec *spec = inst.find_maint(m.group, std::get<MaintSlot>(slot).label);
    return spec ? spec->duration : 0;
}

/// Per-lot shares of the processing time: k lots of op time T add k*(T/k).
std::int64_t time_contribution(const OpSpec &spec, std::size_t batch_size) {
    auto k = static_cast<std::int64_t>(batch_size);
    return k * (spec.proc_time / k);
}

} // namespace

ScheduleError::ScheduleError(std::vector<Issue> issues)
    : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}

std::string machine_name(const Machine &m) { return m.group.text() + "/" + m.id.text(); }

std::vector<SetupRef> setup_states(const MachineSchedule &ms) {
    std::vector<SetupRef> out;
    out.reserve(ms.slots.size());
    SetupRef current = AnySetup{};
    for (const auto &slot : ms.slots) {
        out.push_back(current);
        if (const auto *s = std::get_if<SetupSlot>(&slot)) current = s->setup;
    }
    return out;
}

MachineCheck check_machine(const MachineSchedule &ms, const Instance &inst) {
    MachineCheck out;
    const std::string name = machine_name(ms.machine);
    const auto &known = inst.group_machines(ms.machine.group);
    if (std::find(known.begin(), known.end(), ms.machine) == known.end()) {
        out.structural.push_back({IssueKind::UnknownMachine, name, 0, {}});
        return out;
    }

    const auto &maints = inst.group_maints(ms.machine.group);
    std::vector<std::int64_t> window(maints.size(), 0);
    std::vector<bool> overdue_reported(maints.size(), false);
    const auto states = setup_states(ms);

    for (std::size_t j = 0; j < ms.slots.size(); ++j) {
        const std::size_t pos = j + 1;
        const Slot &slot = ms.slots[j];

        if (const auto *batch = std::get_if<BatchSlot>(&slot)) {
            if (batch->ops.empty()) {
                out.structural.push_back({IssueKind::EmptyBatch, name, pos, {}});
                continue;
            }
            bool broken = false;
            const OpSpec *spec = nullptr;
            const Lot *first_lot = nullptr;
            std::set<LotId> members;
            for (const auto &op : batch->ops) {
                const Lot *lot = inst.find_lot(op.lot);
                const OpSpec *s = lot ? inst.find_op(lot->product, op.index) : nullptr;
                if (s == nullptr) {
                    out.structural.push_back({IssueKind::UnknownOperation, name, pos, op_name(op)});
                    broken = true;
                    continue;
                }
                if (!members.insert(op.lot).second) {
                    out.structural.push_back({IssueKind::DuplicateOperation, name, pos, op_name(op)});
                    broken = true;
                }
                if (s->group != ms.machine.group) {
                    out.structural.push_back({IssueKind::WrongToolGroup, name, pos, op_name(op)});
                    broken = true;
                }
                if (spec == nullptr) {
                    spec = s;
                    first_lot = lot;
                } else if (lot->product != first_lot->product || op.index != batch->ops.front().index) {
                    out.structural.push_back({IssueKind::MixedBatch, name, pos, op_name(op)});
                    broken = true;
                }
            }
            if (broken || spec == nullptr) continue;

            if (static_cast<int>(batch->ops.size()) > spec->max_batch) {
                out.violations.push_back({IssueKind::BatchTooLarge, name, pos,
                                          std::to_string(batch->ops.size()) + " > " + std::to_string(spec->max_batch)});
            }
            if (!is_any(spec->setup) && states[j] != spec->setup) {
                out.violations.push_back({IssueKind::SetupNotInPlace, name, pos,
                                          "needs " + to_string(spec->setup) + ", has " + to_string(states[j])});
            }
            for (std::size_t c = 0; c < maints.size(); ++c) {
                window[c] += maints[c].trigger == Trigger::Lots ? static_cast<std::int64_t>(batch->ops.size())
                                                                : time_contribution(*spec, batch->ops.size());
                if (window[c] > maints[c].max && !overdue_reported[c]) {
                    out.violations.push_back({IssueKind::MaintenanceOverdue, name, pos,
                                              maints[c].label.text() + " at " + std::to_string(window[c]) + " > " +
                                                  std::to_string(maints[c].max)});
                    overdue_reported[c] = true;
                }
            }
        } else if (const auto *setup = std::get_if<SetupSlot>(&slot)) {
            if (inst.find_setup(ms.machine.group, setup->setup) == nullptr) {
                out.structural.push_back({IssueKind::UnknownSetup, name, pos, setup->setup.text()});
            }
        } else {
            const auto &label = std::get<MaintSlot>(slot).label;
            auto it = std::find_if(maints.begin(), maints.end(), [&](const auto &m) { return m.label == label; });
            if (it == maints.end()) {
                out.structural.push_back({IssueKind::UnknownMaintenance, name, pos, label.text()});
                continue;
            }
            auto c = static_cast<std::size_t>(it - maints.begin());
            if (window[c] < it->min) {
                out.violations.push_back({IssueKind::MaintenanceTooEarly, name, pos,
                                          label.text() + " at " + std::to_string(window[c]) + " < " +
                                              std::to_string(it->min)});
            }
            window[c] = 0;
            overdue_reported[c] = false;
        }
    }
    return out;
}

namespace {

/// Structural checks spanning machines: machine identity and coverage.
std::vector<Issue> global_structure(const GlobalSchedule &gs, const Instance &inst) {
    std::vector<Issue> out;
    std::set<Machine> seen;
    std::map<OpRef, int> count;
    for (const auto &ms : gs.machines) {
        if (!seen.insert(ms.machine).second) {
            out.push_back({IssueKind::DuplicateMachine, machine_name(ms.machine), 0, {}});
        }
        for (const auto &slot : ms.slots) {
            if (const auto *b = std::get_if<BatchSlot>(&slot)) {
                for (const auto &op : b->ops) ++count[op];
            }
        }
    }
    for (const auto &lot : inst.lots()) {
        auto it = inst.routes.find(lot.product);
        if (it == inst.routes.end()) continue;
        for (const auto &step : it->second.steps) {
            OpRef ref{lot.id, step.index};
            auto c = count.find(ref);
            if (c == count.end()) {
                out.push_back({IssueKind::MissingOperation, {}, 0, op_name(ref)});
            } else if (c->second > 1) {
                out.push_back({IssueKind::DuplicateOperation, {}, 0, op_name(ref)});
            }
        }
    }
    return out;
}

std::string slot_label(const GlobalSchedule &gs, SlotPos p) {
    const auto &ms = gs.machines[p.machine];
    std::string out = machine_name(ms.machine) + "#" + std::to_string(p.slot + 1);
    const Slot &slot = ms.slots[p.slot];
    if (const auto *b = std::get_if<BatchSlot>(&slot)) {
        out += "{";
        for (std::size_t k = 0; k < b->ops.size(); ++k) out += (k ? "," : "") + op_name(b->ops[k]);
        out += "}";
    }
    return out;
}

} // namespace

std::variant<TimedSchedule, CyclicDependency> compute_start_times(const GlobalSchedule &gs, const Instance &inst) {
    std::vector<Issue> problems = global_structure(gs, inst);
    for (const auto &ms : gs.machines) {
        auto check = check_machine(ms, inst);
        problems.insert(problems.end(), check.structural.begin(), check.structural.end());
    }
    if (!problems.empty()) throw ScheduleError(std::move(problems));

    // Flatten slots into graph nodes.
    std::vector<std::size_t> base(gs.machines.size() + 1, 0);
    for (std::size_t m = 0; m < gs.machines.size(); ++m) base[m + 1] = base[m] + gs.machines[m].slots.size();
    const std::size_t n = base.back();
    std::vector<SlotPos> pos_of(n);
    std::vector<Time> dur(n, 0);
    std::map<OpRef, std::size_t> node_of_op;
    for (std::size_t m = 0; m < gs.machines.size(); ++m) {
        const auto &ms = gs.machines[m];
        for (std::size_t j = 0; j < ms.slots.size(); ++j) {
            std::size_t v = base[m] + j;
            pos_of[v] = {m, j};
            dur[v] = slot_duration(ms.slots[j], ms.machine, inst);
            if (const auto *b = std::get_if<BatchSlot>(&ms.slots[j])) {
                for (const auto &op : b->ops) node_of_op[op] = v;
            }
        }
    }

    // Edge u -> v: v may start only once u has completed.
    std::vector<std::vector<std::size_t>> succ(n), pred(n);
    auto add_edge = [&](std::size_t u, std::size_t v) {
        succ[u].push_back(v);
        pred[v].push_back(u);
    };
    for (std::size_t m = 0; m < gs.machines.size(); ++m) {
        const auto &ms = gs.machines[m];
        for (std::size_t j = 1; j < ms.slots.size(); ++j) add_edge(base[m] + j - 1, base[m] + j);
        for (std::size_t j = 0; j < ms.slots.size(); ++j) {
            if (const auto *b = std::get_if<BatchSlot>(&ms.slots[j])) {
                for (const auto &op : b->ops) {
                    if (op.index > 1) add_edge(node_of_op.at({op.lot, op.index - 1}), base[m] + j);
                }
            }
        }
    }

    std::vector<std::size_t> indeg(n);
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v) {
        indeg[v] = pred[v].size();
        if (indeg[v] == 0) ready.push_back(v);
    }
    std::vector<Time> start(n, 0);
    std::size_t done = 0;
    while (!ready.empty()) {
        std::size_t u = ready.back();
        ready.pop_back();
        ++done;
        for (std::size_t v : succ[u]) {
            start[v] = std::max(start[v], start[u] + dur[u]);
            if (--indeg[v] == 0) ready.push_back(v);
        }
    }

    if (done < n) {
        // Every unfinished node has an unfinished predecessor; walking
        // backwards must revisit a node.
        std::size_t v = 0;
        while (indeg[v] == 0) ++v;
        std::vector<std::size_t> order_seen(n, 0);
        std::vector<std::size_t> walk;
        std::size_t step = 1;
        while (order_seen[v] == 0) {
            order_seen[v] = step++;
            walk.push_back(v);
            for (std::size_t u : pred[v]) {
                if (indeg[u] > 0) {
                    v = u;
                    break;
                }
            }
        }
        CyclicDependency cyc;
        auto first = std::find(walk.begin(), walk.end(), v);
        std::vector<std::size_t> loop(first, walk.end());
        std::reverse(loop.begin(), loop.end()); // forward direction
        std::ostringstream msg;
        for (std::size_t k = 0; k < loop.size(); ++k) {
            std::size_t a = loop[k];
            std::size_t b = loop[(k + 1) % loop.size()];
            cyc.cycle.emplace_back(pos_of[a], pos_of[b]);
            msg << (k ? " -> " : "") << slot_label(gs, pos_of[a]);
        }
        msg << " -> " << slot_label(gs, pos_of[loop.front()]);
        cyc.message = msg.str();
        return cyc;
    }

    TimedSchedule ts;
    ts.schedule = gs;
    ts.start.resize(gs.machines.size());
    ts.duration.resize(gs.machines.size());
    for (std::size_t m = 0; m < gs.machines.size(); ++m) {
        for (std::size_t j = 0; j < gs.machines[m].slots.size(); ++j) {
            ts.start[m].push_back(start[base[m] + j]);
            ts.duration[m].push_back(dur[base[m] + j]);
        }
    }
    return ts;
}

Time makespan(const TimedSchedule &ts) {
    Time out = 0;
    for (std::size_t m = 0; m < ts.start.size(); ++m) {
        if (!ts.start[m].empty()) out = std::max(out, ts.completion(m, ts.start[m].size() - 1));
    }
    return out;
}

std::int64_t count_setup_violations(const GlobalSchedule &gs, const Instance &inst) {
    std::int64_t out = 0;
    for (const auto &ms : gs.machines) {
        const SetupSpec *open = nullptr;
        std::int64_t production = 0;
        for (const auto &slot : ms.slots) {
            if (const auto *s = std::get_if<SetupSlot>(&slot)) {
                if (open != nullptr && production < open->min_ops) ++out;
                open = inst.find_setup(ms.machine.group, s->setup);
                production = 0;
            } else if (std::holds_alternative<BatchSlot>(slot)) {
                ++production; // a batch counts once, whatever its size
            }
        }
    }
    return out;
}

std::int64_t count_batch_violations(const GlobalSchedule &gs, const Instance &inst) {
    std::int64_t out = 0;
    for (const auto &ms : gs.machines) {
        for (const auto &slot : ms.slots) {
            const auto *b = std::get_if<BatchSlot>(&slot);
            if (b == nullptr || b->ops.empty()) continue;
            const OpSpec *spec = resolve(inst, b->ops.front());
            if (spec && static_cast<int>(b->ops.size()) < spec->min_batch) ++out;
        }
    }
    return out;
}

Evaluation evaluate(const GlobalSchedule &gs, const Instance &inst) {
    Evaluation out;
    out.issues = global_structure(gs, inst);
    for (const auto &ms : gs.machines) {
        auto check = check_machine(ms, inst);
        out.issues.insert(out.issues.end(), check.structural.begin(), check.structural.end());
        out.issues.insert(out.issues.end(), check.violations.begin(), check.violations.end());
    }
    const bool structural = std::any_of(out.issues.begin(), out.issues.end(),
                                        [](const Issue &i) { return is_structural(i.kind); });
    if (structural) return out;

    // Waiting cycles are reported alongside per-machine violations.
    auto timed = compute_start_times(gs, inst);
    if (auto *cyc = std::get_if<CyclicDependency>(&timed)) {
        out.issues.push_back({IssueKind::CyclicDependency, {}, 0, cyc->message});
    }
    if (!out.issues.empty()) return out;
    auto &ts = std::get<TimedSchedule>(timed);
    out.objectives = Objectives{makespan(ts), count_setup_violations(gs, inst), count_batch_violations(gs, inst)};
    out.timed = std::move(ts);
    return out;
}

} // namespace smsp
