#include "support.hpp"

#include "smsp/facts.hpp"

#include <algorithm>
#include <map>

namespace smsp::testing {

std::string data_path(const std::string &name) { return std::string(SMSP_DATA_DIR) + "/" + name; }

Instance two_lots() { return load_facts_file(data_path("two_lots.lp")); }

GlobalSchedule two_lots_reference_schedule() {
    const Term one = Term::number(1);
    const Term two = Term::number(2);
    auto batch = [](std::vector<OpRef> ops) { return Slot{BatchSlot{std::move(ops)}}; };
    GlobalSchedule gs;
    gs.machines.push_back({{"diffusion_fe_120"_sym, one}, {batch({{one, 1}, {two, 1}})}});
    gs.machines.push_back({{"lithotrack_fe_95"_sym, one},
                           {SetupSlot{"su450_3"_sym}, batch({{two, 2}}), batch({{one, 2}}),
                            MaintSlot{"lithotrack_fe_95_wk"_sym}, batch({{one, 4}}), batch({{two, 4}})}});
    gs.machines.push_back({{"implant_128"_sym, one},
                           {SetupSlot{"su128_1"_sym}, batch({{two, 3}}), batch({{one, 3}}), SetupSlot{"su128_2"_sym},
                            batch({{two, 5}}), MaintSlot{"implant_128_mn"_sym}, batch({{one, 5}})}});
    return gs;
}

Instance micro_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto draw = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto chance = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; };

    Instance inst;
    const int n_groups = draw(1, 3);
    std::vector<Term> groups;
    for (int g = 1; g <= n_groups; ++g) {
        Term gid = Term::symbol("g" + std::to_string(g));
        groups.push_back(gid);
        const int machines = draw(1, 2);
        for (int m = 1; m <= machines; ++m) inst.machines[gid].push_back({gid, Term::number(static_cast<std::uint64_t>(m))});
        const int setups = draw(0, 2);
        for (int s = 1; s <= setups; ++s) {
            Term sid = Term::symbol("s" + std::to_string(g) + "_" + std::to_string(s));
            inst.setups[{gid, sid}] = SetupSpec{gid, sid, draw(1, 6), draw(0, 3)};
        }
        const int maints = draw(0, 2);
        for (int k = 1; k <= maints; ++k) {
            MaintenanceSpec pm;
            pm.group = gid;
            pm.label = Term::symbol("m" + std::to_string(g) + "_" + std::to_string(k));
            pm.trigger = chance(0.5) ? Trigger::Lots : Trigger::Time;
            if (pm.trigger == Trigger::Lots) {
                pm.max = draw(1, 4);
                pm.min = draw(0, static_cast<int>(pm.max));
            } else {
                pm.max = draw(6, 24);
                pm.min = draw(0, static_cast<int>(pm.max) / 2);
            }
            pm.duration = draw(1, 8);
            inst.maints[gid].push_back(pm);
        }
    }

    const int n_products = draw(1, 2);
    for (int p = 1; p <= n_products; ++p) {
        Route route;
        route.product = Term::number(static_cast<std::uint64_t>(p));
        const int len = draw(1, 4);
        for (int i = 1; i <= len; ++i) {
            OpSpec op;
            op.product = route.product;
            op.index = i;
            op.group = groups[static_cast<std::size_t>(draw(0, n_groups - 1))];
            op.proc_time = draw(1, 9);
            if (chance(0.35)) {
                op.max_batch = draw(2, 3);
                op.min_batch = draw(1, op.max_batch);
            }
            std::vector<Term> local;
            for (const auto &[key, s] : inst.setups) {
                if (key.first == op.group) local.push_back(s.id);
            }
            if (!local.empty() && chance(0.7)) {
                op.setup = local[static_cast<std::size_t>(draw(0, static_cast<int>(local.size()) - 1))];
            } else {
                op.setup = AnySetup{};
            }
            route.steps.push_back(op);
        }
        inst.routes[route.product] = route;
    }

    const int n_lots = draw(1, 3);
    for (int l = 1; l <= n_lots; ++l) {
        inst.add_lot({Term::number(static_cast<std::uint64_t>(l)),
                      Term::number(static_cast<std::uint64_t>(draw(1, n_products)))});
    }
    return inst;
}

namespace {

Time duration_of(const Slot &slot, const Machine &m, const Instance &inst) {
    if (const auto *b = std::get_if<BatchSlot>(&slot)) {
        const auto *lot = inst.find_lot(b->ops.front().lot);
        return inst.find_op(lot->product, b->ops.front().index)->proc_time;
    }
    if (const auto *s = std::get_if<SetupSlot>(&slot)) return inst.find_setup(m.group, s->setup)->change_time;
    return inst.find_maint(m.group, std::get<MaintSlot>(slot).label)->duration;
}

struct Graph {
    std::vector<Time> dur;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::size_t> base;
};

Graph build_graph(const GlobalSchedule &gs, const Instance &inst) {
    Graph g;
    std::map<OpRef, std::size_t> where;
    for (const auto &ms : gs.machines) {
        g.base.push_back(g.dur.size());
        for (const auto &slot : ms.slots) {
            if (const auto *b = std::get_if<BatchSlot>(&slot)) {
                for (const auto &op : b->ops) where[op] = g.dur.size();
            }
            g.dur.push_back(duration_of(slot, ms.machine, inst));
        }
    }
    for (std::size_t m = 0; m < gs.machines.size(); ++m) {
        const auto &slots = gs.machines[m].slots;
        for (std::size_t j = 0; j < slots.size(); ++j) {
            const std::size_t v = g.base[m] + j;
            if (j > 0) g.edges.emplace_back(v - 1, v);
            if (const auto *b = std::get_if<BatchSlot>(&slots[j])) {
                for (const auto &op : b->ops) {
                    if (op.index > 1) g.edges.emplace_back(where.at({op.lot, op.index - 1}), v);
                }
            }
        }
    }
    return g;
}

bool has_cycle(const Graph &g) {
    const std::size_t n = g.dur.size();
    std::vector<std::vector<std::size_t>> succ(n);
    for (auto [u, v] : g.edges) succ[u].push_back(v);
    std::vector<int> color(n, 0);
    auto visit = [&](auto &&self, std::size_t u) -> bool {
        color[u] = 1;
        for (auto v : succ[u]) {
            if (color[v] == 1) return true;
            if (color[v] == 0 && self(self, v)) return true;
        }
        color[u] = 2;
        return false;
    };
    for (std::size_t u = 0; u < n; ++u) {
        if (color[u] == 0 && visit(visit, u)) return true;
    }
    return false;
}

} // namespace

std::optional<std::vector<std::vector<Time>>> longest_path_starts(const GlobalSchedule &gs, const Instance &inst) {
    const Graph g = build_graph(gs, inst);
    if (has_cycle(g)) return std::nullopt;
    const std::size_t n = g.dur.size();
    std::vector<Time> dist(n, 0);
    bool changed = true;
    for (std::size_t round = 0; changed; ++round) {
        if (round > n) return std::nullopt;
        changed = false;
        for (auto [u, v] : g.edges) {
            if (dist[u] + g.dur[u] > dist[v]) {
                dist[v] = dist[u] + g.dur[u];
                changed = true;
            }
        }
    }
    std::vector<std::vector<Time>> out(gs.machines.size());
    for (std::size_t m = 0; m < gs.machines.size(); ++m) {
        for (std::size_t j = 0; j < gs.machines[m].slots.size(); ++j) out[m].push_back(dist[g.base[m] + j]);
    }
    return out;
}

Verdict reference_verdict(const GlobalSchedule &gs, const Instance &inst) {
    Verdict v;
    std::map<OpRef, int> seen;
    std::int64_t setup_viol = 0;
    std::int64_t batch_viol = 0;
    for (const auto &ms : gs.machines) {
        std::optional<Term> in_place;
        std::map<Term, std::int64_t> load;
        std::optional<Term> open;
        int since = 0;
        for (const auto &slot : ms.slots) {
            if (const auto *s = std::get_if<SetupSlot>(&slot)) {
                if (open && since < inst.find_setup(ms.machine.group, *open)->min_ops) ++setup_viol;
                open = s->setup;
                in_place = s->setup;
                since = 0;
            } else if (const auto *mt = std::get_if<MaintSlot>(&slot)) {
                const auto *spec = inst.find_maint(ms.machine.group, mt->label);
                if (load[mt->label] < spec->min) v.kinds.insert(IssueKind::MaintenanceTooEarly);
                load[mt->label] = 0;
            } else {
                const auto &b = std::get<BatchSlot>(slot);
                ++since;
                for (const auto &op : b.ops) ++seen[op];
                const auto *lot = inst.find_lot(b.ops.front().lot);
                const auto *op = inst.find_op(lot->product, b.ops.front().index);
                const auto k = static_cast<std::int64_t>(b.ops.size());
                if (k > op->max_batch) v.kinds.insert(IssueKind::BatchTooLarge);
                if (k < op->min_batch) ++batch_viol;
                if (!is_any(op->setup) && (!in_place || *in_place != std::get<Term>(op->setup))) {
                    v.kinds.insert(IssueKind::SetupNotInPlace);
                }
                for (const auto &pm : inst.group_maints(ms.machine.group)) {
                    // k lots of time T count k * floor(T / k)
                    load[pm.label] += pm.trigger == Trigger::Lots ? k : k * (op->proc_time / k);
                    if (load[pm.label] > pm.max) v.kinds.insert(IssueKind::MaintenanceOverdue);
                }
            }
        }
    }
    for (const auto &lot : inst.lots()) {
        for (const auto &step : inst.routes.at(lot.product).steps) {
            auto it = seen.find({lot.id, step.index});
            if (it == seen.end()) v.kinds.insert(IssueKind::MissingOperation);
            else if (it->second > 1) v.kinds.insert(IssueKind::DuplicateOperation);
        }
    }
    if (v.kinds.count(IssueKind::MissingOperation) || v.kinds.count(IssueKind::DuplicateOperation)) return v;

    auto starts = longest_path_starts(gs, inst);
    if (!starts) {
        v.kinds.insert(IssueKind::CyclicDependency);
        return v;
    }
    if (!v.kinds.empty()) return v;
    Time span = 0;
    for (std::size_t m = 0; m < gs.machines.size(); ++m) {
        const auto &ms = gs.machines[m];
        for (std::size_t j = 0; j < ms.slots.size(); ++j) {
            span = std::max(span, (*starts)[m][j] + duration_of(ms.slots[j], ms.machine, inst));
        }
    }
    v.objectives = Objectives{span, setup_viol, batch_viol};
    return v;
}

const char *mutation_name(Mutation m) {
    switch (m) {
    case Mutation::DropMaintenance: return "drop maintenance";
    case Mutation::SwapAdjacent: return "swap adjacent slots";
    case Mutation::ShrinkBatch: return "shrink batch";
    case Mutation::DropSetupChange: return "drop setup change";
    }
    return "?";
}

bool mutate(GlobalSchedule &gs, Mutation kind, std::mt19937_64 &rng) {
    std::vector<std::pair<std::size_t, std::size_t>> places;
    for (std::size_t m = 0; m < gs.machines.size(); ++m) {
        const auto &slots = gs.machines[m].slots;
        for (std::size_t j = 0; j < slots.size(); ++j) {
            bool fits = false;
            switch (kind) {
            case Mutation::DropMaintenance: fits = std::holds_alternative<MaintSlot>(slots[j]); break;
            case Mutation::SwapAdjacent: fits = j + 1 < slots.size(); break;
            case Mutation::ShrinkBatch: {
                const auto *b = std::get_if<BatchSlot>(&slots[j]);
                fits = b != nullptr && b->ops.size() > 1;
                break;
            }
            case Mutation::DropSetupChange: fits = std::holds_alternative<SetupSlot>(slots[j]); break;
            }
            if (fits) places.emplace_back(m, j);
        }
    }
    if (places.empty()) return false;
    auto [m, j] = places[std::uniform_int_distribution<std::size_t>(0, places.size() - 1)(rng)];
    auto &slots = gs.machines[m].slots;
    const auto at = slots.begin() + static_cast<std::ptrdiff_t>(j);
    switch (kind) {
    case Mutation::DropMaintenance:
    case Mutation::DropSetupChange: slots.erase(at); break;
    case Mutation::SwapAdjacent: std::swap(slots[j], slots[j + 1]); break;
    case Mutation::ShrinkBatch: {
        auto &ops = std::get<BatchSlot>(slots[j]).ops;
        const auto k = std::uniform_int_distribution<std::size_t>(0, ops.size() - 1)(rng);
        OpRef moved = ops[k];
        ops.erase(ops.begin() + static_cast<std::ptrdiff_t>(k));
        slots.insert(slots.begin() + static_cast<std::ptrdiff_t>(j) + 1, Slot{BatchSlot{{moved}}});
        break;
    }
    }
    return true;
}

std::set<IssueKind> kinds_for(Mutation m) {
    switch (m) {
    case Mutation::DropMaintenance: return {IssueKind::MaintenanceOverdue};
    case Mutation::SwapAdjacent:
        return {IssueKind::SetupNotInPlace, IssueKind::MaintenanceOverdue, IssueKind::MaintenanceTooEarly,
                IssueKind::CyclicDependency};
    case Mutation::ShrinkBatch: return {IssueKind::MaintenanceOverdue};
    case Mutation::DropSetupChange: return {IssueKind::SetupNotInPlace};
    }
    return {};
}

} // namespace smsp::testing
