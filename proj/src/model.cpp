#include "smsp/model.hpp"

#include <algorithm>
#include <bit>
#include <map>

namespace smsp {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

} // namespace

DecisionModel::DecisionModel(const Instance &inst, const PreallocationMap &prealloc) : inst_(&inst) {
    std::map<ToolGroupId, int> group_of;
    for (const auto &gid : inst.tool_groups()) {
        Group g;
        g.id = gid;
        for (const auto &m : inst.group_maints(gid)) {
            g.maints.push_back({m.label, m.trigger, m.min, m.max, m.duration});
        }
        if (g.maints.size() > kMaxMaintPerGroup) {
            throw ModelError("tool group " + gid.text() + " has more than " + std::to_string(kMaxMaintPerGroup) +
                             " maintenance kinds");
        }
        std::sort(g.maints.begin(), g.maints.end(), [](const Maint &a, const Maint &b) {
            if (a.duration != b.duration) return a.duration > b.duration;
            return a.label < b.label;
        });
        for (const auto &[key, s] : inst.setups) {
            if (key.first == gid) g.setups.push_back({s.id, s.change_time, s.min_ops});
        }
        group_of[gid] = static_cast<int>(groups_.size());
        groups_.push_back(std::move(g));
    }
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
        auto &g = groups_[gi];
        for (const auto &m : inst.group_machines(g.id)) {
            g.machines.push_back(static_cast<int>(machines_.size()));
            machines_.push_back({m, static_cast<int>(gi), static_cast<int>(counter_count_)});
            counter_count_ += g.maints.size();
        }
    }

    std::map<ProductId, int> product_of;
    std::vector<std::vector<int>> lots_of_product;
    for (const auto &lot : inst.lots()) {
        auto [it, fresh] = product_of.emplace(lot.product, static_cast<int>(lots_of_product.size()));
        if (fresh) lots_of_product.emplace_back();
        lots_of_product[idx(it->second)].push_back(static_cast<int>(lots_.size()));
        lots_.push_back({lot.id, it->second, 0, 0});
    }

    // Families are created per (product, step) for products that have lots.
    std::map<std::pair<int, int>, int> family_of;
    for (const auto &[product, p] : product_of) {
        const auto &members = lots_of_product[idx(p)];
        if (members.size() > kMaxLotsPerProduct) {
            throw ModelError("product " + product.text() + " has more than " + std::to_string(kMaxLotsPerProduct) +
                             " lots");
        }
        auto rit = inst.routes.find(product);
        if (rit == inst.routes.end()) throw ModelError("product " + product.text() + " has no route");
        for (const auto &step : rit->second.steps) {
            auto git = group_of.find(step.group);
            if (git == group_of.end() || groups_[idx(git->second)].machines.empty()) {
                throw ModelError("tool group " + step.group.text() + " has no machine");
            }
            Family f;
            f.product = product;
            f.index = step.index;
            f.group = git->second;
            f.proc = step.proc_time;
            f.min_batch = step.min_batch;
            f.max_batch = std::max(1, step.max_batch);
            f.setup = -1;
            if (!is_any(step.setup)) {
                const auto &setups = groups_[idx(f.group)].setups;
                auto sit = std::find_if(setups.begin(), setups.end(),
                                        [&](const Setup &s) { return s.id == std::get<Term>(step.setup); });
                if (sit == setups.end()) {
                    throw ModelError("setup " + to_string(step.setup) + " not declared for " + step.group.text());
                }
                f.setup = static_cast<int>(sit - setups.begin());
            }
            f.lots = members;
            family_of[{p, step.index}] = static_cast<int>(families_.size());
            groups_[idx(f.group)].families.push_back(static_cast<int>(families_.size()));
            families_.push_back(std::move(f));
        }
    }

    for (std::size_t l = 0; l < lots_.size(); ++l) {
        auto &info = lots_[l];
        const auto &route = inst.routes.at(inst.lots()[l].product);
        info.first_op = static_cast<int>(ops_.size());
        info.length = static_cast<int>(route.steps.size());
        std::vector<Time> tail(route.steps.size() + 1, 0);
        for (std::size_t k = route.steps.size(); k-- > 0;) tail[k] = tail[k + 1] + route.steps[k].proc_time;
        tails_.push_back(std::move(tail));
        for (const auto &step : route.steps) {
            Op op;
            op.lot = static_cast<int>(l);
            op.index = step.index;
            op.family = family_of.at({info.product, step.index});
            const auto &flots = families_[idx(op.family)].lots;
            op.slot_in_family = static_cast<int>(std::find(flots.begin(), flots.end(), static_cast<int>(l)) - flots.begin());
            auto pit = prealloc.find(OpRef{info.id, step.index});
            if (pit == prealloc.end()) {
                throw ModelError("no preallocation for operation " + info.id.text() + "[" + std::to_string(step.index) + "]");
            }
            const auto &group = groups_[idx(families_[idx(op.family)].group)];
            for (int m : group.machines) {
                if (std::find(pit->second.begin(), pit->second.end(), machines_[idx(m)].machine.id) != pit->second.end()) {
                    op.allowed.push_back(m);
                }
            }
            ops_.push_back(std::move(op));
        }
    }
}

int DecisionModel::lot_index(const LotId &id) const {
    for (std::size_t l = 0; l < lots_.size(); ++l) {
        if (lots_[l].id == id) return static_cast<int>(l);
    }
    return -1;
}

int DecisionModel::machine_index(const Machine &m) const {
    for (std::size_t k = 0; k < machines_.size(); ++k) {
        if (machines_[k].machine == m) return static_cast<int>(k);
    }
    return -1;
}

std::vector<std::vector<std::vector<LotId>>> DecisionModel::batch_partitions(const ProductId &product, int index) const {
    std::vector<std::vector<std::vector<LotId>>> out;
    auto fit = std::find_if(families_.begin(), families_.end(),
                            [&](const Family &f) { return f.product == product && f.index == index; });
    if (fit == families_.end()) return out;
    const auto &lots = fit->lots;
    const std::size_t n = lots.size();
    const auto cap = static_cast<std::size_t>(fit->max_batch);

    // Restricted growth strings: block[k] <= 1 + max(block[0..k-1]).
    std::vector<std::size_t> block(n, 0);
    std::vector<std::size_t> size(n + 1, 0);
    auto emit = [&] {
        std::size_t blocks = 0;
        for (auto b : block) blocks = std::max(blocks, b + 1);
        std::vector<std::vector<LotId>> part(blocks);
        for (std::size_t k = 0; k < n; ++k) part[block[k]].push_back(lots_[idx(lots[k])].id);
        out.push_back(std::move(part));
    };
    auto rec = [&](auto &&self, std::size_t k, std::size_t used) -> void {
        if (k == n) {
            emit();
            return;
        }
        for (std::size_t b = 0; b <= used && b < n; ++b) {
            if (size[b] >= cap) continue;
            block[k] = b;
            ++size[b];
            self(self, k + 1, std::max(used, b + 1));
            --size[b];
        }
    };
    if (n > 0) rec(rec, 0, 0);
    return out;
}

std::vector<MachineId> DecisionModel::machine_choices(const std::vector<OpRef> &batch) const {
    std::vector<MachineId> out;
    if (batch.empty()) return out;
    std::vector<int> common;
    bool first = true;
    for (const auto &ref : batch) {
        int l = lot_index(ref.lot);
        if (l < 0 || ref.index < 1 || ref.index > lots_[idx(l)].length) return {};
        const auto &allowed = ops_[idx(op_id(l, ref.index))].allowed;
        if (first) {
            common = allowed;
            first = false;
        } else {
            std::vector<int> both;
            std::set_intersection(common.begin(), common.end(), allowed.begin(), allowed.end(), std::back_inserter(both));
            common = std::move(both);
        }
    }
    for (int m : common) out.push_back(machines_[idx(m)].machine.id);
    return out;
}

std::vector<Slot> DecisionModel::gap_slots(const Machine &machine, const SetupRef &in_place, const OpRef &op,
                                           const std::vector<MaintLabel> &maints) const {
    std::vector<Slot> out;
    int m = machine_index(machine);
    int l = lot_index(op.lot);
    if (m < 0 || l < 0) return out;
    const auto &group = groups_[idx(machines_[idx(m)].group)];
    for (const auto &spec : group.maints) {
        if (std::find(maints.begin(), maints.end(), spec.label) != maints.end()) out.push_back(MaintSlot{spec.label});
    }
    const auto &family = families_[idx(ops_[idx(op_id(l, op.index))].family)];
    if (family.setup >= 0) {
        const auto &need = group.setups[idx(family.setup)].id;
        if (is_any(in_place) || std::get<Term>(in_place) != need) out.push_back(SetupSlot{need});
    }
    return out;
}

Time DecisionModel::gap_delay(const Machine &machine, const SetupRef &in_place, const OpRef &op,
                              const std::vector<MaintLabel> &maints) const {
    Time total = 0;
    for (const auto &slot : gap_slots(machine, in_place, op, maints)) {
        if (const auto *s = std::get_if<SetupSlot>(&slot)) {
            total += inst_->find_setup(machine.group, s->setup)->change_time;
        } else {
            total += inst_->find_maint(machine.group, std::get<MaintSlot>(slot).label)->duration;
        }
    }
    return total;
}

// ---------------------------------------------------------------------------

PartialState::PartialState(const DecisionModel &model)
    : model_(&model), next_(model.lots().size(), 0), completion_(model.ops().size(), 0),
      frame_of_op_(model.ops().size(), -1), family_left_(model.families().size(), 0),
      machine_state_(model.machines().size()), counters_(model.counter_count(), 0) {
    for (std::size_t f = 0; f < model.families().size(); ++f) {
        family_left_[f] = static_cast<int>(model.families()[f].lots.size());
    }
}

std::uint64_t PartialState::ready_members(int family) const {
    const auto &f = model_->families()[idx(family)];
    std::uint64_t out = 0;
    for (std::size_t k = 0; k < f.lots.size(); ++k) {
        if (next_[idx(f.lots[k])] == f.index - 1) out |= std::uint64_t{1} << k;
    }
    return out;
}

bool PartialState::probe(const Move &move, MoveEffect &effect) const {
    const auto &families = model_->families();
    if (move.family < 0 || idx(move.family) >= families.size()) return false;
    const auto &f = families[idx(move.family)];
    if (move.members == 0 || (move.members & ~ready_members(move.family)) != 0) return false;
    const int k = std::popcount(move.members);
    if (k > f.max_batch) return false;
    if (move.machine < 0 || idx(move.machine) >= model_->machines().size()) return false;
    const auto &minfo = model_->machines()[idx(move.machine)];
    if (minfo.group != f.group) return false;
    const auto &group = model_->groups()[idx(f.group)];
    if (group.maints.size() < 32 && (move.maint_mask >> group.maints.size()) != 0) return false;

    Time ready = 0;
    for (std::uint64_t bits = move.members; bits != 0; bits &= bits - 1) {
        int lot = f.lots[idx(std::countr_zero(bits))];
        const auto &op = model_->ops()[idx(model_->op_id(lot, f.index))];
        if (!std::binary_search(op.allowed.begin(), op.allowed.end(), move.machine)) return false;
        if (f.index > 1) ready = std::max(ready, completion_[idx(model_->op_id(lot, f.index - 1))]);
    }

    Time gap = 0;
    for (std::size_t c = 0; c < group.maints.size(); ++c) {
        const auto &spec = group.maints[c];
        std::int64_t count = counters_[idx(minfo.counter_base) + c];
        if ((move.maint_mask >> c) & 1U) {
            if (count < spec.min) return false;
            count = 0;
            gap += spec.duration;
        }
        count += spec.trigger == Trigger::Lots ? k : static_cast<std::int64_t>(k) * (f.proc / k);
        if (count > spec.max) return false;
    }

    const auto &ms = machine_state_[idx(move.machine)];
    effect.setup_change = f.setup >= 0 && ms.setup != f.setup;
    effect.setup_violation = 0;
    if (effect.setup_change) {
        gap += group.setups[idx(f.setup)].change_time;
        if (ms.setup >= 0 && ms.batches_since < group.setups[idx(ms.setup)].min_ops) effect.setup_violation = 1;
    }
    effect.gap = gap;
    effect.start = std::max(ms.avail + gap, ready);
    effect.completion = effect.start + f.proc;
    effect.batch_violation = k < f.min_batch ? 1 : 0;
    return true;
}

void PartialState::push(const Move &move, const MoveEffect &effect) {
    const auto &f = model_->families()[idx(move.family)];
    const auto &minfo = model_->machines()[idx(move.machine)];
    const auto &group = model_->groups()[idx(f.group)];
    const int k = std::popcount(move.members);

    Frame frame;
    frame.move = move;
    frame.effect = effect;
    frame.machine_before = machine_state_[idx(move.machine)];
    frame.makespan_before = makespan_;
    for (std::size_t c = 0; c < group.maints.size(); ++c) {
        auto &count = counters_[idx(minfo.counter_base) + c];
        frame.counters_before[c] = count;
        if ((move.maint_mask >> c) & 1U) count = 0;
        count += group.maints[c].trigger == Trigger::Lots ? k : static_cast<std::int64_t>(k) * (f.proc / k);
    }

    auto &ms = machine_state_[idx(move.machine)];
    ms.avail = effect.completion;
    if (effect.setup_change) {
        ms.setup = f.setup;
        ms.batches_since = 0;
    }
    ++ms.batches_since;

    const int frame_id = static_cast<int>(path_.size());
    for (std::uint64_t bits = move.members; bits != 0; bits &= bits - 1) {
        int lot = f.lots[idx(std::countr_zero(bits))];
        int op = model_->op_id(lot, f.index);
        completion_[idx(op)] = effect.completion;
        frame_of_op_[idx(op)] = frame_id;
        ++next_[idx(lot)];
    }
    family_left_[idx(move.family)] -= k;
    scheduled_ += static_cast<std::size_t>(k);
    makespan_ = std::max(makespan_, effect.completion);
    setup_violations_ += effect.setup_violation;
    batch_violations_ += effect.batch_violation;
    path_.push_back(frame);
}

void PartialState::pop() {
    const Frame &frame = path_.back();
    const auto &move = frame.move;
    const auto &f = model_->families()[idx(move.family)];
    const auto &minfo = model_->machines()[idx(move.machine)];
    const auto &group = model_->groups()[idx(f.group)];
    const int k = std::popcount(move.members);

    for (std::size_t c = 0; c < group.maints.size(); ++c) counters_[idx(minfo.counter_base) + c] = frame.counters_before[c];
    machine_state_[idx(move.machine)] = frame.machine_before;
    for (std::uint64_t bits = move.members; bits != 0; bits &= bits - 1) {
        int lot = f.lots[idx(std::countr_zero(bits))];
        int op = model_->op_id(lot, f.index);
        completion_[idx(op)] = 0;
        frame_of_op_[idx(op)] = -1;
        --next_[idx(lot)];
    }
    family_left_[idx(move.family)] += k;
    scheduled_ -= static_cast<std::size_t>(k);
    makespan_ = frame.makespan_before;
    setup_violations_ -= frame.effect.setup_violation;
    batch_violations_ -= frame.effect.batch_violation;
    path_.pop_back();
}

bool PartialState::depends_on_last(const Move &move) const {
    if (path_.empty()) return false;
    if (path_.back().move.machine == move.machine) return true;
    const auto &f = model_->families()[idx(move.family)];
    if (f.index == 1) return false;
    const int last = static_cast<int>(path_.size()) - 1;
    for (std::uint64_t bits = move.members; bits != 0; bits &= bits - 1) {
        int lot = f.lots[idx(std::countr_zero(bits))];
        if (frame_of_op_[idx(model_->op_id(lot, f.index - 1))] == last) return true;
    }
    return false;
}

Time PartialState::lower_bound() const {
    Time bound = makespan_;
    const auto &families = model_->families();
    const auto &groups = model_->groups();

    for (std::size_t l = 0; l < next_.size(); ++l) {
        const auto &lot = model_->lots()[l];
        if (next_[l] >= lot.length) continue;
        const int op_id = lot.first_op + next_[l];
        const auto &op = model_->ops()[idx(op_id)];
        const auto &f = families[idx(op.family)];
        Time ready = next_[l] > 0 ? completion_[idx(op_id - 1)] : 0;
        Time machine_ready = -1;
        for (int m : op.allowed) {
            const auto &ms = machine_state_[idx(m)];
            Time t = ms.avail;
            if (f.setup >= 0 && ms.setup != f.setup) t += groups[idx(f.group)].setups[idx(f.setup)].change_time;
            machine_ready = machine_ready < 0 ? t : std::min(machine_ready, t);
        }
        if (machine_ready < 0) continue; // no machine at all; nothing completes it
        bound = std::max(bound, std::max(ready, machine_ready) + model_->remaining_work(static_cast<int>(l), next_[l]));
    }

    for (const auto &g : groups) {
        Time work = 0;
        for (int fi : g.families) {
            const auto &f = families[idx(fi)];
            const int left = family_left_[idx(fi)];
            if (left > 0) work += static_cast<Time>((left + f.max_batch - 1) / f.max_batch) * f.proc;
        }
        if (work == 0 || g.machines.empty()) continue;
        Time total = work;
        for (int m : g.machines) total += machine_state_[idx(m)].avail;
        const auto count = static_cast<Time>(g.machines.size());
        bound = std::max(bound, (total + count - 1) / count);
    }
    return bound;
}

bool PartialState::append(const std::vector<OpRef> &batch, const MachineId &machine,
                          const std::vector<MaintLabel> &maints) {
    if (batch.empty()) return false;
    Move move;
    for (const auto &ref : batch) {
        int l = model_->lot_index(ref.lot);
        if (l < 0 || ref.index < 1 || ref.index > model_->lots()[idx(l)].length) return false;
        const auto &op = model_->ops()[idx(model_->op_id(l, ref.index))];
        if (move.family >= 0 && move.family != op.family) return false;
        move.family = op.family;
        std::uint64_t bit = std::uint64_t{1} << op.slot_in_family;
        if (move.members & bit) return false;
        move.members |= bit;
    }
    const auto &f = model_->families()[idx(move.family)];
    const auto &group = model_->groups()[idx(f.group)];
    for (int m : group.machines) {
        if (model_->machines()[idx(m)].machine.id == machine) move.machine = m;
    }
    if (move.machine < 0) return false;
    for (const auto &label : maints) {
        auto it = std::find_if(group.maints.begin(), group.maints.end(),
                               [&](const DecisionModel::Maint &s) { return s.label == label; });
        if (it == group.maints.end()) return false;
        std::uint32_t bit = 1U << static_cast<unsigned>(it - group.maints.begin());
        if (move.maint_mask & bit) return false;
        move.maint_mask |= bit;
    }
    MoveEffect effect;
    if (!probe(move, effect)) return false;
    push(move, effect);
    return true;
}

GlobalSchedule PartialState::schedule() const {
    GlobalSchedule gs;
    for (const auto &m : model_->machines()) gs.machines.push_back({m.machine, {}});
    for (const auto &frame : path_) {
        const auto &move = frame.move;
        const auto &f = model_->families()[idx(move.family)];
        const auto &group = model_->groups()[idx(f.group)];
        auto &slots = gs.machines[idx(move.machine)].slots;
        for (std::size_t c = 0; c < group.maints.size(); ++c) {
            if ((move.maint_mask >> c) & 1U) slots.emplace_back(MaintSlot{group.maints[c].label});
        }
        if (frame.effect.setup_change) slots.emplace_back(SetupSlot{group.setups[idx(f.setup)].id});
        BatchSlot batch;
        for (std::uint64_t bits = move.members; bits != 0; bits &= bits - 1) {
            batch.ops.push_back({model_->lots()[idx(f.lots[idx(std::countr_zero(bits))])].id, f.index});
        }
        slots.emplace_back(std::move(batch));
    }
    return gs;
}

} // namespace smsp
