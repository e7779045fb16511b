#include "smsp/instance.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>

namespace smsp {

void Instance::add_lot(Lot lot) {
    bool numeric = order_.numeric && lot.id.is_number();
    if (numeric != order_.numeric) {
        order_.numeric = numeric;
        std::stable_sort(lots_.begin(), lots_.end(),
                         [&](const Lot &a, const Lot &b) { return order_(a.id, b.id); });
    }
    auto pos = std::upper_bound(lots_.begin(), lots_.end(), lot,
                                [&](const Lot &a, const Lot &b) { return order_(a.id, b.id); });
    lots_.insert(pos, std::move(lot));
}

const Lot *Instance::find_lot(const LotId &id) const {
    for (const auto &l : lots_) {
        if (l.id == id) return &l;
    }
    return nullptr;
}

const OpSpec *Instance::find_op(const ProductId &product, int index) const {
    auto it = routes.find(product);
    if (it == routes.end() || index < 1) return nullptr;
    const auto &steps = it->second.steps;
    if (static_cast<std::size_t>(index) <= steps.size() && steps[index - 1].index == index) {
        return &steps[index - 1];
    }
    for (const auto &op : steps) {
        if (op.index == index) return &op;
    }
    return nullptr;
}

const SetupSpec *Instance::find_setup(const ToolGroupId &group, const SetupId &id) const {
    auto it = setups.find({group, id});
    return it == setups.end() ? nullptr : &it->second;
}

const MaintenanceSpec *Instance::find_maint(const ToolGroupId &group, const MaintLabel &label) const {
    for (const auto &m : group_maints(group)) {
        if (m.label == label) return &m;
    }
    return nullptr;
}

const std::vector<Machine> &Instance::group_machines(const ToolGroupId &group) const {
    static const std::vector<Machine> none;
    auto it = machines.find(group);
    return it == machines.end() ? none : it->second;
}

const std::vector<MaintenanceSpec> &Instance::group_maints(const ToolGroupId &group) const {
    static const std::vector<MaintenanceSpec> none;
    auto it = maints.find(group);
    return it == maints.end() ? none : it->second;
}

std::vector<ToolGroupId> Instance::tool_groups() const {
    std::set<ToolGroupId> out;
    for (const auto &[g, _] : machines) out.insert(g);
    for (const auto &[g, _] : maints) out.insert(g);
    for (const auto &[key, _] : setups) out.insert(key.first);
    for (const auto &[_, r] : routes) {
        for (const auto &op : r.steps) out.insert(op.group);
    }
    return {out.begin(), out.end()};
}

std::size_t Instance::operation_count() const {
    std::size_t n = 0;
    for (const auto &l : lots_) {
        auto it = routes.find(l.product);
        if (it != routes.end()) n += it->second.steps.size();
    }
    return n;
}

std::ostream &operator<<(std::ostream &os, const Diagnostic &d) {
    return os << d.invariant << ": " << d.entity;
}

namespace {

std::string render_op(const OpSpec &op) {
    std::ostringstream os;
    os << "route(" << op.product << ',' << op.index << ',' << op.group << ',' << op.proc_time << ','
       << op.min_batch << ',' << op.max_batch << ',' << to_string(op.setup) << ')';
    return os.str();
}

std::string render_maint(const MaintenanceSpec &m) {
    std::ostringstream os;
    os << "pm(" << m.group << ',' << m.label << ',' << (m.trigger == Trigger::Lots ? "lots" : "time") << ','
       << m.min << ',' << m.max << ',' << m.duration << ')';
    return os.str();
}

} // namespace

std::vector<Diagnostic> validate_instance(const Instance &inst) {
    std::vector<Diagnostic> out;
    auto report = [&](std::string what, std::string entity) {
        out.push_back({std::move(what), std::move(entity)});
    };

    for (const auto &[product, route] : inst.routes) {
        if (route.steps.empty()) {
            report("route is empty", "product " + product.text());
        }
        for (std::size_t k = 0; k < route.steps.size(); ++k) {
            const OpSpec &op = route.steps[k];
            if (op.index != static_cast<int>(k) + 1) {
                report("route indexes not contiguous from 1", render_op(op));
            }
            if (op.product != product) {
                report("operation filed under wrong product", render_op(op));
            }
            if (op.proc_time < 0) report("negative processing time", render_op(op));
            if (op.min_batch < 1) report("min_batch not positive", render_op(op));
            if (op.max_batch < 1) report("max_batch not positive", render_op(op));
            if (op.min_batch > op.max_batch) report("min_batch exceeds max_batch", render_op(op));
            if (inst.group_machines(op.group).empty()) {
                report("tool group has no machine", render_op(op));
            }
            if (!is_any(op.setup) && inst.find_setup(op.group, std::get<Term>(op.setup)) == nullptr) {
                report("setup not declared for tool group", render_op(op));
            }
        }
    }

    for (const auto &[key, s] : inst.setups) {
        std::string entity = "setup(" + s.group.text() + ',' + s.id.text() + ',' + std::to_string(s.change_time) +
                             ',' + std::to_string(s.min_ops) + ')';
        if (s.id.is_number() && s.id.value() == 0) report("setup 0 is reserved", entity);
        if (s.change_time < 0) report("negative setup time", entity);
        if (s.min_ops < 0) report("negative setup minimum", entity);
        if (key.first != s.group || key.second != s.id) report("setup filed under wrong key", entity);
    }

    for (const auto &[group, list] : inst.maints) {
        std::set<MaintLabel> seen;
        for (const auto &m : list) {
            if (m.group != group) report("maintenance filed under wrong group", render_maint(m));
            if (!seen.insert(m.label).second) report("duplicate maintenance label", render_maint(m));
            if (m.min < 0) report("negative maintenance minimum", render_maint(m));
            if (m.max < 1) report("maintenance maximum not positive", render_maint(m));
            if (m.min > m.max) report("maintenance min exceeds max", render_maint(m));
            if (m.duration < 0) report("negative maintenance duration", render_maint(m));
        }
    }

    for (const auto &[group, list] : inst.machines) {
        std::set<MachineId> seen;
        for (const auto &m : list) {
            std::string entity = "tool(" + m.group.text() + ',' + m.id.text() + ')';
            if (m.group != group) report("machine filed under wrong group", entity);
            if (!seen.insert(m.id).second) report("duplicate machine", entity);
        }
    }

    std::set<LotId> lot_ids;
    for (const auto &l : inst.lots()) {
        std::string entity = "lot(" + l.id.text() + ',' + l.product.text() + ')';
        if (!lot_ids.insert(l.id).second) report("duplicate lot", entity);
        if (!inst.routes.contains(l.product)) report("lot product has no route", entity);
    }
    return out;
}

} // namespace smsp
