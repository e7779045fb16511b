#ifndef SMSP_INSTANCE_HPP
#define SMSP_INSTANCE_HPP

#include "smsp/term.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smsp {

using ToolGroupId = Term;
using MachineId = Term;
using SetupId = Term;
using ProductId = Term;
using LotId = Term;
using MaintLabel = Term;

/// The i-th production operation on the route of a product.
struct OpSpec {
    ProductId product;
    int index = 0; // 1-based
    ToolGroupId group;
    Time proc_time = 0;
    int min_batch = 1;
    int max_batch = 1;
    SetupRef setup = AnySetup{};

    friend bool operator==(const OpSpec &, const OpSpec &) = default;
};

struct Route {
    ProductId product;
    std::vector<OpSpec> steps; // steps[k].index == k + 1

    friend bool operator==(const Route &, const Route &) = default;
};

struct SetupSpec {
    ToolGroupId group;
    SetupId id;
    Time change_time = 0;
    int min_ops = 0; // production slots to run before the next change

    friend bool operator==(const SetupSpec &, const SetupSpec &) = default;
};

enum class Trigger { Lots, Time };

struct MaintenanceSpec {
    ToolGroupId group;
    MaintLabel label;
    Trigger trigger = Trigger::Lots;
    std::int64_t min = 0;
    std::int64_t max = 1;
    Time duration = 0;

    friend bool operator==(const MaintenanceSpec &, const MaintenanceSpec &) = default;
};

struct Machine {
    ToolGroupId group;
    MachineId id;

    friend bool operator==(const Machine &, const Machine &) = default;
    friend auto operator<=>(const Machine &, const Machine &) = default;
};

struct Lot {
    LotId id;
    ProductId product;

    friend bool operator==(const Lot &, const Lot &) = default;
};

/// Total order on lot ids: numeric when every id in play is an integer,
/// string-lexicographic otherwise.
struct LotOrder {
    bool numeric = true;
    bool operator()(const LotId &a, const LotId &b) const {
        return numeric ? a < b : a.text() < b.text();
    }
    friend bool operator==(const LotOrder &, const LotOrder &) = default;
};

/// An immutable problem description once built. Lots are kept sorted by
/// LotOrder; machines keep declaration order within their group.
class Instance {
public:
    std::map<ProductId, Route> routes;
    std::map<std::pair<ToolGroupId, SetupId>, SetupSpec> setups;
    std::map<ToolGroupId, std::vector<MaintenanceSpec>> maints;
    std::map<ToolGroupId, std::vector<Machine>> machines;

    /// Inserts a lot at its ordered position; re-sorts everything if the
    /// numeric/lexicographic regime changes.
    void add_lot(Lot lot);
    [[nodiscard]] const std::vector<Lot> &lots() const { return lots_; }
    [[nodiscard]] LotOrder lot_order() const { return order_; }

    [[nodiscard]] const Lot *find_lot(const LotId &id) const;
    [[nodiscard]] const OpSpec *find_op(const ProductId &product, int index) const;
    [[nodiscard]] const SetupSpec *find_setup(const ToolGroupId &group, const SetupId &id) const;
    [[nodiscard]] const MaintenanceSpec *find_maint(const ToolGroupId &group, const MaintLabel &label) const;
    [[nodiscard]] const std::vector<Machine> &group_machines(const ToolGroupId &group) const;
    [[nodiscard]] const std::vector<MaintenanceSpec> &group_maints(const ToolGroupId &group) const;

    /// Every tool group mentioned anywhere, in ascending order.
    [[nodiscard]] std::vector<ToolGroupId> tool_groups() const;
    [[nodiscard]] std::size_t operation_count() const;
    [[nodiscard]] bool empty() const {
        return routes.empty() && setups.empty() && maints.empty() && machines.empty() && lots_.empty();
    }

    friend bool operator==(const Instance &, const Instance &) = default;

private:
    std::vector<Lot> lots_;
    LotOrder order_;
};

struct Diagnostic {
    std::string invariant; // short name of the violated invariant
    std::string entity;    // offending entity, rendered in fact syntax
    friend bool operator==(const Diagnostic &, const Diagnostic &) = default;
};

std::ostream &operator<<(std::ostream &os, const Diagnostic &d);

/// Checks the type-level invariants of an instance. Empty result means valid.
std::vector<Diagnostic> validate_instance(const Instance &inst);

} // namespace smsp

#endif // SMSP_INSTANCE_HPP
