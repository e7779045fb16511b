#include "smsp/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace smsp {

namespace {

constexpr Time kMinDuration = 5;
constexpr Time kMaxDuration = 25;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(engine_() % span);
    }

    bool chance(int num, int den) { return uniform(0, den - 1) < num; }

    template <class It>
    void shuffle(It first, It last) {
        for (auto n = last - first; n > 1; --n) {
            std::swap(first[n - 1], first[uniform(0, n - 1)]);
        }
    }

private:
    std::mt19937_64 engine_; // sequence is fixed by the standard
};

const std::array<const char *, 8> kGroupStems = {
    "diffusion", "lithotrack", "implant", "dry_etch", "wet_bench", "metrology", "cmp", "sputter",
};

std::string group_name(int g) {
    return std::string(kGroupStems[static_cast<std::size_t>(g) % kGroupStems.size()]) + "_" + std::to_string(g + 1);
}

} // namespace

Instance generate_instance(const GeneratorParams &p) {
    if (p.n_lots <= 0 || p.n_products <= 0 || p.route_len <= 0 || p.n_groups <= 0 || p.machines_per_group <= 0) {
        throw GeneratorError("all counts must be positive");
    }
    if (!(p.batch_fraction >= 0.0 && p.batch_fraction <= 1.0)) {
        throw GeneratorError("batch_fraction must lie in [0, 1]");
    }

    Rng rng(p.seed);
    Instance inst;

    std::vector<ToolGroupId> groups;
    std::vector<std::vector<SetupId>> group_setups(static_cast<std::size_t>(p.n_groups));
    for (int g = 0; g < p.n_groups; ++g) {
        ToolGroupId gid = Term::symbol(group_name(g));
        groups.push_back(gid);
        auto &ms = inst.machines[gid];
        for (int m = 1; m <= p.machines_per_group; ++m) ms.push_back({gid, Term::number(static_cast<std::uint64_t>(m))});
        auto n_setups = rng.uniform(2, 3);
        for (int s = 1; s <= n_setups; ++s) {
            SetupSpec spec;
            spec.group = gid;
            spec.id = Term::symbol("su" + std::to_string(g + 1) + "_" + std::to_string(s));
            spec.change_time = rng.uniform(kMinDuration, kMaxDuration);
            spec.min_ops = static_cast<int>(rng.uniform(0, 4));
            group_setups[static_cast<std::size_t>(g)].push_back(spec.id);
            inst.setups.emplace(std::pair{gid, spec.id}, spec);
        }
    }

    auto batched_per_route = static_cast<int>(std::lround(p.batch_fraction * p.route_len));
    for (int prod = 1; prod <= p.n_products; ++prod) {
        ProductId pid = Term::number(static_cast<std::uint64_t>(prod));
        std::vector<int> visit;
        std::vector<int> perm(static_cast<std::size_t>(p.n_groups));
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm.begin(), perm.end());
        for (int i = 0; i < p.route_len; ++i) {
            if (i < p.n_groups) {
                visit.push_back(perm[static_cast<std::size_t>(i)]);
            } else if (p.n_groups == 1) {
                visit.push_back(0);
            } else {
                int g = static_cast<int>(rng.uniform(0, p.n_groups - 2));
                if (g >= visit.back()) ++g;
                visit.push_back(g);
            }
        }
        std::vector<int> steps(static_cast<std::size_t>(p.route_len));
        std::iota(steps.begin(), steps.end(), 0);
        rng.shuffle(steps.begin(), steps.end());
        std::vector<bool> batched(static_cast<std::size_t>(p.route_len), false);
        for (int k = 0; k < batched_per_route; ++k) batched[static_cast<std::size_t>(steps[static_cast<std::size_t>(k)])] = true;

        Route route;
        route.product = pid;
        for (int i = 0; i < p.route_len; ++i) {
            auto gi = static_cast<std::size_t>(visit[static_cast<std::size_t>(i)]);
            OpSpec op;
            op.product = pid;
            op.index = i + 1;
            op.group = groups[gi];
            op.proc_time = rng.uniform(kMinDuration, kMaxDuration);
            if (batched[static_cast<std::size_t>(i)]) {
                op.max_batch = static_cast<int>(rng.uniform(2, 4));
                op.min_batch = static_cast<int>(rng.uniform(2, op.max_batch));
                op.setup = AnySetup{};
            } else {
                const auto &su = group_setups[gi];
                if (rng.chance(3, 4)) {
                    op.setup = su[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(su.size()) - 1))];
                }
            }
            route.steps.push_back(op);
        }
        inst.routes.emplace(pid, std::move(route));
    }

    for (int g = 0; g < p.n_groups; ++g) {
        const ToolGroupId &gid = groups[static_cast<std::size_t>(g)];
        std::int64_t biggest_batch = 1;
        Time longest_op = kMaxDuration;
        bool any_op = false;
        for (const auto &[_, r] : inst.routes) {
            for (const auto &op : r.steps) {
                if (op.group != gid) continue;
                biggest_batch = std::max<std::int64_t>(biggest_batch, op.max_batch);
                longest_op = any_op ? std::max(longest_op, op.proc_time) : op.proc_time;
                any_op = true;
            }
        }
        auto count = rng.uniform(1, 2);
        Trigger first = (g % 2 == 0) ? Trigger::Lots : Trigger::Time;
        for (int k = 0; k < count; ++k) {
            MaintenanceSpec m;
            m.group = gid;
            m.trigger = k == 0 ? first : (first == Trigger::Lots ? Trigger::Time : Trigger::Lots);
            m.label = Term::symbol(gid.text() + (m.trigger == Trigger::Lots ? "_pm" : "_qual"));
            // An overflow can only happen once the window holds more than
            // max - step; keeping min at or below that makes lazy insertion legal.
            std::int64_t step = m.trigger == Trigger::Lots ? biggest_batch : longest_op;
            if (m.trigger == Trigger::Lots) {
                m.max = rng.uniform(biggest_batch + 2, biggest_batch + 8);
            } else {
                m.max = rng.uniform(3 * longest_op, 8 * longest_op);
            }
            m.min = rng.uniform(0, (m.max - step + 1) / 2);
            m.duration = rng.uniform(kMinDuration, kMaxDuration);
            inst.maints[gid].push_back(m);
        }
    }

    for (int l = 1; l <= p.n_lots; ++l) {
        inst.add_lot({Term::number(static_cast<std::uint64_t>(l)),
                      Term::number(static_cast<std::uint64_t>((l - 1) % p.n_products + 1))});
    }
    return inst;
}

} // namespace smsp
