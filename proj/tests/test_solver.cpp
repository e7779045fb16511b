#include "smsp/facts.hpp"
#include "smsp/generator.hpp"
#include "smsp/model.hpp"
#include "smsp/oracle.hpp"
#include "smsp/solver.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace smsp;

namespace {

OpRef op(std::uint64_t lot, int index) { return {Term::number(lot), index}; }

struct Placed {
    Time start;
    std::size_t machine;
    std::vector<OpRef> ops;
    std::vector<MaintLabel> maints;
};

/// Batches of a feasible schedule in start order, each with the
/// maintenances directly in front of it.
std::vector<Placed> append_order(const GlobalSchedule &gs, const Instance &inst) {
    const auto eval = evaluate(gs, inst);
    REQUIRE(eval.ok());
    std::vector<Placed> out;
    for (std::size_t m = 0; m < gs.machines.size(); ++m) {
        std::vector<MaintLabel> pending;
        for (std::size_t j = 0; j < gs.machines[m].slots.size(); ++j) {
            const auto &slot = gs.machines[m].slots[j];
            if (const auto *mt = std::get_if<MaintSlot>(&slot)) pending.push_back(mt->label);
            if (const auto *b = std::get_if<BatchSlot>(&slot)) {
                out.push_back({eval.timed->start[m][j], m, b->ops, pending});
                pending.clear();
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Placed &a, const Placed &b) {
        return std::pair(a.start, a.machine) < std::pair(b.start, b.machine);
    });
    return out;
}

Instance two_lots_with_implants(int n) {
    auto inst = testing::two_lots();
    auto &ms = inst.machines.at("implant_128"_sym);
    ms.clear();
    for (int k = 1; k <= n; ++k) ms.push_back({"implant_128"_sym, Term::number(static_cast<std::uint64_t>(k))});
    return inst;
}

OracleLimits wide_limits() {
    OracleLimits lim;
    lim.max_ops_per_lot = 5;
    lim.max_enumerated_states = 100'000'000;
    return lim;
}

} // namespace

TEST_CASE("decision families") {
    const auto inst = testing::two_lots();
    const auto pre = build_prealloc(inst, {});
    const DecisionModel model(inst, pre);

    const auto first = model.batch_partitions(Term::number(1), 1);
    REQUIRE(first.size() == 2);
    CHECK(first[0] == std::vector<std::vector<LotId>>{{Term::number(1), Term::number(2)}});
    CHECK(first[1] == std::vector<std::vector<LotId>>{{Term::number(1)}, {Term::number(2)}});
    CHECK(model.batch_partitions(Term::number(1), 2).size() == 1);

    CHECK(model.machine_choices({op(1, 1), op(2, 1)}) == std::vector<MachineId>{Term::number(1)});

    const Machine implant{"implant_128"_sym, Term::number(1)};
    CHECK(model.gap_delay(implant, SetupRef{"su128_2"_sym}, op(1, 5), {"implant_128_mn"_sym}) == 13);
    CHECK(model.gap_delay(implant, SetupRef{"su128_1"_sym}, op(1, 5), {"implant_128_mn"_sym}) == 31);
    CHECK(model.gap_delay(implant, SetupRef{AnySetup{}}, op(1, 3), {}) == 20);
    const auto slots = model.gap_slots(implant, SetupRef{"su128_1"_sym}, op(1, 5), {"implant_128_mn"_sym});
    REQUIRE(slots.size() == 2);
    CHECK(std::holds_alternative<MaintSlot>(slots[0]));
    CHECK(std::holds_alternative<SetupSlot>(slots[1]));
}

TEST_CASE("disjoint preallocations leave no common machine") {
    auto inst = testing::two_lots();
    inst.machines.at("diffusion_fe_120"_sym).push_back({"diffusion_fe_120"_sym, Term::number(2)});
    auto pre = build_prealloc(inst, {});
    pre[op(1, 1)] = {Term::number(1)};
    pre[op(2, 1)] = {Term::number(2)};
    const DecisionModel model(inst, pre);
    CHECK(model.machine_choices({op(1, 1), op(2, 1)}).empty());
    PartialState state(model);
    CHECK_FALSE(state.append({op(1, 1), op(2, 1)}, Term::number(1), {}));
    CHECK(state.depth() == 0);
}

TEST_CASE("lower bounds") {
    const auto inst = testing::two_lots();
    const auto pre = build_prealloc(inst, {});
    const DecisionModel model(inst, pre);
    PartialState state(model);
    CHECK(lower_bound(state) >= 46);

    const auto gs = testing::two_lots_reference_schedule();
    for (const auto &p : append_order(gs, inst)) {
        CHECK(lower_bound(state) <= 89);
        REQUIRE(state.append(p.ops, gs.machines[p.machine].machine.id, p.maints));
    }
    CHECK(state.complete());
    CHECK(lower_bound(state) == 89);
    CHECK(state.objectives() == Objectives{89, 1, 0});
    CHECK(evaluate(state.schedule(), inst).objectives == Objectives{89, 1, 0});

    const auto single = parse_facts("tool(g,1).\nroute(1,1,g,17,1,1,0).\nlot(1,1).");
    const DecisionModel one(single, build_prealloc(single, {}));
    CHECK(lower_bound(PartialState(one)) == 17);
}

TEST_CASE("appends reject infeasible moves and undo cleanly") {
    const auto inst = testing::two_lots();
    const DecisionModel model(inst, build_prealloc(inst, {}));
    PartialState state(model);
    CHECK_FALSE(state.append({op(1, 2)}, Term::number(1), {}));                   // predecessor missing
    CHECK_FALSE(state.append({op(1, 1), op(2, 1)}, Term::number(2), {}));         // no such machine
    CHECK_FALSE(state.append({op(1, 1)}, Term::number(1), {"implant_128_mn"_sym})); // other group
    REQUIRE(state.append({op(1, 1), op(2, 1)}, Term::number(1), {}));
    const auto before = state.objectives();
    REQUIRE(state.append({op(1, 2)}, Term::number(1), {}));
    state.pop();
    CHECK(state.objectives() == before);
    CHECK(state.depth() == 1);
}

TEST_CASE("two-lot instance") {
    const auto inst = testing::two_lots();
    auto cfg = SolverConfig::unlimited();
    std::vector<IncumbentRecord> seen;
    cfg.on_incumbent = [&](const IncumbentRecord &r, const GlobalSchedule &gs) {
        seen.push_back(r);
        const auto eval = evaluate(gs, inst);
        REQUIRE(eval.ok());
        CHECK(*eval.objectives == r.objectives);
    };
    const auto result = solve(inst, cfg);
    REQUIRE(result.objectives.has_value());
    CHECK(*result.objectives == Objectives{89, 1, 0});
    CHECK(result.stage1_optimal);
    CHECK(result.stage2_optimal);
    CHECK(makespan(*result.best) == 89);
    CHECK(seen.size() == result.log.size());
    for (std::size_t k = 1; k < seen.size(); ++k) {
        if (seen[k].stage == 1) {
            CHECK(seen[k].objectives.makespan < seen[k - 1].objectives.makespan);
        } else if (seen[k - 1].stage == 2) {
            CHECK(std::pair(seen[k].objectives.setup_violations, seen[k].objectives.batch_violations) <
                  std::pair(seen[k - 1].objectives.setup_violations, seen[k - 1].objectives.batch_violations));
        }
    }

    const auto stage2 = minimize_violations(inst, 89, cfg);
    REQUIRE(stage2.objectives.has_value());
    CHECK(stage2.objectives->setup_violations == 1);
    CHECK(stage2.objectives->batch_violations == 0);
}

TEST_CASE("a second implant machine") {
    const auto inst = two_lots_with_implants(2);
    const auto result = solve(inst, SolverConfig::unlimited());
    REQUIRE(result.objectives.has_value());
    CHECK(result.stage2_optimal);
    CHECK(*result.objectives == oracle_optimum(inst, wide_limits()).objectives);

    // one machine per implant setup: no setup is ever changed away from
    auto cfg = SolverConfig::unlimited();
    cfg.prealloc = {2, 0, true};
    const auto split = solve(inst, cfg);
    REQUIRE(split.objectives.has_value());
    CHECK(split.objectives->setup_violations == 0);
    CHECK(split.objectives->makespan >= result.objectives->makespan);
}

TEST_CASE("single chain") {
    const auto inst = parse_facts("tool(g,1).\ntool(h,1).\nsetup(g,sa,4,0).\nsetup(g,sb,6,0).\nsetup(h,sc,3,2).\n"
                                  "route(1,1,g,5,1,1,sa).\nroute(1,2,h,7,1,1,sc).\nroute(1,3,g,2,1,1,sb).\n"
                                  "route(1,4,g,3,1,1,sb).\nroute(1,5,h,1,1,1,0).\nlot(1,1).");
    const auto result = solve(inst, SolverConfig::unlimited());
    REQUIRE(result.objectives.has_value());
    // sb is set up on g while the lot is on h
    CHECK(*result.objectives == Objectives{22, 0, 0});
}

TEST_CASE("no violations possible means none reported") {
    auto inst = testing::two_lots();
    for (auto &[key, s] : inst.setups) s.min_ops = 0;
    for (auto &[p, r] : inst.routes) {
        for (auto &step : r.steps) step.min_batch = 1;
    }
    const auto result = minimize_violations(inst, 1000, SolverConfig::unlimited());
    REQUIRE(result.objectives.has_value());
    CHECK(result.objectives->setup_violations == 0);
    CHECK(result.objectives->batch_violations == 0);
}

TEST_CASE("unmeetable maintenance") {
    const auto inst = parse_facts("tool(g,1).\nroute(1,1,g,5,1,1,0).\nlot(1,1).\npm(g,w,time,0,4,3).");
    CHECK_THROWS_AS((void)solve(inst, SolverConfig::unlimited()), NoFeasibleSchedule);
}

TEST_CASE("configuration errors") {
    auto cfg = SolverConfig::unlimited();
    cfg.stage1_limit = Seconds(0);
    CHECK_THROWS_AS((void)solve(testing::two_lots(), cfg), SolverConfigError);
    cfg = SolverConfig::unlimited();
    cfg.prealloc.lot_step = 3;
    CHECK_THROWS_AS((void)solve(testing::two_lots(), cfg), SolverConfigError);
}

TEST_CASE("restarts are reproducible at a fixed seed") {
    const auto inst = testing::two_lots();
    auto cfg = SolverConfig::unlimited();
    cfg.search = SearchMode::GreedySeedThenBnb;
    cfg.rng_seed = 12;
    const auto a = solve(inst, cfg);
    const auto b = solve(inst, cfg);
    REQUIRE(a.objectives.has_value());
    CHECK(*a.objectives == Objectives{89, 1, 0});
    CHECK(a.stage1_optimal);
    CHECK(a.best->schedule == b.best->schedule);
    CHECK(a.nodes == b.nodes);
}

TEST_CASE("time limits return the best schedule so far") {
    GeneratorParams p;
    p.n_lots = 10;
    p.seed = 3;
    const auto inst = generate_instance(p);
    SolverConfig cfg;
    cfg.stage1_limit = Seconds(0.2);
    cfg.stage2_limit = Seconds(0.2);
    cfg.search = SearchMode::GreedySeedThenBnb;
    const auto result = solve(inst, cfg);
    REQUIRE(result.best.has_value());
    CHECK_FALSE(result.stage1_optimal);
    CHECK(evaluate(result.best->schedule, inst).objectives == result.objectives);
}

TEST_CASE("exact search matches the oracle on micro instances") {
    int compared = 0;
    for (std::uint64_t seed = 1000; compared < 20 && seed < 1200; ++seed) {
        const auto inst = testing::micro_instance(seed);
        std::optional<Objectives> expected;
        bool infeasible = false;
        try {
            expected = oracle_optimum(inst).objectives;
        } catch (const LimitExceeded &) {
            continue;
        } catch (const NoFeasibleSchedule &) {
            infeasible = true;
        }
        if (infeasible) {
            CHECK_THROWS_AS((void)solve(inst, SolverConfig::unlimited()), NoFeasibleSchedule);
            continue;
        }
        const auto result = solve(inst, SolverConfig::unlimited());
        REQUIRE(result.objectives.has_value());
        CHECK_MESSAGE(*result.objectives == *expected, "seed " << seed);
        CHECK(result.stage1_optimal);
        CHECK(result.stage2_optimal);
        ++compared;
    }
    CHECK(compared == 20);
}

TEST_CASE("lower bound never exceeds a reachable makespan") {
    std::mt19937_64 rng(5);
    int states = 0;
    for (std::uint64_t seed = 2000; states < 1000 && seed < 2600; ++seed) {
        const auto inst = testing::micro_instance(seed);
        std::vector<GlobalSchedule> schedules;
        struct Enough {};
        try {
            enumerate_schedules(inst, OracleLimits{}, [&](const GlobalSchedule &gs, const Objectives &) {
                schedules.push_back(gs);
                if (schedules.size() == 200) throw Enough{};
            });
        } catch (const LimitExceeded &) {
            continue;
        } catch (const Enough &) {
        }
        if (schedules.empty()) continue;
        const DecisionModel model(inst, build_prealloc(inst, {}));
        for (int sample = 0; sample < 20 && states < 1000; ++sample) {
            const auto &gs = schedules[std::uniform_int_distribution<std::size_t>(0, schedules.size() - 1)(rng)];
            const Time span = evaluate(gs, inst).objectives->makespan;
            const auto order = append_order(gs, inst);
            const auto cut = std::uniform_int_distribution<std::size_t>(0, order.size())(rng);
            PartialState state(model);
            for (std::size_t k = 0; k < cut; ++k) {
                REQUIRE(state.append(order[k].ops, gs.machines[order[k].machine].machine.id, order[k].maints));
            }
            CHECK_MESSAGE(lower_bound(state) <= span, "seed " << seed);
            if (cut == order.size()) CHECK(lower_bound(state) == span);
            ++states;
        }
    }
    CHECK(states == 1000);
}

TEST_CASE("restarts reach a schedule where the strict append order strands batches") {
    // seed 109 with fixed machines dead-ended every dive before late moves were kept
    for (std::uint64_t seed : {101, 109}) {
        GeneratorParams p;
        p.n_lots = 8;
        p.route_len = 10;
        p.machines_per_group = 3;
        p.seed = seed;
        const auto inst = generate_instance(p);
        for (AllocConfig alloc : {AllocConfig{1, 0, false}, AllocConfig{3, 0, true}}) {
            SolverConfig cfg;
            cfg.stage1_limit = Seconds(2);
            cfg.stage2_limit = Seconds(1);
            cfg.search = SearchMode::GreedySeedThenBnb;
            cfg.prealloc = alloc;
            const auto result = solve(inst, cfg);
            REQUIRE_MESSAGE(result.best.has_value(), "seed " << seed << " size " << alloc.sub_size);
            CHECK(evaluate(result.best->schedule, inst).objectives == result.objectives);
        }
    }
}
