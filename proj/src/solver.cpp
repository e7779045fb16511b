#include "smsp/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace smsp {

namespace {

using Clock = std::chrono::steady_clock;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

struct Candidate {
    Move move;
    MoveEffect effect;
    int size = 0;
    Time urgency = 0;
    bool late = false; // breaks the append order; only kept by restarts
};

class Search {
public:
    Search(const DecisionModel &model, const SolverConfig &cfg, Clock::time_point origin, SolveResult &result)
        : model_(model), cfg_(cfg), origin_(origin), result_(result), state_(model), rng_(cfg.rng_seed) {}

    /// Runs one stage. Returns true if the search space was exhausted.
    bool run(int stage, Seconds limit, std::optional<Time> makespan_cap) {
        stage_ = stage;
        cap_ = makespan_cap;
        timed_out_ = false;
        const auto begin = Clock::now();
        deadline_ = std::isfinite(limit.count())
                        ? begin + std::chrono::duration_cast<Clock::duration>(
                                      std::min(limit, Seconds(1e9)))
                        : Clock::time_point::max();

        if (cfg_.search == SearchMode::ExactBnb) {
            node_limit_ = std::numeric_limits<std::uint64_t>::max();
            randomize_ = false;
            aborted_ = false;
            dfs();
            return !timed_out_;
        }
        double limit_nodes = 2000;
        for (int round = 0;; ++round) {
            randomize_ = round > 0;
            node_limit_ = static_cast<std::uint64_t>(limit_nodes);
            run_nodes_ = 0;
            aborted_ = false;
            dfs();
            if (timed_out_) return false;
            if (!aborted_) return true;
            limit_nodes = std::min(limit_nodes * 1.5, 1e15);
        }
    }

    [[nodiscard]] const std::optional<Objectives> &best() const { return best_; }
    [[nodiscard]] const GlobalSchedule &best_schedule() const { return best_schedule_; }

private:
    bool stop() {
        if (timed_out_ || aborted_) return true;
        ++result_.nodes;
        ++run_nodes_;
        if (run_nodes_ >= node_limit_) {
            aborted_ = true;
            return true;
        }
        if ((result_.nodes & 1023U) == 0 && Clock::now() >= deadline_) {
            timed_out_ = true;
            return true;
        }
        return false;
    }

    [[nodiscard]] bool pruned() const {
        const Time lb = state_.lower_bound();
        if (stage_ == 1) return best_ && lb >= best_->makespan;
        if (cap_ && lb > *cap_) return true;
        if (!best_) return false;
        const auto obj = state_.objectives();
        return std::pair(obj.setup_violations, obj.batch_violations) >=
               std::pair(best_->setup_violations, best_->batch_violations);
    }

    [[nodiscard]] bool improves(const Objectives &obj) const {
        if (stage_ == 1) return !best_ || obj.makespan < best_->makespan;
        if (cap_ && obj.makespan > *cap_) return false;
        return !best_ || std::pair(obj.setup_violations, obj.batch_violations) <
                             std::pair(best_->setup_violations, best_->batch_violations);
    }

    void record() {
        const auto obj = state_.objectives();
        if (!improves(obj)) return;
        auto gs = state_.schedule();
        const auto eval = evaluate(gs, model_.instance());
        if (!eval.ok() || *eval.objectives != obj) {
            std::ostringstream msg;
            msg << "solver produced a schedule the checker disagrees with: search " << obj;
            if (eval.ok()) msg << ", checker " << *eval.objectives;
            for (const auto &issue : eval.issues) msg << "; " << issue;
            throw std::logic_error(msg.str());
        }
        best_ = obj;
        best_schedule_ = std::move(gs);
        IncumbentRecord rec{stage_,
                            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - origin_).count(),
                            obj};
        result_.log.push_back(rec);
        if (cfg_.on_incumbent) cfg_.on_incumbent(rec, best_schedule_);
    }

    void add_candidates(int family, std::uint64_t members, std::vector<Candidate> &out) const {
        const auto &f = model_.families()[idx(family)];
        const auto &group = model_.groups()[idx(f.group)];
        Time urgency = 0;
        for (std::uint64_t bits = members; bits != 0; bits &= bits - 1) {
            int lot = f.lots[idx(std::countr_zero(bits))];
            urgency = std::max(urgency, model_.remaining_work(lot, f.index - 1));
        }
        const int size = std::popcount(members);
        for (int m : group.machines) {
            std::uint32_t eligible = 0;
            const auto base = idx(model_.machines()[idx(m)].counter_base);
            for (std::size_t c = 0; c < group.maints.size(); ++c) {
                if (state_counter(base + c) >= group.maints[c].min) eligible |= 1U << c;
            }
            for (std::uint32_t mask = eligible;; mask = (mask - 1) & eligible) {
                Move move{family, members, m, mask};
                MoveEffect effect;
                if (state_.probe(move, effect)) {
                    const bool late = !ordered(move, effect);
                    if (!late || cfg_.search == SearchMode::GreedySeedThenBnb) {
                        out.push_back({move, effect, size, urgency, late});
                    }
                }
                if (mask == 0) break;
            }
        }
    }

    [[nodiscard]] std::int64_t state_counter(std::size_t c) const { return state_.counter(c); }

    /// Moves are appended in non-decreasing (start, machine) order unless
    /// they wait on the previous move; every schedule has exactly such an
    /// append sequence. A partial state can strand a batch whose machine
    /// frees up before the last start, so restarts keep such moves, ranked
    /// last, rather than dead-ending.
    [[nodiscard]] bool ordered(const Move &move, const MoveEffect &effect) const {
        if (state_.depth() == 0) return true;
        if (std::pair(effect.start, move.machine) >= std::pair(state_.last_start(), state_.last_machine())) return true;
        return state_.depends_on_last(move);
    }

    void subsets(int family, std::uint64_t ready, std::vector<Candidate> &out) const {
        const int cap = model_.families()[idx(family)].max_batch;
        std::vector<int> bits;
        for (std::uint64_t b = ready; b != 0; b &= b - 1) bits.push_back(std::countr_zero(b));
        auto rec = [&](auto &&self, std::size_t from, std::uint64_t chosen, int count) -> void {
            if (count > 0) add_candidates(family, chosen, out);
            if (count == cap) return;
            for (std::size_t k = from; k < bits.size(); ++k) {
                self(self, k + 1, chosen | (std::uint64_t{1} << bits[k]), count + 1);
            }
        };
        rec(rec, 0, 0, 0);
    }

    void dfs() {
        if (stop()) return;
        if (state_.complete()) {
            record();
            return;
        }
        if (pruned()) return;

        std::vector<Candidate> cands;
        for (std::size_t f = 0; f < model_.families().size(); ++f) {
            const auto ready = state_.ready_members(static_cast<int>(f));
            if (ready != 0) subsets(static_cast<int>(f), ready, cands);
        }
        const bool second = stage_ == 2;
        std::sort(cands.begin(), cands.end(), [second](const Candidate &a, const Candidate &b) {
            if (a.late != b.late) return b.late;
            if (second) {
                auto va = a.effect.setup_violation + a.effect.batch_violation;
                auto vb = b.effect.setup_violation + b.effect.batch_violation;
                if (va != vb) return va < vb;
            }
            if (a.effect.start != b.effect.start) return a.effect.start < b.effect.start;
            if (a.size != b.size) return a.size > b.size;
            if (a.urgency != b.urgency) return a.urgency > b.urgency;
            auto ma = std::popcount(a.move.maint_mask);
            auto mb = std::popcount(b.move.maint_mask);
            if (ma != mb) return ma < mb;
            if (a.effect.completion != b.effect.completion) return a.effect.completion < b.effect.completion;
            if (a.move.machine != b.move.machine) return a.move.machine < b.move.machine;
            if (a.move.family != b.move.family) return a.move.family < b.move.family;
            if (a.move.members != b.move.members) return a.move.members < b.move.members;
            return a.move.maint_mask < b.move.maint_mask;
        });
        if (randomize_ && cands.size() > 1) {
            std::uniform_real_distribution<double> coin(0.0, 1.0);
            for (std::size_t k = 0; k + 1 < cands.size(); ++k) {
                if (coin(rng_) < 0.3) {
                    const std::size_t span = std::min<std::size_t>(3, cands.size() - k - 1);
                    std::uniform_int_distribution<std::size_t> pick(1, span);
                    std::swap(cands[k], cands[k + pick(rng_)]);
                }
            }
        }

        for (const auto &c : cands) {
            state_.push(c.move, c.effect);
            dfs();
            state_.pop();
            if (timed_out_ || aborted_) return;
            if (pruned()) return;
        }
    }

    const DecisionModel &model_;
    const SolverConfig &cfg_;
    Clock::time_point origin_;
    SolveResult &result_;
    PartialState state_;
    std::mt19937_64 rng_;

    int stage_ = 1;
    std::optional<Time> cap_;
    Clock::time_point deadline_;
    std::uint64_t node_limit_ = 0;
    std::uint64_t run_nodes_ = 0;
    bool randomize_ = false;
    bool aborted_ = false;
    bool timed_out_ = false;
    std::optional<Objectives> best_;
    GlobalSchedule best_schedule_;
};

void finish(SolveResult &result, const Search &search, const Instance &inst) {
    if (!search.best()) return;
    auto eval = evaluate(search.best_schedule(), inst);
    result.best = std::move(eval.timed);
    result.objectives = search.best();
}

} // namespace

SolverConfig SolverConfig::unlimited() {
    SolverConfig cfg;
    cfg.stage1_limit = Seconds(std::numeric_limits<double>::infinity());
    cfg.stage2_limit = Seconds(std::numeric_limits<double>::infinity());
    return cfg;
}

void check_solver_config(const SolverConfig &cfg) {
    if (!(cfg.stage1_limit.count() > 0)) throw SolverConfigError("stage 1 time limit must be positive");
    if (!(cfg.stage2_limit.count() > 0)) throw SolverConfigError("stage 2 time limit must be positive");
    try {
        check_alloc_config(cfg.prealloc);
    } catch (const AllocConfigError &e) {
        throw SolverConfigError(e.what());
    }
}

namespace {

DecisionModel make_model(const Instance &inst, const SolverConfig &cfg) {
    auto prealloc = build_prealloc(inst, cfg.prealloc);
    return DecisionModel(inst, prealloc);
}

} // namespace

SolveResult solve(const Instance &inst, const SolverConfig &cfg) {
    check_solver_config(cfg);
    const auto model = make_model(inst, cfg);
    SolveResult result;
    const auto origin = Clock::now();
    Search search(model, cfg, origin, result);

    const bool done1 = search.run(1, cfg.stage1_limit, std::nullopt);
    const auto mid = Clock::now();
    result.stage1_time = mid - origin;
    result.stage1_optimal = done1 && search.best().has_value();
    if (!search.best()) {
        if (done1) throw NoFeasibleSchedule("no schedule satisfies the hard constraints");
        return result;
    }

    const Time cap = search.best()->makespan;
    const bool done2 = search.run(2, cfg.stage2_limit, cap);
    result.stage2_time = Clock::now() - mid;
    result.stage2_optimal = done2;
    finish(result, search, inst);
    return result;
}

SolveResult minimize_violations(const Instance &inst, Time fixed_makespan, const SolverConfig &cfg) {
    check_solver_config(cfg);
    const auto model = make_model(inst, cfg);
    SolveResult result;
    const auto origin = Clock::now();
    Search search(model, cfg, origin, result);
    const bool done = search.run(2, cfg.stage2_limit, fixed_makespan);
    result.stage2_time = Clock::now() - origin;
    result.stage2_optimal = done && search.best().has_value();
    if (!search.best() && done) {
        throw NoFeasibleSchedule("no schedule within makespan " + std::to_string(fixed_makespan));
    }
    finish(result, search, inst);
    return result;
}

Time lower_bound(const PartialState &state) { return state.lower_bound(); }

} // namespace smsp
