#include "smsp/bench.hpp"

#include "smsp/facts.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <thread>

namespace smsp {

std::vector<BenchConfig> standard_configs() {
    return {
        {"Fixed", {1, 0, false}},    {"Fixed", {1, 1, false}},    {"Flexible", {2, 0, false}},
        {"Flexible", {2, 1, false}}, {"Flexible", {3, 0, false}}, {"Setup", {2, 0, true}},
        {"Setup", {2, 1, true}},     {"Setup", {3, 0, true}},
    };
}

BenchRow bench_one(const std::string &id, const Instance &inst, const BenchConfig &cfg, const BenchOptions &opts) {
    BenchRow row;
    row.instance = id;
    row.strategy = cfg.strategy;
    row.size = cfg.alloc.sub_size;
    row.lot_step = cfg.alloc.lot_step;

    SolverConfig sc;
    sc.stage1_limit = opts.stage1_limit;
    sc.stage2_limit = opts.stage2_limit;
    sc.prealloc = cfg.alloc;
    sc.search = opts.search;
    sc.rng_seed = opts.seed;
    try {
        auto result = solve(inst, sc);
        row.objectives = result.objectives;
        row.stage1_optimal = result.stage1_optimal;
        row.stage2_optimal = result.stage2_optimal;
        row.stage1_time = result.stage1_optimal ? result.stage1_time : opts.stage1_limit;
        row.stage2_time = result.stage2_optimal ? result.stage2_time : opts.stage2_limit;
        if (!result.objectives) row.note = "no schedule within the time limit";
    } catch (const NoFeasibleSchedule &e) {
        row.note = std::string("infeasible: ") + e.what();
    } catch (const std::exception &e) {
        row.note = std::string("error: ") + e.what();
    }
    return row;
}

unsigned bench_threads() {
    if (const char *env = std::getenv("SMSP_THREADS")) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<BenchRow> run_bench(std::vector<BenchInput> inputs, const std::vector<BenchConfig> &configs,
                                const BenchOptions &opts) {
    std::sort(inputs.begin(), inputs.end(), [](const BenchInput &a, const BenchInput &b) { return a.id < b.id; });

    std::vector<std::optional<Instance>> instances(inputs.size());
    std::vector<std::string> load_errors(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        try {
            instances[i] = load_facts_file(inputs[i].path);
            auto diags = validate_instance(*instances[i]);
            if (!diags.empty()) {
                load_errors[i] = "invalid: " + diags.front().invariant + " (" + diags.front().entity + ")";
                instances[i].reset();
            }
        } catch (const std::exception &e) {
            load_errors[i] = std::string("unreadable: ") + e.what();
        }
    }

    const std::size_t jobs = inputs.size() * configs.size();
    std::vector<BenchRow> rows(jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs; k = next++) {
            const std::size_t i = k / configs.size();
            const auto &cfg = configs[k % configs.size()];
            if (instances[i]) {
                rows[k] = bench_one(inputs[i].id, *instances[i], cfg, opts);
            } else {
                rows[k] = BenchRow{inputs[i].id, cfg.strategy, cfg.alloc.sub_size, cfg.alloc.lot_step, {}, {}, {},
                                   false, false, load_errors[i]};
            }
        }
    };
    const unsigned threads = std::min<std::size_t>(opts.threads > 0 ? opts.threads : bench_threads(), std::max<std::size_t>(jobs, 1));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto &t : pool) t.join();
    return rows;
}

std::string bench_csv_header() {
    return "instance,strategy,size,lot_step,makespan,setup_viol,batch_viol,stage1_time,stage2_time,stage1_optimal,"
           "stage2_optimal,note\n";
}

namespace {

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string bench_csv_row(const BenchRow &row) {
    std::ostringstream os;
    os << csv_field(row.instance) << ',' << row.strategy << ',' << row.size << ',' << row.lot_step << ',';
    if (row.objectives) {
        os << row.objectives->makespan << ',' << row.objectives->setup_violations << ','
           << row.objectives->batch_violations << ',';
    } else {
        os << ",,,";
    }
    os << std::fixed << std::setprecision(3) << row.stage1_time.count() << ',' << row.stage2_time.count() << ','
       << (row.stage1_optimal ? "yes" : "no") << ',' << (row.stage2_optimal ? "yes" : "no") << ','
       << csv_field(row.note) << '\n';
    return os.str();
}

} // namespace smsp
