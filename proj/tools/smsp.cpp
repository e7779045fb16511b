// smsp: command line front end for the scheduler.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 infeasible.

#include "smsp/bench.hpp"
#include "smsp/facts.hpp"
#include "smsp/gantt.hpp"
#include "smsp/generator.hpp"
#include "smsp/oracle.hpp"
#include "smsp/schedule_json.hpp"
#include "smsp/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace smsp;

namespace {

enum Exit { kOk = 0, kValidation = 1, kIo = 2, kInfeasible = 3 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw IoError("cannot write " + path);
}

/// Parses and validates; prints diagnostics. Returns nullopt with `code`
/// set on failure.
std::optional<Instance> load_instance(const std::string &path, int &code) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError &e) {
        std::cerr << "error: " << e.what() << "\n";
        code = kIo;
        return std::nullopt;
    }
    Instance inst;
    try {
        inst = parse_facts(text);
    } catch (const FactError &e) {
        std::cerr << path << ":" << e.what() << "\n";
        code = kValidation;
        return std::nullopt;
    }
    auto diags = validate_instance(inst);
    if (!diags.empty()) {
        for (const auto &d : diags) std::cerr << path << ": " << d << "\n";
        code = kValidation;
        return std::nullopt;
    }
    code = kOk;
    return inst;
}

std::string summary(const Objectives &o) {
    return "makespan=" + std::to_string(o.makespan) + " setup=" + std::to_string(o.setup_violations) +
           " batch=" + std::to_string(o.batch_violations);
}

int cmd_validate(const std::string &path) {
    int code = kOk;
    auto inst = load_instance(path, code);
    if (!inst) return code;
    std::cout << path << ": ok (" << inst->lots().size() << " lots, " << inst->operation_count() << " operations, "
              << inst->tool_groups().size() << " tool groups)\n";
    return kOk;
}

struct SolveArgs {
    std::string path;
    int sub_size = 0;
    int lot_step = 0;
    bool by_setup = false;
    double stage1_limit = 450;
    double stage2_limit = 150;
    std::uint64_t seed = 0;
    std::string search = "greedy";
    std::string format = "json";
    std::string output;
    double scale = 1.0;
    bool quiet = false;
};

int cmd_solve(const SolveArgs &a) {
    int code = kOk;
    auto inst = load_instance(a.path, code);
    if (!inst) return code;

    SolverConfig cfg;
    cfg.stage1_limit = Seconds(a.stage1_limit);
    cfg.stage2_limit = Seconds(a.stage2_limit);
    cfg.prealloc = {a.sub_size, a.lot_step, a.by_setup};
    cfg.search = a.search == "exact" ? SearchMode::ExactBnb : SearchMode::GreedySeedThenBnb;
    cfg.rng_seed = a.seed;
    if (!a.quiet) {
        cfg.on_incumbent = [](const IncumbentRecord &r, const GlobalSchedule &) {
            std::cerr << r.elapsed_ms << " " << r.objectives.makespan << " " << r.objectives.setup_violations << " "
                      << r.objectives.batch_violations << "\n";
        };
    }

    SolveResult result;
    try {
        result = solve(*inst, cfg);
    } catch (const SolverConfigError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const ModelError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const NoFeasibleSchedule &e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    }
    if (!result.best) {
        std::cerr << "no schedule found within the time limit\n";
        return kInfeasible;
    }

    std::string rendered;
    if (a.format == "json") {
        rendered = schedule_to_json(*result.best);
    } else if (a.format == "gantt-svg") {
        rendered = render_gantt_svg(*result.best, a.scale);
    } else {
        rendered = render_gantt_text(*result.best);
    }
    try {
        write_output(a.output, rendered);
    } catch (const IoError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
    const std::string line = summary(*result.objectives) + " optimal=" + (result.stage1_optimal ? "yes" : "no") +
                             "/" + (result.stage2_optimal ? "yes" : "no");
    // Keep stdout clean when it carries the schedule.
    (a.output.empty() || a.output == "-" ? std::cerr : std::cout) << line << "\n";
    return kOk;
}

int cmd_check(const std::string &instance_path, const std::string &schedule_path) {
    int code = kOk;
    auto inst = load_instance(instance_path, code);
    if (!inst) return code;
    GlobalSchedule gs;
    try {
        gs = parse_schedule_json(read_file(schedule_path));
    } catch (const IoError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const ScheduleFormatError &e) {
        std::cerr << schedule_path << ": " << e.what() << "\n";
        return kValidation;
    }
    const auto eval = evaluate(gs, *inst);
    if (!eval.ok()) {
        for (const auto &issue : eval.issues) std::cout << issue << "\n";
        return kValidation;
    }
    std::cout << summary(*eval.objectives) << "\n";
    return kOk;
}

int cmd_oracle(const std::string &path, const OracleLimits &limits) {
    int code = kOk;
    auto inst = load_instance(path, code);
    if (!inst) return code;
    try {
        const auto best = oracle_optimum(*inst, limits);
        const auto eval = evaluate(best.schedule, *inst);
        nlohmann::json doc;
        doc["makespan"] = best.objectives.makespan;
        doc["setup_violations"] = best.objectives.setup_violations;
        doc["batch_violations"] = best.objectives.batch_violations;
        doc["count"] = best.count;
        doc["schedule"] = nlohmann::json::parse(schedule_to_json(*eval.timed));
        std::cout << doc.dump(2) << "\n";
    } catch (const LimitExceeded &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const NoFeasibleSchedule &e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    }
    return kOk;
}

int cmd_bench(const std::string &dir, const BenchOptions &opts, const std::string &output) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        std::cerr << "error: not a directory: " << dir << "\n";
        return kIo;
    }
    std::vector<BenchInput> inputs;
    for (const auto &entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".lp") {
            inputs.push_back({entry.path().stem().string(), entry.path().string()});
        }
    }
    std::string csv = bench_csv_header();
    for (const auto &row : run_bench(inputs, standard_configs(), opts)) csv += bench_csv_row(row);
    try {
        write_output(output, csv);
    } catch (const IoError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
    return kOk;
}

int cmd_generate(const GeneratorParams &params, const std::string &output) {
    std::string text;
    try {
        text = serialize_facts(generate_instance(params));
    } catch (const GeneratorError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    }
    try {
        write_output(output, text);
    } catch (const IoError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
    return kOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Batch scheduling with setups and maintenance windows"};
    app.require_subcommand(1);

    std::string validate_path;
    auto *validate = app.add_subcommand("validate", "Parse and validate an instance");
    validate->add_option("instance", validate_path, "Instance file")->required();

    SolveArgs sa;
    auto *solve_cmd = app.add_subcommand("solve", "Find a schedule");
    solve_cmd->add_option("instance", sa.path, "Instance file")->required();
    solve_cmd->add_option("--sub-size", sa.sub_size, "Machines per subgroup (0: whole tool group)")
        ->check(CLI::NonNegativeNumber);
    solve_cmd->add_option("--lot-step", sa.lot_step, "Subgroup index step per visit")->check(CLI::IsMember({0, 1}));
    solve_cmd->add_flag("--by-setup", sa.by_setup, "Fix operations to machines by setup");
    solve_cmd->add_option("--stage1-limit", sa.stage1_limit, "Makespan stage time limit, seconds")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--stage2-limit", sa.stage2_limit, "Violation stage time limit, seconds")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--seed", sa.seed, "Random seed for restarts");
    solve_cmd->add_option("--search", sa.search, "exact or greedy")->check(CLI::IsMember({"exact", "greedy"}));
    solve_cmd->add_option("--out", sa.format, "Output format")->check(CLI::IsMember({"json", "gantt-svg", "gantt-text"}));
    solve_cmd->add_option("-o,--output", sa.output, "Output file (default: standard output)");
    solve_cmd->add_option("--scale", sa.scale, "SVG pixels per time unit")->check(CLI::PositiveNumber);
    solve_cmd->add_flag("-q,--quiet", sa.quiet, "No progress lines");

    std::string check_instance;
    std::string check_schedule;
    auto *check = app.add_subcommand("check", "Evaluate a JSON schedule against an instance");
    check->add_option("instance", check_instance, "Instance file")->required();
    check->add_option("schedule", check_schedule, "Schedule JSON file")->required();

    std::string oracle_path;
    OracleLimits limits;
    auto *oracle = app.add_subcommand("oracle", "Exhaustive optimum of a small instance");
    oracle->add_option("instance", oracle_path, "Instance file")->required();
    oracle->add_option("--max-lots", limits.max_lots, "Largest lot count accepted")->check(CLI::PositiveNumber);
    oracle->add_option("--max-ops", limits.max_ops_per_lot, "Longest route accepted")->check(CLI::PositiveNumber);
    oracle->add_option("--max-machines", limits.max_machines_per_group, "Most machines per tool group")->check(CLI::PositiveNumber);
    oracle->add_option("--max-states", limits.max_enumerated_states, "Search state budget")->check(CLI::PositiveNumber);

    std::string bench_dir;
    std::string bench_out;
    BenchOptions bench_opts;
    double bench_s1 = 450;
    double bench_s2 = 150;
    auto *bench = app.add_subcommand("bench", "Run the preallocation strategy grid over a directory of instances");
    bench->add_option("dir", bench_dir, "Directory of .lp instances")->required();
    bench->add_option("--stage1-limit", bench_s1)->check(CLI::PositiveNumber);
    bench->add_option("--stage2-limit", bench_s2)->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_opts.seed);
    bench->add_option("-o,--output", bench_out, "CSV file (default: standard output)");

    GeneratorParams gp;
    std::string gen_out;
    auto *generate = app.add_subcommand("generate", "Write a random instance");
    generate->add_option("--lots", gp.n_lots)->check(CLI::PositiveNumber);
    generate->add_option("--products", gp.n_products)->check(CLI::PositiveNumber);
    generate->add_option("--route-len", gp.route_len)->check(CLI::PositiveNumber);
    generate->add_option("--groups", gp.n_groups)->check(CLI::PositiveNumber);
    generate->add_option("--machines", gp.machines_per_group)->check(CLI::PositiveNumber);
    generate->add_option("--batch-fraction", gp.batch_fraction)->check(CLI::Range(0.0, 1.0));
    generate->add_option("--seed", gp.seed);
    generate->add_option("-o,--output", gen_out, "Output file (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*validate) return cmd_validate(validate_path);
        if (*solve_cmd) return cmd_solve(sa);
        if (*check) return cmd_check(check_instance, check_schedule);
        if (*oracle) return cmd_oracle(oracle_path, limits);
        if (*bench) {
            bench_opts.stage1_limit = Seconds(bench_s1);
            bench_opts.stage2_limit = Seconds(bench_s2);
            return cmd_bench(bench_dir, bench_opts, bench_out);
        }
        if (*generate) return cmd_generate(gp, gen_out);
    } catch (const std::ios_base::failure &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
    return kOk;
}
