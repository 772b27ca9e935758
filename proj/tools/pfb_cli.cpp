#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pfb/dp.hpp"
#include "pfb/dp_late.hpp"
#include "pfb/errors.hpp"
#include "pfb/gamma.hpp"
#include "pfb/generator.hpp"
#include "pfb/json_io.hpp"
#include "pfb/model.hpp"
#include "pfb/oracle.hpp"
#include "pfb/orderings.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;         // parse/config errors
constexpr int kExitNoCertified = 2;   // strict mode, no certified ordering
constexpr int kExitResourceCap = 3;   // enumeration or memory cap exceeded

pfb::Objective parse_objective(const std::string& name) {
    auto obj = pfb::objective_from_name(name);
    if (!obj)
        throw pfb::ConfigError("unknown objective \"" + name +
                               "\" (expected one of cmax sumc sumwc lmax sumt sumu sumwu)");
    return *obj;
}

std::uint64_t memory_cap_from_env() {
    if (const char* env = std::getenv("PFB_MEM_CAP")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw pfb::ConfigError("PFB_MEM_CAP must be a byte count, got \"" +
                                   std::string(env) + "\"");
        }
    }
    return pfb::DPOptions{}.memory_cap_bytes;
}

void dump_gamma(const pfb::Instance& inst) {
    const pfb::GammaSets gamma = pfb::compute_gamma(inst);
    for (int i = 0; i < gamma.machine_count(); ++i) {
        const auto& s = gamma.sets[i];
        std::cerr << "Gamma[" << (i + 1) << "]: size=" << s.size() << " min=" << s.front()
                  << " max=" << s.back() << "\n";
    }
}

// ---------------------------------------------------------------------------
// Gantt rendering: one row per job, one labeled box per (machine, batch)
// membership run, shaded pre-release region. Matches the usual job-oriented
// chart layout.

struct GanttBox {
    int machine;
    pfb::Time start;
    pfb::Time end;
    int row_top;   // first job row covered
    int row_len;   // contiguous rows covered
};

std::vector<GanttBox> gantt_boxes(const pfb::Instance& inst, const pfb::Schedule& s) {
    std::vector<GanttBox> boxes;
    for (int i = 0; i < inst.machine_count(); ++i) {
        for (const pfb::Batch& b : s.machines[i]) {
            // One box per contiguous run of job rows inside the batch.
            int run_start = b.jobs.front();
            int prev = run_start;
            auto flush = [&](int last) {
                boxes.push_back({i, b.start, b.start + inst.machines[i].p, run_start,
                                 last - run_start + 1});
            };
            for (std::size_t q = 1; q < b.jobs.size(); ++q) {
                if (b.jobs[q] != prev + 1) {
                    flush(prev);
                    run_start = b.jobs[q];
                }
                prev = b.jobs[q];
            }
            flush(prev);
        }
    }
    return boxes;
}

std::string gantt_svg(const pfb::Instance& inst, const pfb::Schedule& s) {
    const auto c = pfb::completion_matrix(inst, s);
    pfb::Time extent = 1;
    for (const auto& row : c)
        for (pfb::Time t : row) extent = std::max(extent, t);
    for (const pfb::Job& j : inst.jobs) extent = std::max(extent, j.r);

    const int n = inst.job_count();
    const double unit = 40.0, row_h = 30.0, left = 50.0, top = 20.0;
    const double width = left + unit * static_cast<double>(extent) + 20.0;
    const double height = top + row_h * n + 40.0;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "  <style>text{font-family:sans-serif;font-size:12px}"
           ".batch{fill:white;stroke:black}"
           ".release{fill:#333}.grid{stroke:#ddd;stroke-width:1}</style>\n";

    for (pfb::Time t = 0; t <= extent; ++t) {
        const double x = left + unit * static_cast<double>(t);
        svg << "  <line class=\"grid\" x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x
            << "\" y2=\"" << top + row_h * n << "\"/>\n";
        svg << "  <text x=\"" << x << "\" y=\"" << top + row_h * n + 16
            << "\" text-anchor=\"middle\">" << t << "</text>\n";
    }
    for (int j = 0; j < n; ++j) {
        svg << "  <text x=\"" << left - 8 << "\" y=\"" << top + row_h * j + row_h / 2 + 4
            << "\" text-anchor=\"end\">J" << (j + 1) << "</text>\n";
        if (inst.jobs[j].r > 0) {
            svg << "  <rect class=\"release\" x=\"" << left << "\" y=\"" << top + row_h * j
                << "\" width=\"" << unit * static_cast<double>(inst.jobs[j].r) << "\" height=\""
                << row_h << "\"/>\n";
        }
    }
    for (const GanttBox& box : gantt_boxes(inst, s)) {
        const double x = left + unit * static_cast<double>(box.start);
        const double y = top + row_h * box.row_top;
        const double w = unit * static_cast<double>(box.end - box.start);
        const double h = row_h * box.row_len;
        svg << "  <rect class=\"batch\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
            << "\" height=\"" << h << "\"/>\n";
        svg << "  <text x=\"" << x + w / 2 << "\" y=\"" << y + h / 2 + 4
            << "\" text-anchor=\"middle\">M" << (box.machine + 1) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string gantt_ascii(const pfb::Instance& inst, const pfb::Schedule& s) {
    const auto c = pfb::completion_matrix(inst, s);
    pfb::Time extent = 1;
    for (const auto& row : c)
        for (pfb::Time t : row) extent = std::max(extent, t);
    for (const pfb::Job& j : inst.jobs) extent = std::max(extent, j.r);

    const int n = inst.job_count();
    static const char* digits = "123456789abcdefghijklmnopqrstuvwxyz";
    std::vector<std::string> rows(n, std::string(static_cast<std::size_t>(extent), '.'));
    for (int j = 0; j < n; ++j)
        for (pfb::Time t = 0; t < inst.jobs[j].r; ++t) rows[j][static_cast<std::size_t>(t)] = '#';
    for (int i = 0; i < inst.machine_count(); ++i)
        for (const pfb::Batch& b : s.machines[i])
            for (int j : b.jobs)
                for (pfb::Time t = b.start; t < b.start + inst.machines[i].p; ++t)
                    rows[j][static_cast<std::size_t>(t)] = digits[i % 35];

    std::ostringstream out;
    out << "     ";
    for (pfb::Time t = 0; t <= extent; t += 5) {
        std::string mark = std::to_string(t);
        out << mark;
        const auto pad = static_cast<std::size_t>(5) - std::min<std::size_t>(5, mark.size());
        if (t + 5 <= extent) out << std::string(pad, ' ');
    }
    out << "\n";
    for (int j = 0; j < n; ++j) {
        std::ostringstream label;
        label << "J" << (j + 1);
        out << label.str() << std::string(4 - std::min<std::size_t>(4, label.str().size()), ' ')
            << "|" << rows[j] << "|\n";
    }
    out << "(cells: machine number while in a batch, # before release, . idle)\n";
    return out.str();
}

// ---------------------------------------------------------------------------

struct CommonSolveArgs {
    std::string instance_path;
    std::string objective = "cmax";
    std::string mode = "strict";
    bool dump_gamma_flag = false;
};

int run_solve(const CommonSolveArgs& args) {
    const pfb::Instance inst = pfb::load_instance_file(args.instance_path);
    auto errors = pfb::validate_instance(inst);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "invalid instance: " << e << "\n";
        return kExitError;
    }
    if (args.dump_gamma_flag) dump_gamma(inst);
    pfb::DPOptions options;
    options.memory_cap_bytes = memory_cap_from_env();
    const auto mode =
        args.mode == "heuristic" ? pfb::SolveMode::Heuristic : pfb::SolveMode::Strict;
    const pfb::SolveResult result = pfb::solve(inst, parse_objective(args.objective), mode, options);
    std::cout << pfb::dump_json(pfb::result_to_json(result));
    return kExitOk;
}

int run_verify(const CommonSolveArgs& args, const std::string& oracle_kind,
               pfb::OracleLimits limits) {
    const pfb::Instance inst = pfb::load_instance_file(args.instance_path);
    const pfb::Objective obj = parse_objective(args.objective);
    const auto mode =
        args.mode == "heuristic" ? pfb::SolveMode::Heuristic : pfb::SolveMode::Strict;
    pfb::DPOptions options;
    options.memory_cap_bytes = memory_cap_from_env();

    const pfb::SolveResult solver = pfb::solve(inst, obj, mode, options);
    pfb::SolveResult oracle;
    if (oracle_kind == "permutation") {
        auto order = pfb::order_for(inst, obj);
        oracle = pfb::oracle_permutation(
            inst, order ? order->perm : pfb::erd_order(inst).perm, obj, limits);
    } else if (oracle_kind == "best-order") {
        oracle = pfb::oracle_best_order(inst, obj, limits);
    } else {
        oracle = pfb::oracle_full(inst, obj, limits);
    }

    std::cout << "solver " << solver.value << (solver.exact ? " (exact)" : " (heuristic)")
              << ", oracle " << oracle.value << "\n";
    if (solver.value == oracle.value) {
        std::cout << "PASS (" << solver.value << " = " << oracle.value << ")\n";
        return kExitOk;
    }
    if (!solver.exact && solver.value >= oracle.value) {
        std::cout << "PASS solver " << solver.value << " >= oracle " << oracle.value
                  << ", heuristic gap " << (solver.value - oracle.value) << "\n";
        return kExitOk;
    }
    std::cout << "FAIL (" << solver.value << " != " << oracle.value << ")\n";
    return kExitError;
}

struct GenArgs {
    pfb::GenParams params;
    std::uint64_t seed = 0;
    std::string output;
    bool due_set = false;
    bool weight_set = false;
};

int run_gen(GenArgs& args) {
    args.params.with_due_dates = args.due_set;
    args.params.with_weights = args.weight_set;
    const pfb::Instance inst = pfb::generate_instance(args.params, args.seed);
    const std::string text = pfb::dump_json(pfb::instance_to_json(inst));
    if (args.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(args.output, std::ios::binary);
        if (!out) throw pfb::ConfigError("cannot write " + args.output);
        out << text;
    }
    return kExitOk;
}

int run_gantt(const std::string& instance_path, const std::string& schedule_path,
              const std::string& format) {
    const pfb::Instance inst = pfb::load_instance_file(instance_path);
    const pfb::Schedule sched = pfb::load_schedule_file(schedule_path);
    auto structure = pfb::validate_schedule_structure(inst, sched);
    if (!structure.empty()) {
        for (const auto& e : structure) std::cerr << "schedule/instance mismatch: " << e << "\n";
        return kExitError;
    }
    std::cout << (format == "ascii" ? gantt_ascii(inst, sched) : gantt_svg(inst, sched));
    return kExitOk;
}

struct BenchArgs {
    std::string instances_dir;
    std::vector<int> sweep_n;
    int m = 2;
    std::string objective = "cmax";
    std::uint64_t seed = 1;
    pfb::GenParams params;
    bool due_set = false;
    bool weight_set = false;
};

int run_bench(BenchArgs& args) {
    const pfb::Objective obj = parse_objective(args.objective);
    pfb::DPOptions options;
    options.memory_cap_bytes = memory_cap_from_env();
    std::cout << "n,m,objective,value,states,milliseconds\n";

    auto emit = [&](const pfb::Instance& inst) {
        const pfb::SolveResult r = pfb::solve(inst, obj, pfb::SolveMode::Strict, options);
        std::cout << inst.job_count() << "," << inst.machine_count() << "," << args.objective
                  << "," << r.value << "," << r.stats.states << "," << r.stats.wall_ms << "\n";
    };

    if (!args.instances_dir.empty()) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(args.instances_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& path : files) emit(pfb::load_instance_file(path.string()));
        return kExitOk;
    }
    args.params.with_due_dates = args.due_set;
    args.params.with_weights = args.weight_set;
    args.params.m = args.m;
    std::uint64_t seed = args.seed;
    for (int n : args.sweep_n) {
        args.params.n = n;
        emit(pfb::generate_instance(args.params, seed++));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact solvers for proportionate flow shops of batching machines"};
    app.require_subcommand(1);

    CommonSolveArgs solve_args;
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve an instance");
    solve_cmd->add_option("--instance", solve_args.instance_path, "instance JSON file")
        ->required();
    solve_cmd->add_option("--objective", solve_args.objective, "objective name")->required();
    solve_cmd->add_option("--mode", solve_args.mode, "strict or heuristic")
        ->check(CLI::IsMember({"strict", "heuristic"}));
    solve_cmd->add_flag("--dump-gamma", solve_args.dump_gamma_flag,
                        "print lattice sizes and extremes to stderr");

    CommonSolveArgs verify_args;
    std::string oracle_kind = "full";
    pfb::OracleLimits limits;
    CLI::App* verify_cmd = app.add_subcommand("verify", "solve and compare against an oracle");
    verify_cmd->add_option("--instance", verify_args.instance_path, "instance JSON file")
        ->required();
    verify_cmd->add_option("--objective", verify_args.objective, "objective name")->required();
    verify_cmd->add_option("--mode", verify_args.mode, "strict or heuristic")
        ->check(CLI::IsMember({"strict", "heuristic"}));
    verify_cmd->add_option("--oracle", oracle_kind, "full, permutation or best-order")
        ->check(CLI::IsMember({"full", "permutation", "best-order"}));
    verify_cmd->add_option("--max-jobs-full", limits.max_jobs_full, "cap for the full oracle");
    verify_cmd->add_option("--max-machines-full", limits.max_machines_full,
                           "machine cap for the full oracle");
    verify_cmd->add_option("--max-jobs-permutation", limits.max_jobs_permutation,
                           "cap for the fixed-order oracle");
    verify_cmd->add_option("--max-jobs-best-order", limits.max_jobs_best_order,
                           "cap for the all-orders oracle");

    GenArgs gen_args;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a random instance");
    gen_cmd->add_option("--seed", gen_args.seed, "rng seed")->required();
    gen_cmd->add_option("--n", gen_args.params.n, "number of jobs")->required();
    gen_cmd->add_option("--m", gen_args.params.m, "number of machines")->required();
    gen_cmd->add_option("--max-p", gen_args.params.max_p, "processing times in [1,max-p]");
    gen_cmd->add_option("--max-b", gen_args.params.max_b, "batch sizes in [1,max-b]");
    gen_cmd->add_option("--max-r", gen_args.params.max_r,
                        "release dates in [0,max-r]; 0 means all zero");
    auto* due_min = gen_cmd->add_option("--due-min", gen_args.params.due_min, "due dates from");
    gen_cmd->add_option("--due-max", gen_args.params.due_max, "due dates to")->needs(due_min);
    auto* w_min = gen_cmd->add_option("--weight-min", gen_args.params.weight_min, "weights from");
    gen_cmd->add_option("--weight-max", gen_args.params.weight_max, "weights to")->needs(w_min);
    gen_cmd->add_option("--output", gen_args.output, "write to file instead of stdout");

    std::string gantt_instance, gantt_schedule, gantt_format = "svg";
    CLI::App* gantt_cmd = app.add_subcommand("gantt", "render a schedule");
    gantt_cmd->add_option("--instance", gantt_instance, "instance JSON file")->required();
    gantt_cmd->add_option("--schedule", gantt_schedule,
                          "schedule JSON file (bare or solve output)")
        ->required();
    gantt_cmd->add_option("--format", gantt_format, "svg or ascii")
        ->check(CLI::IsMember({"svg", "ascii"}));

    BenchArgs bench_args;
    CLI::App* bench_cmd = app.add_subcommand("bench", "solve a sweep and print CSV");
    bench_cmd->add_option("--instances", bench_args.instances_dir,
                          "directory of instance JSON files");
    bench_cmd->add_option("--sweep-n", bench_args.sweep_n, "comma-separated job counts")
        ->delimiter(',');
    bench_cmd->add_option("--m", bench_args.m, "machines for generated instances");
    bench_cmd->add_option("--objective", bench_args.objective, "objective name");
    bench_cmd->add_option("--seed", bench_args.seed, "base seed");
    bench_cmd->add_option("--max-p", bench_args.params.max_p, "processing times in [1,max-p]");
    bench_cmd->add_option("--max-b", bench_args.params.max_b, "batch sizes in [1,max-b]");
    bench_cmd->add_option("--max-r", bench_args.params.max_r, "release dates in [0,max-r]");
    auto* bdue = bench_cmd->add_option("--due-min", bench_args.params.due_min, "due dates from");
    bench_cmd->add_option("--due-max", bench_args.params.due_max, "due dates to")->needs(bdue);
    auto* bw = bench_cmd->add_option("--weight-min", bench_args.params.weight_min, "weights from");
    bench_cmd->add_option("--weight-max", bench_args.params.weight_max, "weights to")->needs(bw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    gen_args.due_set = gen_cmd->count("--due-min") > 0;
    gen_args.weight_set = gen_cmd->count("--weight-min") > 0;
    bench_args.due_set = bench_cmd->count("--due-min") > 0;
    bench_args.weight_set = bench_cmd->count("--weight-min") > 0;

    try {
        if (solve_cmd->parsed()) return run_solve(solve_args);
        if (verify_cmd->parsed()) return run_verify(verify_args, oracle_kind, limits);
        if (gen_cmd->parsed()) return run_gen(gen_args);
        if (gantt_cmd->parsed()) return run_gantt(gantt_instance, gantt_schedule, gantt_format);
        if (bench_cmd->parsed()) return run_bench(bench_args);
    } catch (const pfb::NoCertifiedOrderError& e) {
        std::cerr << e.what() << "\n";
        return kExitNoCertified;
    } catch (const pfb::ResourceLimitError& e) {
        std::cerr << e.what() << "\n";
        return kExitResourceCap;
    } catch (const pfb::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
