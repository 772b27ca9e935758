#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pfb/generator.hpp"
#include "pfb/model.hpp"
#include "pfb/oracle.hpp"
#include "pfb/types.hpp"

namespace fixtures {

// Five jobs, two machines: p=(2,3), b=(3,4), r=(0,0,1,1,2). Optimal makespan 8.
inline pfb::Instance example1() {
    pfb::Instance inst;
    inst.machines = {{2, 3}, {3, 4}};
    inst.jobs = {{0, {}, {}}, {0, {}, {}}, {1, {}, {}}, {1, {}, {}}, {2, {}, {}}};
    return inst;
}

// Feasible but suboptimal schedule for example1 (makespan 9):
// M1 {1,2,3}@1 {4,5}@3, M2 {1}@3 {2,3,4,5}@6.
inline pfb::Schedule example1_slow_schedule() {
    pfb::Schedule s;
    s.machines = {{{1, {0, 1, 2}}, {3, {3, 4}}}, {{3, {0}}, {6, {1, 2, 3, 4}}}};
    return s;
}

// Makespan-optimal schedule for example1 (makespan 8):
// M1 {1,2}@0 {3,4,5}@2, M2 {1,2}@2 {3,4,5}@5.
inline pfb::Schedule example1_fast_schedule() {
    pfb::Schedule s;
    s.machines = {{{0, {0, 1}}, {2, {2, 3, 4}}}, {{2, {0, 1}}, {5, {2, 3, 4}}}};
    return s;
}

// Two jobs on a 3-machine chain (b=p=1 on machines 1 and 3, b=p=2 on
// machine 2), r=(0,1), d=(6,5), w=(1,3). No permutation schedule reaches
// Lmax 0 or weighted completion 21.
inline pfb::Instance example2() {
    pfb::Instance inst;
    inst.machines = {{1, 1}, {2, 2}, {1, 1}};
    inst.jobs = {{0, 6, 1}, {1, 5, 3}};
    return inst;
}

// The non-permutation schedule reaching Lmax 0 / sum w_j C_j 21:
// M1 {1}@0 {2}@1, M2 {1,2}@2, M3 {2}@4 {1}@5.
inline pfb::Schedule example2_nonperm_schedule() {
    pfb::Schedule s;
    s.machines = {{{0, {0}}, {1, {1}}}, {{2, {0, 1}}}, {{4, {1}}, {5, {0}}}};
    return s;
}

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    std::int64_t draw(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

struct RandomSpec {
    int max_n = 5;
    int max_m = 3;
    pfb::Time max_p = 4;
    int max_b = 4;
    pfb::Time max_r = 4;      // 0 forces zero release dates
    bool with_due = false;
    bool with_weights = false;
};

inline pfb::Instance random_instance(std::uint64_t seed, const RandomSpec& spec) {
    Rng rng(seed);
    pfb::GenParams params;
    params.n = static_cast<int>(rng.draw(1, spec.max_n));
    params.m = static_cast<int>(rng.draw(1, spec.max_m));
    params.max_p = spec.max_p;
    params.max_b = spec.max_b;
    params.max_r = spec.max_r;
    if (spec.with_due) {
        params.with_due_dates = true;
        params.due_min = 1;
        params.due_max = spec.max_r + params.n * spec.max_p * params.m;
    }
    if (spec.with_weights) {
        params.with_weights = true;
        params.weight_min = 0;
        params.weight_max = 9;
    }
    return pfb::generate_instance(params, rng.eng());
}

// A random batch-active feasible schedule: per machine an independent random
// ordered partition of the shuffled job list, timed batch-actively.
inline pfb::Schedule random_feasible_schedule(const pfb::Instance& inst, std::uint64_t seed) {
    Rng rng(seed);
    pfb::BatchSequencePlan plan;
    plan.machines.resize(inst.machine_count());
    for (int i = 0; i < inst.machine_count(); ++i) {
        std::vector<int> jobs(inst.job_count());
        std::iota(jobs.begin(), jobs.end(), 0);
        std::shuffle(jobs.begin(), jobs.end(), rng.eng);
        std::size_t pos = 0;
        while (pos < jobs.size()) {
            const auto size = static_cast<std::size_t>(
                rng.draw(1, std::min<std::int64_t>(inst.machines[i].b,
                                                   static_cast<std::int64_t>(jobs.size() - pos))));
            plan.machines[i].emplace_back(jobs.begin() + pos, jobs.begin() + pos + size);
            pos += size;
        }
    }
    return pfb::compute_timing(inst, plan);
}

// Same, but with random idle time inserted in front of batches; stays
// feasible, generally not batch-active.
inline pfb::Schedule random_delayed_schedule(const pfb::Instance& inst, std::uint64_t seed) {
    Rng rng(seed);
    pfb::Schedule s = random_feasible_schedule(inst, rng.eng());
    std::vector<pfb::Time> prev_completion(inst.job_count());
    for (int j = 0; j < inst.job_count(); ++j) prev_completion[j] = inst.jobs[j].r;
    for (int i = 0; i < inst.machine_count(); ++i) {
        const pfb::Time p = inst.machines[i].p;
        pfb::Time machine_free = 0;
        bool first = true;
        for (pfb::Batch& b : s.machines[i]) {
            pfb::Time start = first ? 0 : machine_free;
            for (int j : b.jobs) start = std::max(start, prev_completion[j]);
            b.start = start + rng.draw(0, 3);
            machine_free = b.start + p;
            first = false;
        }
        for (const pfb::Batch& b : s.machines[i])
            for (int j : b.jobs) prev_completion[j] = b.start + p;
    }
    return s;
}

// An earliest-release-date order with ties shuffled.
inline std::vector<int> random_erd_order(const pfb::Instance& inst, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> order(inst.job_count());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.eng);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return inst.jobs[a].r < inst.jobs[b].r; });
    return order;
}

inline std::vector<pfb::Time> sorted_completions(const pfb::Instance& inst,
                                                 const pfb::Schedule& s) {
    auto c = pfb::completion_matrix(inst, s).back();
    std::sort(c.begin(), c.end());
    return c;
}

// Minimal XML well-formedness check: declaration, balanced quoted attributes,
// matching tag nesting.
inline bool xml_well_formed(const std::string& text) {
    std::vector<std::string> stack;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t lt = text.find('<', pos);
        if (lt == std::string::npos) break;
        std::size_t gt = lt + 1;
        bool in_quote = false;
        while (gt < text.size() && (in_quote || text[gt] != '>')) {
            if (text[gt] == '"') in_quote = !in_quote;
            ++gt;
        }
        if (gt >= text.size()) return false;
        std::string tag = text.substr(lt + 1, gt - lt - 1);
        pos = gt + 1;
        if (tag.empty()) return false;
        if (tag.front() == '?' || tag.front() == '!') continue;
        if (tag.front() == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return false;
            stack.pop_back();
            continue;
        }
        if (tag.back() == '/') continue;  // self-closing
        std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
        stack.push_back(name);
    }
    return stack.empty();
}

}  // namespace fixtures
