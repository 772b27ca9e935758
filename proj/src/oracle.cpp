#include "pfb/oracle.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>

#include "pfb/errors.hpp"
#include "pfb/model.hpp"

namespace pfb {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void require_fields(const Instance& inst, const Objective& obj) {
    if (needs_due_dates(obj) && !inst.all_due_dates())
        throw ConfigError("objective " + objective_name(obj) + " requires a due date for every job");
    if (needs_weights(obj) && !inst.all_weights())
        throw ConfigError("objective " + objective_name(obj) + " requires a weight for every job");
}

void require_valid(const Instance& inst) {
    auto errors = validate_instance(inst);
    if (!errors.empty()) throw ConfigError("invalid instance: " + errors.front());
}

// Row evaluator with field checks hoisted out of the enumeration loop.
std::function<Value(const Time*)> row_evaluator(const Instance& inst, const Objective& obj) {
    require_fields(inst, obj);
    const int n = inst.job_count();
    std::vector<Time> d(n, 0);
    std::vector<Value> w(n, 0);
    for (int j = 0; j < n; ++j) {
        d[j] = inst.jobs[j].d.value_or(0);
        w[j] = inst.jobs[j].w.value_or(0);
    }
    switch (obj.kind) {
        case ObjectiveKind::Cmax:
            return [n](const Time* c) { return *std::max_element(c, c + n); };
        case ObjectiveKind::SumC:
            return [n](const Time* c) { return std::accumulate(c, c + n, Value{0}); };
        case ObjectiveKind::SumWC:
            return [n, w](const Time* c) {
                Value v = 0;
                for (int j = 0; j < n; ++j) v += w[j] * c[j];
                return v;
            };
        case ObjectiveKind::Lmax:
            return [n, d](const Time* c) {
                Value v = c[0] - d[0];
                for (int j = 1; j < n; ++j) v = std::max(v, c[j] - d[j]);
                return v;
            };
        case ObjectiveKind::SumT:
            return [n, d](const Time* c) {
                Value v = 0;
                for (int j = 0; j < n; ++j) v += std::max<Value>(0, c[j] - d[j]);
                return v;
            };
        case ObjectiveKind::SumU:
            return [n, d](const Time* c) {
                Value v = 0;
                for (int j = 0; j < n; ++j) v += c[j] > d[j] ? 1 : 0;
                return v;
            };
        case ObjectiveKind::SumWU:
            return [n, d, w](const Time* c) {
                Value v = 0;
                for (int j = 0; j < n; ++j) v += c[j] > d[j] ? w[j] : 0;
                return v;
            };
        case ObjectiveKind::Custom: {
            if (!obj.cost) throw ConfigError("custom objective has no cost function");
            auto cost = obj.cost;
            bool is_sum = obj.aggregator == Aggregator::Sum;
            return [n, cost, is_sum](const Time* c) {
                Value v = cost(0, c[0]);
                for (int j = 1; j < n; ++j)
                    v = is_sum ? v + cost(j, c[j]) : std::max(v, cost(j, c[j]));
                return v;
            };
        }
    }
    throw ConfigError("unknown objective");
}

// All compositions of n into parts of size 1..max_part, in a fixed order.
std::vector<std::vector<int>> compositions(int n, int max_part) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int rem) {
        if (rem == 0) {
            out.push_back(cur);
            return;
        }
        for (int part = 1; part <= std::min(rem, max_part); ++part) {
            cur.push_back(part);
            rec(rem - part);
            cur.pop_back();
        }
    };
    rec(n);
    return out;
}

// All ordered partitions of {0..n-1} into nonempty blocks of size <= max_block,
// each block a bitmask, in a fixed enumeration order.
std::vector<std::vector<std::uint32_t>> ordered_partitions(int n, int max_block) {
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> cur;
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
    std::function<void(std::uint32_t)> rec = [&](std::uint32_t rem) {
        if (rem == 0) {
            out.push_back(cur);
            return;
        }
        for (std::uint32_t sub = rem; sub; sub = (sub - 1) & rem) {
            if (std::popcount(sub) > max_block) continue;
            cur.push_back(sub);
            rec(rem & ~sub);
            cur.pop_back();
        }
    };
    rec(full);
    return out;
}

std::vector<int> mask_jobs(std::uint32_t mask) {
    std::vector<int> jobs;
    while (mask) {
        jobs.push_back(std::countr_zero(mask));
        mask &= mask - 1;
    }
    return jobs;
}

struct Best {
    bool set = false;
    Value value = 0;
    std::vector<int> choice;  // per-machine index into that machine's plan list

    void offer(Value v, const std::vector<int>& c) {
        if (!set || v < value) {
            set = true;
            value = v;
            choice = c;
        }
    }
};

struct TimeVecHash {
    std::size_t operator()(const std::vector<Time>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (Time t : v) {
            h ^= static_cast<std::size_t>(t);
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace

Schedule compute_timing(const Instance& inst, const BatchSequencePlan& plan) {
    Schedule s;
    s.machines.resize(plan.machines.size());
    for (std::size_t i = 0; i < plan.machines.size(); ++i)
        for (const auto& jobs : plan.machines[i]) {
            Batch b;
            b.jobs = jobs;
            std::sort(b.jobs.begin(), b.jobs.end());
            s.machines[i].push_back(std::move(b));
        }
    return batch_active_retiming(inst, s);
}

SolveResult oracle_permutation(const Instance& inst, std::span<const int> order,
                               const Objective& obj, const OracleLimits& limits) {
    require_valid(inst);
    const int n = inst.job_count();
    const int m = inst.machine_count();
    if (n > limits.max_jobs_permutation)
        throw ResourceLimitError("oracle_permutation cap exceeded: n=" + std::to_string(n) +
                                 " > max_jobs_permutation=" +
                                 std::to_string(limits.max_jobs_permutation));
    if (static_cast<int>(order.size()) != n)
        throw PreconditionError("order must be a permutation of all jobs");
    {
        std::vector<int> seen(n, 0);
        for (int j : order)
            if (j < 0 || j >= n || seen[j]++)
                throw PreconditionError("order must be a permutation of all jobs");
    }
    auto eval = row_evaluator(inst, obj);
    const auto t0 = Clock::now();

    std::vector<std::vector<std::vector<int>>> comps(m);
    for (int i = 0; i < m; ++i)
        comps[i] = compositions(n, std::min(inst.machines[i].b, n));

    // comp[i][j] = completion of job j after machine i (comp[0] = release dates)
    std::vector<std::vector<Time>> comp(m + 1, std::vector<Time>(n));
    for (int j = 0; j < n; ++j) comp[0][j] = inst.jobs[j].r;

    Best best;
    std::vector<int> choice(m, 0);
    std::uint64_t leaves = 0;
    std::function<void(int)> rec = [&](int i) {
        if (i == m) {
            ++leaves;
            best.offer(eval(comp[m].data()), choice);
            return;
        }
        const Time p = inst.machines[i].p;
        for (std::size_t ci = 0; ci < comps[i].size(); ++ci) {
            choice[i] = static_cast<int>(ci);
            Time machine_free = 0;
            int pos = 0;
            bool first = true;
            for (int part : comps[i][ci]) {
                Time start = first ? 0 : machine_free;
                for (int q = pos; q < pos + part; ++q)
                    start = std::max(start, comp[i][order[q]]);
                for (int q = pos; q < pos + part; ++q) comp[i + 1][order[q]] = start + p;
                machine_free = start + p;
                pos += part;
                first = false;
            }
            rec(i + 1);
        }
    };
    rec(0);

    BatchSequencePlan plan;
    plan.machines.resize(m);
    for (int i = 0; i < m; ++i) {
        int pos = 0;
        for (int part : comps[i][best.choice[i]]) {
            plan.machines[i].emplace_back(order.begin() + pos, order.begin() + pos + part);
            pos += part;
        }
    }
    SolveResult result;
    result.schedule = compute_timing(inst, plan);
    result.value = best.value;
    result.exact = false;
    result.stats.states = leaves;
    result.stats.wall_ms = elapsed_ms(t0);
    return result;
}

std::vector<SolveResult> oracle_full_multi(const Instance& inst,
                                           std::span<const Objective> objectives,
                                           const OracleLimits& limits) {
    require_valid(inst);
    const int n = inst.job_count();
    const int m = inst.machine_count();
    if (n > limits.max_jobs_full)
        throw ResourceLimitError("oracle_full cap exceeded: n=" + std::to_string(n) +
                                 " > max_jobs_full=" + std::to_string(limits.max_jobs_full));
    if (m > limits.max_machines_full)
        throw ResourceLimitError("oracle_full cap exceeded: m=" + std::to_string(m) +
                                 " > max_machines_full=" + std::to_string(limits.max_machines_full));

    std::vector<std::function<Value(const Time*)>> evals;
    for (const Objective& obj : objectives) evals.push_back(row_evaluator(inst, obj));
    const auto t0 = Clock::now();

    // Partition lists are shared between machines with equal capacity.
    std::map<int, std::vector<std::vector<std::uint32_t>>> by_capacity;
    std::vector<const std::vector<std::vector<std::uint32_t>>*> osps(m);
    for (int i = 0; i < m; ++i) {
        const int cap = std::min(inst.machines[i].b, n);
        auto it = by_capacity.find(cap);
        if (it == by_capacity.end())
            it = by_capacity.emplace(cap, ordered_partitions(n, cap)).first;
        osps[i] = &it->second;
    }

    std::vector<std::vector<Time>> comp(m + 1, std::vector<Time>(n));
    for (int j = 0; j < n; ++j) comp[0][j] = inst.jobs[j].r;

    auto time_machine = [&](int i, std::size_t ci) {
        const Time p = inst.machines[i].p;
        const Time* prev = comp[i].data();
        Time* cur = comp[i + 1].data();
        Time machine_free = 0;
        bool first = true;
        for (std::uint32_t block : (*osps[i])[ci]) {
            Time start = first ? 0 : machine_free;
            for (std::uint32_t rest = block; rest; rest &= rest - 1)
                start = std::max(start, prev[std::countr_zero(rest)]);
            const Time done = start + p;
            for (std::uint32_t rest = block; rest; rest &= rest - 1)
                cur[std::countr_zero(rest)] = done;
            machine_free = done;
            first = false;
        }
    };

    std::vector<Best> best(evals.size());
    std::vector<int> choice(m, 0);
    std::uint64_t leaves = 0;

    // The last machine's best response depends only on the completion vector
    // entering it, so identical prefixes share one exhaustive scan. Results
    // and witnesses match the plain full enumeration exactly.
    using LastBest = std::vector<std::pair<Value, int>>;  // per objective: (value, osp index)
    std::unordered_map<std::vector<Time>, LastBest, TimeVecHash> last_cache;
    const auto& last_list = *osps[m - 1];

    std::function<void(int)> rec = [&](int i) {
        if (i == m - 1) {
            leaves += last_list.size();
            auto [it, inserted] = last_cache.try_emplace(comp[m - 1]);
            if (inserted) {
                LastBest& lb = it->second;
                lb.assign(evals.size(), {0, -1});
                for (std::size_t ci = 0; ci < last_list.size(); ++ci) {
                    time_machine(m - 1, ci);
                    for (std::size_t o = 0; o < evals.size(); ++o) {
                        const Value v = evals[o](comp[m].data());
                        if (lb[o].second < 0 || v < lb[o].first)
                            lb[o] = {v, static_cast<int>(ci)};
                    }
                }
            }
            for (std::size_t o = 0; o < evals.size(); ++o) {
                choice[m - 1] = it->second[o].second;
                best[o].offer(it->second[o].first, choice);
            }
            return;
        }
        for (std::size_t ci = 0; ci < osps[i]->size(); ++ci) {
            choice[i] = static_cast<int>(ci);
            time_machine(i, ci);
            rec(i + 1);
        }
    };
    rec(0);

    std::vector<SolveResult> results;
    for (const Best& b : best) {
        BatchSequencePlan plan;
        plan.machines.resize(m);
        for (int i = 0; i < m; ++i)
            for (std::uint32_t block : (*osps[i])[b.choice[i]])
                plan.machines[i].push_back(mask_jobs(block));
        SolveResult result;
        result.schedule = compute_timing(inst, plan);
        result.value = b.value;
        result.exact = true;
        result.stats.states = leaves;
        result.stats.wall_ms = elapsed_ms(t0);
        results.push_back(std::move(result));
    }
    return results;
}

SolveResult oracle_full(const Instance& inst, const Objective& obj, const OracleLimits& limits) {
    return oracle_full_multi(inst, std::span<const Objective>(&obj, 1), limits)[0];
}

SolveResult oracle_best_order(const Instance& inst, const Objective& obj,
                              const OracleLimits& limits) {
    require_valid(inst);
    const int n = inst.job_count();
    if (n > limits.max_jobs_best_order)
        throw ResourceLimitError("oracle_best_order cap exceeded: n=" + std::to_string(n) +
                                 " > max_jobs_best_order=" +
                                 std::to_string(limits.max_jobs_best_order));
    require_fields(inst, obj);
    const auto t0 = Clock::now();

    OracleLimits inner = limits;
    inner.max_jobs_permutation = std::max(inner.max_jobs_permutation, n);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    SolveResult best;
    bool have = false;
    std::uint64_t leaves = 0;
    do {
        SolveResult r = oracle_permutation(inst, perm, obj, inner);
        leaves += r.stats.states;
        if (!have || r.value < best.value) {
            best = std::move(r);
            have = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    best.exact = inst.zero_release();  // permutation schedules are globally optimal there
    best.stats.states = leaves;
    best.stats.wall_ms = elapsed_ms(t0);
    return best;
}

}  // namespace pfb
