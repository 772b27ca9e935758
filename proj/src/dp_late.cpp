#include "pfb/dp_late.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "dp_internal.hpp"
#include "pfb/errors.hpp"
#include "pfb/model.hpp"
#include "pfb/orderings.hpp"

namespace pfb {

namespace {

using Clock = std::chrono::steady_clock;
using detail::FirstDimMode;
using detail::MemoryBudget;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void require_late_instance(const Instance& inst) {
    auto errors = validate_instance(inst);
    if (!errors.empty()) throw ConfigError("invalid instance: " + errors.front());
    if (!inst.zero_release())
        throw PreconditionError("the late-jobs program requires all release dates to be zero");
    if (!inst.all_due_dates())
        throw ConfigError("the late-jobs program requires a due date for every job");
    if (!inst.all_weights())
        throw ConfigError("the late-jobs program requires a weight for every job");
}

// Candidate ordering for deterministic state tables: smaller value, then the
// back kind (alone < after < late), then the smaller predecessor key.
bool better(Value value, LateBackKind kind, std::uint64_t back, const LateEntry& e) {
    if (value != e.value) return value < e.value;
    if (kind != e.kind) return static_cast<int>(kind) < static_cast<int>(e.kind);
    return back < e.back;
}

void upsert(StateMap<LateEntry>& table, std::uint64_t key, Value value, std::uint64_t back,
            LateBackKind kind, MemoryBudget& budget) {
    auto [entry, inserted] = table.emplace(key);
    if (inserted) {
        budget.charge(1);
        *entry = {value, back, kind};
        return;
    }
    if (better(value, kind, back, *entry)) *entry = {value, back, kind};
}

std::vector<Value> weight_prefix_sums(const Instance& inst) {
    std::vector<Value> prefix(inst.job_count() + 1, 0);
    for (int j = 0; j < inst.job_count(); ++j) prefix[j + 1] = prefix[j] + *inst.jobs[j].w;
    return prefix;
}

LateDPStage start_stage(const Instance& inst, const GammaSets& gamma, MemoryBudget& budget) {
    LateDPStage stage;
    stage.job_position = 1;
    stage.codec = StateCodec(gamma, inst.machines, inst.job_count());
    detail::enumerate_start_states(
        gamma, inst.machines, /*release=*/0, /*pin_first_exact=*/false, *inst.jobs[0].d,
        [&](std::span<const int> t_idx, std::span<const int> k, Time) {
            upsert(stage.table, stage.codec.pack(t_idx, k), 0, LateEntry::kNoBack,
                   LateBackKind::OnTimeAlone, budget);
        });
    return stage;
}

LateDPStage step_stage(const Instance& inst, const GammaSets& gamma,
                       std::span<const Value> prefix_w, const LateDPStage& prev,
                       const LateOptions& options, MemoryBudget& budget) {
    LateDPStage stage;
    stage.job_position = prev.job_position + 1;
    stage.codec = prev.codec;
    const int j = stage.job_position;
    const Time due = *inst.jobs[j - 1].d;
    const Value weight = *inst.jobs[j - 1].w;
    const FirstDimMode mode =
        options.first_machine_lattice ? FirstDimMode::FullBatchStep : FirstDimMode::Free;
    const int m = inst.machine_count();

    // Job j late: carry every state, paying the weight.
    prev.table.for_each([&](std::uint64_t key, const LateEntry& entry) {
        upsert(stage.table, key, entry.value + weight, key, LateBackKind::Late, budget);
    });

    // Job j the only on-time job so far.
    detail::enumerate_start_states(
        gamma, inst.machines, /*release=*/0, /*pin_first_exact=*/false, due,
        [&](std::span<const int> t_idx, std::span<const int> k, Time) {
            upsert(stage.table, stage.codec.pack(t_idx, k), prefix_w[j - 1], LateEntry::kNoBack,
                   LateBackKind::OnTimeAlone, budget);
        });

    // Job j on time after the predecessor's last on-time job.
    std::vector<int> pt(m), pk(m);
    prev.table.for_each([&](std::uint64_t key, const LateEntry& entry) {
        prev.codec.unpack(key, pt, pk);
        detail::enumerate_successors(
            gamma, inst.machines, pt, pk, /*release=*/0, mode, due,
            [&](std::span<const int> t_idx, std::span<const int> k, Time) {
                upsert(stage.table, stage.codec.pack(t_idx, k), entry.value, key,
                       LateBackKind::OnTimeAfter, budget);
            });
    });
    return stage;
}

// Consecutive chunks of `jobs`, each of size at most cap.
std::vector<std::vector<int>> greedy_blocks(std::span<const int> jobs, int cap) {
    std::vector<std::vector<int>> blocks;
    for (std::size_t pos = 0; pos < jobs.size(); pos += cap) {
        const auto end = std::min(jobs.size(), pos + cap);
        blocks.emplace_back(jobs.begin() + pos, jobs.begin() + end);
    }
    return blocks;
}

}  // namespace

std::optional<LateEntry> LateDPStage::find(const GammaSets& gamma, std::span<const Time> t,
                                           std::span<const int> k) const {
    const int m = codec.machine_count();
    if (static_cast<int>(t.size()) != m || static_cast<int>(k.size()) != m) return std::nullopt;
    std::vector<int> t_idx(m);
    for (int i = 0; i < m; ++i) {
        auto idx = gamma.index_of(i, t[i]);
        if (!idx || k[i] < 1 || k[i] > codec.batch_radix(i)) return std::nullopt;
        t_idx[i] = *idx;
    }
    const LateEntry* entry = table.find(codec.pack(t_idx, k));
    if (!entry) return std::nullopt;
    return *entry;
}

void LateDPStage::for_each(const std::function<void(std::span<const int>, std::span<const int>,
                                                    const LateEntry&)>& fn) const {
    const int m = codec.machine_count();
    std::vector<int> t_idx(m), k(m);
    table.for_each([&](std::uint64_t key, const LateEntry& entry) {
        codec.unpack(key, t_idx, k);
        fn(t_idx, k, entry);
    });
}

GammaSets late_gamma(const Instance& inst, bool first_machine_lattice) {
    require_late_instance(inst);
    GammaSets gamma = compute_gamma(inst);
    if (first_machine_lattice) {
        const Time p1 = inst.machines[0].p;
        const std::int64_t n = inst.job_count();
        const std::int64_t batches = (n + inst.machines[0].b - 1) / inst.machines[0].b;
        std::vector<Time> lattice;
        lattice.reserve(batches);
        for (std::int64_t lambda = 1; lambda <= batches; ++lambda)
            lattice.push_back(lambda * p1);
        gamma.sets[0] = std::move(lattice);
    }
    return gamma;
}

std::optional<Value> x_value(const Instance& inst, const GammaSets& gamma, int j,
                             std::span<const Time> t, std::span<const int> k) {
    require_late_instance(inst);
    const int m = inst.machine_count();
    if (j < 1 || j > inst.job_count()) throw PreconditionError("job position out of range");
    if (static_cast<int>(t.size()) != m || static_cast<int>(k.size()) != m)
        throw PreconditionError("state dimension mismatch");
    for (int i = 0; i < m; ++i) {
        if (k[i] != 1) return std::nullopt;
        if (!gamma.contains(i, t[i])) return std::nullopt;
    }
    if (t[0] < inst.machines[0].p) return std::nullopt;
    for (int i = 0; i + 1 < m; ++i)
        if (t[i + 1] < t[i] + inst.machines[i + 1].p) return std::nullopt;
    if (t[m - 1] > *inst.jobs[j - 1].d) return std::nullopt;
    Value sum = 0;
    for (int pos = 0; pos + 1 < j; ++pos) sum += *inst.jobs[pos].w;
    return sum;
}

std::optional<Value> y_value(const Instance& inst, const GammaSets& gamma,
                             const LateDPStage& prev, int j, std::span<const Time> t,
                             std::span<const int> k) {
    require_late_instance(inst);
    const int m = inst.machine_count();
    if (j < 2 || j > inst.job_count()) throw PreconditionError("job position out of range");
    if (static_cast<int>(t.size()) != m || static_cast<int>(k.size()) != m)
        throw PreconditionError("state dimension mismatch");
    for (int i = 0; i < m; ++i) {
        if (k[i] < 1 || k[i] > inst.machines[i].b) return std::nullopt;
        if (!gamma.contains(i, t[i])) return std::nullopt;
    }
    if (t[0] < inst.machines[0].p) return std::nullopt;
    for (int i = 0; i + 1 < m; ++i)
        if (t[i + 1] < t[i] + inst.machines[i + 1].p) return std::nullopt;
    if (t[m - 1] > *inst.jobs[j - 1].d) return std::nullopt;

    std::optional<Value> best;
    std::vector<int> pt(m), pk(m);
    prev.table.for_each([&](std::uint64_t key, const LateEntry& entry) {
        (void)key;
        prev.codec.unpack(key, pt, pk);
        bool ok = true;
        for (int i = 0; i < m && ok; ++i) {
            const Time prev_time = gamma.sets[i][pt[i]];
            if (k[i] == 1)
                ok = prev_time <= t[i] - inst.machines[i].p;
            else
                ok = prev_time == t[i] && pk[i] == k[i] - 1;
        }
        if (ok && (!best || entry.value < *best)) best = entry.value;
    });
    return best;
}

LateDPStage late_start_values(const Instance& inst, const GammaSets& gamma,
                              const LateOptions& options) {
    require_late_instance(inst);
    MemoryBudget budget{options.memory_cap_bytes};
    return start_stage(inst, gamma, budget);
}

LateDPStage late_recurrence_step(const Instance& inst, const GammaSets& gamma,
                                 const LateDPStage& prev, const LateOptions& options) {
    require_late_instance(inst);
    if (prev.job_position < 1 || prev.job_position >= inst.job_count())
        throw PreconditionError("previous stage position out of range");
    MemoryBudget budget{options.memory_cap_bytes, prev.size()};
    return step_stage(inst, gamma, weight_prefix_sums(inst), prev, options, budget);
}

SolveResult solve_weighted_late(const Instance& inst, const LateOptions& options) {
    require_late_instance(inst);
    const auto t0 = Clock::now();
    const int n = inst.job_count();
    const int m = inst.machine_count();

    const JobOrder edd = edd_order(inst);
    Instance by_due = inst;
    for (int pos = 0; pos < n; ++pos) by_due.jobs[pos] = inst.jobs[edd.perm[pos]];

    const GammaSets gamma = late_gamma(by_due, options.first_machine_lattice);
    const auto prefix_w = weight_prefix_sums(by_due);
    MemoryBudget budget{options.memory_cap_bytes};

    std::vector<LateDPStage> stages;
    stages.reserve(n);
    stages.push_back(start_stage(by_due, gamma, budget));
    for (int j = 2; j <= n; ++j)
        stages.push_back(step_stage(by_due, gamma, prefix_w, stages.back(), options, budget));

    SolveResult result;
    result.exact = true;
    result.stats.stages = static_cast<std::uint64_t>(n);
    for (const LateDPStage& s : stages) {
        result.stats.per_stage_states.push_back(s.size());
        result.stats.states += s.size();
    }
    {
        __int128 bound = 1;
        for (int i = 0; i < m; ++i) {
            bound *= static_cast<__int128>(gamma.sets[i].size());
            bound *= static_cast<__int128>(inst.machines[i].b);
            if (bound > std::numeric_limits<std::uint64_t>::max()) {
                bound = std::numeric_limits<std::uint64_t>::max();
                break;
            }
        }
        result.stats.state_space_bound = static_cast<std::uint64_t>(bound);
    }

    std::vector<bool> on_time(n, false);
    std::vector<std::uint64_t> state_key(n, 0);

    if (stages.back().table.empty()) {
        // Every job late in every feasible schedule.
        result.value = prefix_w[n];
    } else {
        bool have = false;
        Value best_value = 0;
        std::uint64_t best_key = 0;
        stages.back().table.for_each([&](std::uint64_t key, const LateEntry& entry) {
            if (!have || entry.value < best_value ||
                (entry.value == best_value && key < best_key)) {
                have = true;
                best_value = entry.value;
                best_key = key;
            }
        });
        result.value = best_value;

        std::uint64_t key = best_key;
        for (int pos = n - 1; pos >= 0; --pos) {
            const LateEntry* found = stages[pos].table.find(key);
            if (!found) throw Error("late-jobs backtrack lost its state chain");
            const LateEntry& entry = *found;
            if (entry.kind == LateBackKind::Late) {
                key = entry.back;
                continue;
            }
            on_time[pos] = true;
            state_key[pos] = key;
            if (entry.kind == LateBackKind::OnTimeAlone) break;
            key = entry.back;
        }
    }

    // On-time jobs batch exactly as in the plain program: a unit batch-size
    // component opens a batch, anything larger joins the previous one.
    Schedule schedule;
    schedule.machines.resize(m);
    std::vector<int> t_idx(m), k(m);
    bool first_on_time = true;
    for (int pos = 0; pos < n; ++pos) {
        if (!on_time[pos]) continue;
        stages[pos].codec.unpack(state_key[pos], t_idx, k);
        for (int i = 0; i < m; ++i) {
            const Time completion = gamma.sets[i][t_idx[i]];
            if (first_on_time || k[i] == 1)
                schedule.machines[i].push_back(
                    Batch{completion - inst.machines[i].p, {edd.perm[pos]}});
            else
                schedule.machines[i].back().jobs.push_back(edd.perm[pos]);
        }
        first_on_time = false;
    }

    // Late jobs go after all on-time batches, in index order, greedily
    // filling batches; their placement cannot affect the objective.
    std::vector<int> late_jobs;
    for (int pos = 0; pos < n; ++pos)
        if (!on_time[pos]) late_jobs.push_back(edd.perm[pos]);
    if (!late_jobs.empty()) {
        std::vector<Time> late_done(n, 0);
        for (int i = 0; i < m; ++i) {
            Time machine_free = 0;
            for (const Batch& b : schedule.machines[i])
                machine_free = std::max(machine_free, b.start + inst.machines[i].p);
            for (auto& block : greedy_blocks(late_jobs, inst.machines[i].b)) {
                Time start = machine_free;
                for (int job : block) start = std::max(start, late_done[job]);
                for (int job : block) late_done[job] = start + inst.machines[i].p;
                machine_free = start + inst.machines[i].p;
                Batch b;
                b.start = start;
                b.jobs = block;
                std::sort(b.jobs.begin(), b.jobs.end());
                schedule.machines[i].push_back(std::move(b));
            }
        }
    }
    for (auto& machine : schedule.machines)
        for (Batch& b : machine) std::sort(b.jobs.begin(), b.jobs.end());

    result.schedule = batch_active_retiming(inst, schedule);
    result.stats.wall_ms = elapsed_ms(t0);
    return result;
}

}  // namespace pfb
