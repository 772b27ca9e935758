#include "pfb/dp.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <limits>

#include "dp_internal.hpp"
#include "pfb/dp_late.hpp"
#include "pfb/errors.hpp"
#include "pfb/model.hpp"
#include "pfb/orderings.hpp"

namespace pfb {

namespace {

using Clock = std::chrono::steady_clock;
using detail::MemoryBudget;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void require_valid(const Instance& inst) {
    auto errors = validate_instance(inst);
    if (!errors.empty()) throw ConfigError("invalid instance: " + errors.front());
}

void require_permutation(const Instance& inst, std::span<const int> order) {
    const int n = inst.job_count();
    if (static_cast<int>(order.size()) != n)
        throw PreconditionError("order must be a permutation of all jobs");
    std::vector<int> seen(n, 0);
    for (int j : order)
        if (j < 0 || j >= n || seen[j]++)
            throw PreconditionError("order must be a permutation of all jobs");
}

Value combine(Aggregator agg, Value a, Value b) {
    return agg == Aggregator::Sum ? a + b : std::max(a, b);
}

void upsert(StateMap<DPEntry>& table, std::uint64_t key, Value value, std::uint64_t back,
            MemoryBudget& budget) {
    auto [entry, inserted] = table.emplace(key);
    if (inserted) {
        budget.charge(1);
        *entry = {value, back};
        return;
    }
    if (value < entry->value || (value == entry->value && back < entry->back))
        *entry = {value, back};
}

void check_pin(const Instance& inst, const DPOptions& options) {
    if (options.pin_first_machine && !inst.zero_release())
        throw PreconditionError("pin_first_machine requires all release dates to be zero");
}

DPStage start_stage(const Instance& inst, const GammaSets& gamma, std::span<const int> order,
                    const ObjectiveSpec& spec, const DPOptions& options, MemoryBudget& budget) {
    DPStage stage;
    stage.job_position = 1;
    stage.codec = StateCodec(gamma, inst.machines, inst.job_count());
    const int first_job = order[0];
    detail::enumerate_start_states(
        gamma, inst.machines, inst.jobs[first_job].r, options.pin_first_machine, detail::kNoTimeCap,
        [&](std::span<const int> t_idx, std::span<const int> k, Time t_m) {
            upsert(stage.table, stage.codec.pack(t_idx, k), spec.cost(first_job, t_m),
                   DPEntry::kNoBack, budget);
        });
    return stage;
}

// One recurrence step, processed dimension by dimension: a working table
// whose keys mix already-advanced (successor) coordinates with not-yet
// advanced (predecessor) ones. Per dimension, a state either keeps its batch
// (size + 1, same completion) or opens a fresh batch at any lattice time at
// least one processing time later; the open-batch minima are shared through
// a running prefix minimum per residual key, which is what keeps the step
// near-linear in the table sizes. Entries carry the original predecessor key
// throughout, so the final backpointer is the predecessor with the smallest
// (value, state) pair, a deterministic minimizer of the recurrence.
DPStage step_stage(const Instance& inst, const GammaSets& gamma, std::span<const int> order,
                   const ObjectiveSpec& spec, const DPStage& prev, const DPOptions& options,
                   MemoryBudget& budget) {
    DPStage stage;
    stage.job_position = prev.job_position + 1;
    stage.codec = prev.codec;
    const int job = order[stage.job_position - 1];
    const Time release = inst.jobs[job].r;
    const int m = inst.machine_count();
    const std::uint64_t retained_before = budget.used_states;

    StateMap<DPEntry> work;
    work.reserve(prev.table.size());
    prev.table.for_each([&](std::uint64_t key, const DPEntry& entry) {
        *work.emplace(key).first = DPEntry{entry.value, key};
    });

    struct OpenCell {
        std::uint64_t rest;  // state key with this dimension's digits zeroed
        int t_idx;
        DPEntry entry;
    };

    std::vector<int> t_idx(m), k(m);
    std::vector<OpenCell> cells;
    for (int dim = 0; dim < m; ++dim) {
        StateMap<DPEntry> next;
        next.reserve(work.size());
        const Time p = inst.machines[dim].p;
        const int b = inst.machines[dim].b;
        const auto& lattice = gamma.sets[dim];
        const bool pinned = options.pin_first_machine && dim == 0;
        cells.clear();

        work.for_each([&](std::uint64_t key, const DPEntry& entry) {
            stage.codec.unpack(key, t_idx, k);
            const Time lb = (dim == 0 ? release : gamma.sets[dim - 1][t_idx[dim - 1]]) + p;
            const Time t_time = lattice[t_idx[dim]];
            if (k[dim] < b && t_time >= lb) {  // job joins the batch
                k[dim] += 1;
                upsert(next, stage.codec.pack(t_idx, k), entry.value, entry.back, budget);
                k[dim] -= 1;
            }
            if (pinned) {  // open only when the previous batch is full, one step later
                if (k[0] == b) {
                    const Time target = t_time + p;
                    if (target >= lb) {
                        if (auto idx = gamma.index_of(0, target)) {
                            t_idx[0] = *idx;
                            k[0] = 1;
                            upsert(next, stage.codec.pack(t_idx, k), entry.value, entry.back,
                                   budget);
                        }
                    }
                }
            } else {
                const int saved_t = t_idx[dim];
                const int saved_k = k[dim];
                t_idx[dim] = 0;
                k[dim] = 1;
                cells.push_back({stage.codec.pack(t_idx, k), saved_t, {entry.value, entry.back}});
                t_idx[dim] = saved_t;
                k[dim] = saved_k;
            }
        });

        // Fresh batches: group predecessors by the residual key and sweep the
        // lattice once per group with a running minimum over eligible
        // predecessor completion times.
        std::sort(cells.begin(), cells.end(), [](const OpenCell& a, const OpenCell& b2) {
            return a.rest != b2.rest ? a.rest < b2.rest : a.t_idx < b2.t_idx;
        });
        for (std::size_t lo = 0; lo < cells.size();) {
            std::size_t hi = lo;
            while (hi < cells.size() && cells[hi].rest == cells[lo].rest) ++hi;
            stage.codec.unpack(cells[lo].rest, t_idx, k);
            const Time lb = (dim == 0 ? release : gamma.sets[dim - 1][t_idx[dim - 1]]) + p;
            const Time first_open = std::max(lb, lattice[cells[lo].t_idx] + p);
            auto it = std::lower_bound(lattice.begin(), lattice.end(), first_open);
            std::size_t q = lo;
            DPEntry best = cells[lo].entry;
            for (; it != lattice.end(); ++it) {
                while (q + 1 < hi && lattice[cells[q + 1].t_idx] + p <= *it) {
                    ++q;
                    const DPEntry& e = cells[q].entry;
                    if (e.value < best.value || (e.value == best.value && e.back < best.back))
                        best = e;
                }
                t_idx[dim] = static_cast<int>(it - lattice.begin());
                upsert(next, stage.codec.pack(t_idx, k), best.value, best.back, budget);
            }
            lo = hi;
        }
        work = std::move(next);
    }

    work.for_each_mutable([&](std::uint64_t key, DPEntry& entry) {
        stage.codec.unpack(key, t_idx, k);
        const Time t_m = gamma.sets[m - 1][t_idx[m - 1]];
        entry.value = combine(spec.aggregator, spec.cost(job, t_m), entry.value);
    });
    stage.table = std::move(work);
    budget.used_states = retained_before + stage.table.size();
    return stage;
}

std::uint64_t state_space_bound(const GammaSets& gamma, std::span<const MachineConfig> machines) {
    __int128 bound = 1;
    for (std::size_t i = 0; i < machines.size(); ++i) {
        bound *= static_cast<__int128>(gamma.sets[i].size());
        bound *= static_cast<__int128>(machines[i].b);
        if (bound > std::numeric_limits<std::uint64_t>::max())
            return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(bound);
}

}  // namespace

ObjectiveSpec make_objective_spec(const Instance& inst, const Objective& obj) {
    if (needs_due_dates(obj) && !inst.all_due_dates())
        throw ConfigError("objective " + objective_name(obj) + " requires a due date for every job");
    if (needs_weights(obj) && !inst.all_weights())
        throw ConfigError("objective " + objective_name(obj) + " requires a weight for every job");

    const int n = inst.job_count();
    std::vector<Time> d(n, 0);
    std::vector<Value> w(n, 0);
    for (int j = 0; j < n; ++j) {
        d[j] = inst.jobs[j].d.value_or(0);
        w[j] = inst.jobs[j].w.value_or(0);
    }
    switch (obj.kind) {
        case ObjectiveKind::Cmax:
            return {Aggregator::Max, [](int, Time c) { return c; }};
        case ObjectiveKind::SumC:
            return {Aggregator::Sum, [](int, Time c) { return c; }};
        case ObjectiveKind::SumWC:
            return {Aggregator::Sum, [w](int j, Time c) { return w[j] * c; }};
        case ObjectiveKind::Lmax:
            return {Aggregator::Max, [d](int j, Time c) { return c - d[j]; }};
        case ObjectiveKind::SumT:
            return {Aggregator::Sum, [d](int j, Time c) { return std::max<Value>(0, c - d[j]); }};
        case ObjectiveKind::SumU:
            return {Aggregator::Sum, [d](int j, Time c) -> Value { return c > d[j] ? 1 : 0; }};
        case ObjectiveKind::SumWU:
            return {Aggregator::Sum,
                    [d, w](int j, Time c) -> Value { return c > d[j] ? w[j] : 0; }};
        case ObjectiveKind::Custom: {
            if (!obj.cost) throw ConfigError("custom objective has no cost function");
#ifndef NDEBUG
            // Spot-check that sampled costs are nondecreasing in the completion time.
            const Time probe = inst.completion_bound();
            for (int j = 0; j < std::min(n, 4); ++j)
                for (Time c = 1; c < probe; c = c * 2 + 1)
                    assert(obj.cost(j, c) <= obj.cost(j, std::min(c * 2 + 1, probe)));
#endif
            return {obj.aggregator, obj.cost};
        }
    }
    throw ConfigError("unknown objective");
}

StateCodec::StateCodec(const GammaSets& gamma, std::span<const MachineConfig> machines, int jobs) {
    m_ = static_cast<int>(machines.size());
    radix_.resize(2 * m_);
    for (int i = 0; i < m_; ++i) {
        radix_[i] = gamma.sets[i].size();
        radix_[m_ + i] =
            static_cast<std::uint64_t>(std::min<std::int64_t>(machines[i].b, jobs));
    }
    stride_.resize(2 * m_);
    __int128 acc = 1;
    for (int digit = 2 * m_ - 1; digit >= 0; --digit) {
        stride_[digit] = static_cast<std::uint64_t>(acc);
        acc *= static_cast<__int128>(radix_[digit]);
        if (acc > (__int128{1} << 62))
            throw ResourceLimitError(
                "dp state key space exceeds 2^62; the state tables cannot fit any memory cap");
    }
}

std::uint64_t StateCodec::pack(std::span<const int> t_idx, std::span<const int> k) const {
    std::uint64_t key = 0;
    for (int i = 0; i < m_; ++i) {
        key += static_cast<std::uint64_t>(t_idx[i]) * stride_[i];
        key += static_cast<std::uint64_t>(k[i] - 1) * stride_[m_ + i];
    }
    return key;
}

void StateCodec::unpack(std::uint64_t key, std::span<int> t_idx, std::span<int> k) const {
    for (int digit = 0; digit < 2 * m_; ++digit) {
        const std::uint64_t d = key / stride_[digit];
        key %= stride_[digit];
        if (digit < m_)
            t_idx[digit] = static_cast<int>(d);
        else
            k[digit - m_] = static_cast<int>(d) + 1;
    }
}

std::optional<DPEntry> DPStage::find(const GammaSets& gamma, std::span<const Time> t,
                                     std::span<const int> k) const {
    const int m = codec.machine_count();
    if (static_cast<int>(t.size()) != m || static_cast<int>(k.size()) != m) return std::nullopt;
    std::vector<int> t_idx(m);
    for (int i = 0; i < m; ++i) {
        auto idx = gamma.index_of(i, t[i]);
        if (!idx) return std::nullopt;
        t_idx[i] = *idx;
        if (k[i] < 1 || k[i] > codec.batch_radix(i)) return std::nullopt;
    }
    const DPEntry* entry = table.find(codec.pack(t_idx, k));
    if (!entry) return std::nullopt;
    return *entry;
}

void DPStage::for_each(const std::function<void(std::span<const int>, std::span<const int>,
                                                const DPEntry&)>& fn) const {
    const int m = codec.machine_count();
    std::vector<int> t_idx(m), k(m);
    table.for_each([&](std::uint64_t key, const DPEntry& entry) {
        codec.unpack(key, t_idx, k);
        fn(t_idx, k, entry);
    });
}

std::pair<std::vector<int>, std::vector<int>> DPStage::decode(std::uint64_t key) const {
    const int m = codec.machine_count();
    std::vector<int> t_idx(m), k(m);
    codec.unpack(key, t_idx, k);
    return {std::move(t_idx), std::move(k)};
}

DPStage dp_start_values(const Instance& inst, const GammaSets& gamma, std::span<const int> order,
                        const ObjectiveSpec& spec, const DPOptions& options) {
    require_valid(inst);
    require_permutation(inst, order);
    check_pin(inst, options);
    MemoryBudget budget{options.memory_cap_bytes};
    return start_stage(inst, gamma, order, spec, options, budget);
}

DPStage dp_recurrence_step(const Instance& inst, const GammaSets& gamma,
                           std::span<const int> order, const ObjectiveSpec& spec,
                           const DPStage& prev, const DPOptions& options) {
    require_valid(inst);
    require_permutation(inst, order);
    check_pin(inst, options);
    if (prev.job_position < 1 || prev.job_position >= inst.job_count())
        throw PreconditionError("previous stage position out of range");
    MemoryBudget budget{options.memory_cap_bytes, prev.size()};
    return step_stage(inst, gamma, order, spec, prev, options, budget);
}

SolveResult solve_fixed_order(const Instance& inst, std::span<const int> order,
                              const ObjectiveSpec& spec, bool certified,
                              const DPOptions& options) {
    require_valid(inst);
    require_permutation(inst, order);
    check_pin(inst, options);
    if (!spec.cost) throw ConfigError("objective spec has no cost function");
    const auto t0 = Clock::now();

    const GammaSets gamma = compute_gamma(inst);
    const int n = inst.job_count();
    const int m = inst.machine_count();
    MemoryBudget budget{options.memory_cap_bytes};

    std::vector<DPStage> stages;
    stages.reserve(n);
    stages.push_back(start_stage(inst, gamma, order, spec, options, budget));
    for (int j = 2; j <= n; ++j)
        stages.push_back(step_stage(inst, gamma, order, spec, stages.back(), options, budget));

    // Deterministic final state: minimum value, then smallest key.
    bool have = false;
    Value best_value = 0;
    std::uint64_t best_key = 0;
    stages.back().table.for_each([&](std::uint64_t key, const DPEntry& entry) {
        if (!have || entry.value < best_value ||
            (entry.value == best_value && key < best_key)) {
            have = true;
            best_value = entry.value;
            best_key = key;
        }
    });
    if (!have) throw Error("dp has no feasible final state");  // cannot happen on valid instances

    std::vector<std::uint64_t> keys(n);
    keys[n - 1] = best_key;
    for (int j = n - 1; j >= 1; --j) {
        const DPEntry* entry = stages[j].table.find(keys[j]);
        if (!entry) throw Error("dp backtrack lost its state chain");
        keys[j - 1] = entry->back;
    }

    // Job at position j opens a singleton batch on machine i when k_i == 1,
    // otherwise it joins the previous job's batch there.
    Schedule schedule;
    schedule.machines.resize(m);
    std::vector<int> t_idx(m), k(m);
    for (int j = 0; j < n; ++j) {
        stages[j].codec.unpack(keys[j], t_idx, k);
        for (int i = 0; i < m; ++i) {
            const Time completion = gamma.sets[i][t_idx[i]];
            if (j == 0 || k[i] == 1) {
                schedule.machines[i].push_back(Batch{completion - inst.machines[i].p, {order[j]}});
            } else {
                schedule.machines[i].back().jobs.push_back(order[j]);
            }
        }
    }
    for (auto& machine : schedule.machines)
        for (Batch& b : machine) std::sort(b.jobs.begin(), b.jobs.end());

    SolveResult result;
    result.schedule = batch_active_retiming(inst, schedule);
    result.value = best_value;
    result.exact = certified;
    result.stats.stages = static_cast<std::uint64_t>(n);
    for (const DPStage& s : stages) {
        result.stats.per_stage_states.push_back(s.size());
        result.stats.states += s.size();
    }
    result.stats.state_space_bound = state_space_bound(gamma, inst.machines);
    result.stats.wall_ms = elapsed_ms(t0);
    return result;
}

SolveResult solve_fixed_order(const Instance& inst, std::span<const int> order,
                              const Objective& obj, bool certified, const DPOptions& options) {
    return solve_fixed_order(inst, order, make_objective_spec(inst, obj), certified, options);
}

SolveResult solve_makespan_fast(const Instance& inst, const DPOptions& options) {
    require_valid(inst);
    const auto t0 = Clock::now();
    const JobOrder erd = erd_order(inst);
    const int m = inst.machine_count();
    const int n = inst.job_count();

    if (m == 1) {
        SolveResult r =
            solve_fixed_order(inst, erd.perm, make_objective_spec(inst, Objective::cmax()),
                              /*certified=*/true, options);
        r.stats.wall_ms = elapsed_ms(t0);
        return r;
    }

    // Bottleneck costs on the first m-1 machines: completion there plus the
    // time the remaining jobs need on the last machine when its batches are
    // full except possibly the first.
    const Time p_last = inst.machines[m - 1].p;
    const std::int64_t b_last = inst.machines[m - 1].b;
    std::vector<std::int64_t> position(n);  // 1-based position in ERD order
    for (int pos = 0; pos < n; ++pos) position[erd.perm[pos]] = pos + 1;
    ObjectiveSpec spec{Aggregator::Max, [position, n, b_last, p_last](int job, Time c) {
                           const std::int64_t remaining = n - position[job] + 1;
                           return c + (remaining + b_last - 1) / b_last * p_last;
                       }};

    Instance prefix = inst;
    prefix.machines.pop_back();
    SolveResult sub = solve_fixed_order(prefix, erd.perm, spec, /*certified=*/true, options);

    // First-only-empty batching on the last machine over the ERD order.
    const auto prev_completions = completion_matrix(prefix, sub.schedule).back();
    Schedule schedule = sub.schedule;
    schedule.machines.emplace_back();
    const int first_size = n % b_last == 0 ? static_cast<int>(std::min<std::int64_t>(b_last, n))
                                           : static_cast<int>(n % b_last);
    Time machine_free = 0;
    bool first = true;
    int pos = 0;
    while (pos < n) {
        const int size = first ? first_size : static_cast<int>(b_last);
        Batch b;
        b.jobs.assign(erd.perm.begin() + pos, erd.perm.begin() + pos + size);
        std::sort(b.jobs.begin(), b.jobs.end());
        Time start = first ? 0 : machine_free;
        for (int j : b.jobs) start = std::max(start, prev_completions[j]);
        b.start = start;
        machine_free = start + p_last;
        schedule.machines.back().push_back(std::move(b));
        pos += size;
        first = false;
    }

    SolveResult result;
    result.schedule = batch_active_retiming(inst, schedule);
    result.value = evaluate(inst, result.schedule, Objective::cmax());
    result.exact = true;
    result.stats = sub.stats;
    result.stats.wall_ms = elapsed_ms(t0);
    return result;
}

SolveResult solve(const Instance& inst, const Objective& obj, SolveMode mode,
                  const DPOptions& options) {
    require_valid(inst);
    if (needs_due_dates(obj) && !inst.all_due_dates())
        throw ConfigError("objective " + objective_name(obj) + " requires a due date for every job");
    if (needs_weights(obj) && !inst.all_weights())
        throw ConfigError("objective " + objective_name(obj) + " requires a weight for every job");

    switch (obj.kind) {
        case ObjectiveKind::Cmax:
            return solve_makespan_fast(inst, options);
        case ObjectiveKind::SumC:
            return solve_fixed_order(inst, erd_order(inst).perm, obj, /*certified=*/true, options);
        case ObjectiveKind::SumWC:
        case ObjectiveKind::Lmax:
        case ObjectiveKind::SumT:
            if (inst.zero_release()) {
                const JobOrder order = *order_for(inst, obj);
                DPOptions pinned = options;
                pinned.pin_first_machine = true;
                return solve_fixed_order(inst, order.perm, obj, /*certified=*/true, pinned);
            }
            break;
        case ObjectiveKind::SumU:
        case ObjectiveKind::SumWU:
            if (inst.zero_release()) {
                Instance weighted = inst;
                if (obj.kind == ObjectiveKind::SumU)
                    for (Job& j : weighted.jobs) j.w = 1;
                LateOptions late;
                late.memory_cap_bytes = options.memory_cap_bytes;
                return solve_weighted_late(weighted, late);
            }
            break;
        case ObjectiveKind::Custom:
            break;
    }

    if (mode == SolveMode::Strict)
        throw NoCertifiedOrderError(
            "no certified optimal job ordering for objective " + objective_name(obj) +
            (inst.zero_release() ? "" : " with nonzero release dates") +
            "; permutation schedules can be suboptimal here. Heuristic mode solves the best "
            "ERD-order permutation schedule instead and flags the result as not exact.");
    SolveResult r = solve_fixed_order(inst, erd_order(inst).perm, obj, /*certified=*/false, options);
    r.exact = false;
    return r;
}

}  // namespace pfb
