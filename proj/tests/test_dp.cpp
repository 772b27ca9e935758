#include <doctest.h>

#include <map>

#include "fixtures.hpp"
#include "pfb/dp.hpp"
#include "pfb/errors.hpp"
#include "pfb/gamma.hpp"
#include "pfb/model.hpp"
#include "pfb/oracle.hpp"
#include "pfb/orderings.hpp"

using namespace pfb;

namespace {

using StateVec = std::pair<std::vector<int>, std::vector<int>>;  // (t_idx, k)

struct BruteEntry {
    Value value;
    std::optional<StateVec> back;
};
using BruteTable = std::map<StateVec, BruteEntry>;

// Every (t, k) combination, as an odometer over the lattice indices and
// batch sizes.
template <typename Fn>
void for_all_states(const Instance& inst, const GammaSets& gamma, Fn&& fn) {
    const int m = inst.machine_count();
    std::vector<int> t_idx(m, 0), k(m, 1);
    while (true) {
        fn(t_idx, k);
        int digit = 2 * m - 1;
        while (digit >= 0) {
            if (digit >= m) {
                const int i = digit - m;
                if (k[i] < std::min<std::int64_t>(inst.machines[i].b, inst.job_count())) {
                    ++k[i];
                    break;
                }
                k[i] = 1;
            } else {
                if (t_idx[digit] + 1 < static_cast<int>(gamma.sets[digit].size())) {
                    ++t_idx[digit];
                    break;
                }
                t_idx[digit] = 0;
            }
            --digit;
        }
        if (digit < 0) break;
    }
}

bool start_conditions_hold(const Instance& inst, const GammaSets& gamma, Time release,
                           const std::vector<int>& t_idx, const std::vector<int>& k) {
    const int m = inst.machine_count();
    for (int i = 0; i < m; ++i)
        if (k[i] != 1) return false;
    if (gamma.sets[0][t_idx[0]] < release + inst.machines[0].p) return false;
    for (int i = 0; i + 1 < m; ++i)
        if (gamma.sets[i + 1][t_idx[i + 1]] < gamma.sets[i][t_idx[i]] + inst.machines[i + 1].p)
            return false;
    return true;
}

// Literal reading of the recurrence: for every state satisfying the chain
// conditions, minimize over all predecessors satisfying the batch-extension
// rules, keeping the lexicographically smallest minimizer.
BruteTable brute_start(const Instance& inst, const GammaSets& gamma, std::span<const int> order,
                       const ObjectiveSpec& spec) {
    BruteTable table;
    const Time release = inst.jobs[order[0]].r;
    for_all_states(inst, gamma, [&](const std::vector<int>& t_idx, const std::vector<int>& k) {
        if (!start_conditions_hold(inst, gamma, release, t_idx, k)) return;
        const Time t_m = gamma.sets.back()[t_idx.back()];
        table[{t_idx, k}] = {spec.cost(order[0], t_m), std::nullopt};
    });
    return table;
}

BruteTable brute_step(const Instance& inst, const GammaSets& gamma, std::span<const int> order,
                      const ObjectiveSpec& spec, const BruteTable& prev, int j) {
    BruteTable table;
    const int m = inst.machine_count();
    const Time release = inst.jobs[order[j - 1]].r;
    for_all_states(inst, gamma, [&](const std::vector<int>& t_idx, const std::vector<int>& k) {
        if (gamma.sets[0][t_idx[0]] < release + inst.machines[0].p) return;
        for (int i = 0; i + 1 < m; ++i)
            if (gamma.sets[i + 1][t_idx[i + 1]] < gamma.sets[i][t_idx[i]] + inst.machines[i + 1].p)
                return;
        // Canonical minimizer: the predecessor with the smallest
        // (value, state) pair; it always attains the recurrence minimum.
        std::optional<Value> best_prev;
        std::optional<StateVec> best_back;
        for (const auto& [prev_state, prev_entry] : prev) {
            bool ok = true;
            for (int i = 0; i < m && ok; ++i) {
                const Time t = gamma.sets[i][t_idx[i]];
                const Time tp = gamma.sets[i][prev_state.first[i]];
                if (k[i] == 1)
                    ok = tp <= t - inst.machines[i].p;
                else
                    ok = tp == t && prev_state.second[i] == k[i] - 1;
            }
            if (!ok) continue;
            if (!best_prev || prev_entry.value < *best_prev ||
                (prev_entry.value == *best_prev && prev_state < *best_back)) {
                best_prev = prev_entry.value;
                best_back = prev_state;
            }
        }
        if (best_prev) {
            const Time t_m = gamma.sets.back()[t_idx.back()];
            const Value f = spec.cost(order[j - 1], t_m);
            const Value v =
                spec.aggregator == Aggregator::Sum ? f + *best_prev : std::max(f, *best_prev);
            table[{t_idx, k}] = {v, best_back};
        }
    });
    return table;
}

BruteTable stage_to_table(const DPStage& stage) {
    BruteTable out;
    stage.for_each([&](std::span<const int> t_idx, std::span<const int> k, const DPEntry& e) {
        std::optional<StateVec> back;
        if (e.back != DPEntry::kNoBack) {
            auto [bt, bk] = stage.decode(e.back);
            back = StateVec{bt, bk};
        }
        out[{std::vector<int>(t_idx.begin(), t_idx.end()),
             std::vector<int>(k.begin(), k.end())}] = {e.value, back};
    });
    return out;
}

void check_tables_equal(const BruteTable& brute, const BruteTable& forward) {
    REQUIRE(brute.size() == forward.size());
    for (const auto& [state, entry] : brute) {
        auto it = forward.find(state);
        REQUIRE(it != forward.end());
        CHECK(it->second.value == entry.value);
        CHECK(it->second.back == entry.back);
    }
}

}  // namespace

TEST_CASE("stage-1 values on the five-job example") {
    const Instance inst = fixtures::example1();
    const GammaSets gamma = compute_gamma(inst);
    const auto erd = erd_order(inst).perm;
    const DPStage stage =
        dp_start_values(inst, gamma, erd, make_objective_spec(inst, Objective::cmax()));

    auto hit = stage.find(gamma, std::vector<Time>{2, 5}, std::vector<int>{1, 1});
    REQUIRE(hit.has_value());
    CHECK(hit->value == 5);
    CHECK_FALSE(stage.find(gamma, std::vector<Time>{2, 4}, std::vector<int>{1, 1}).has_value());
    CHECK_FALSE(stage.find(gamma, std::vector<Time>{2, 5}, std::vector<int>{2, 1}).has_value());
}

TEST_CASE("recurrence step on a one-machine pair of jobs") {
    Instance inst;
    inst.machines = {{1, 2}};
    inst.jobs = {{0, {}, {}}, {0, {}, {}}};
    const GammaSets gamma = compute_gamma(inst);
    REQUIRE(gamma.sets[0] == std::vector<Time>{1, 2});
    const std::vector<int> order{0, 1};
    const auto spec = make_objective_spec(inst, Objective::cmax());
    const DPStage first = dp_start_values(inst, gamma, order, spec);
    REQUIRE(first.find(gamma, std::vector<Time>{1}, std::vector<int>{1}).has_value());

    const DPStage second = dp_recurrence_step(inst, gamma, order, spec, first);
    auto batched = second.find(gamma, std::vector<Time>{1}, std::vector<int>{2});
    REQUIRE(batched.has_value());
    CHECK(batched->value == 1);  // joins the first job's batch
    auto separate = second.find(gamma, std::vector<Time>{2}, std::vector<int>{1});
    REQUIRE(separate.has_value());
    CHECK(separate->value == 2);  // new batch one step later
    CHECK_FALSE(second.find(gamma, std::vector<Time>{1}, std::vector<int>{1}).has_value());
}

TEST_CASE("forward stages match the literal recurrence") {
    for (std::uint64_t seed = 1; seed <= 14; ++seed) {
        const Instance inst = fixtures::random_instance(seed, {4, 2, 3, 3, seed % 2 ? 3 : 0,
                                                               /*with_due=*/true,
                                                               /*with_weights=*/true});
        const GammaSets gamma = compute_gamma(inst);
        auto order = fixtures::random_erd_order(inst, seed * 3);
        for (const Objective& obj :
             {Objective::cmax(), Objective::sum_c(), Objective::lmax(), Objective::sum_wc()}) {
            const auto spec = make_objective_spec(inst, obj);
            BruteTable brute = brute_start(inst, gamma, order, spec);
            DPStage stage = dp_start_values(inst, gamma, order, spec);
            check_tables_equal(brute, stage_to_table(stage));
            for (int j = 2; j <= inst.job_count(); ++j) {
                brute = brute_step(inst, gamma, order, spec, brute, j);
                stage = dp_recurrence_step(inst, gamma, order, spec, stage);
                check_tables_equal(brute, stage_to_table(stage));
            }
        }
    }
}

TEST_CASE("solve_fixed_order on the five-job example") {
    const Instance inst = fixtures::example1();
    const auto erd = erd_order(inst).perm;
    const SolveResult cmax = solve_fixed_order(inst, erd, Objective::cmax(), true);
    CHECK(cmax.value == 8);
    CHECK(cmax.exact);
    CHECK(evaluate(inst, cmax.schedule, Objective::cmax()) == 8);

    const SolveResult sumc = solve_fixed_order(inst, erd, Objective::sum_c(), true);
    CHECK(sumc.value == 34);
    CHECK(fixtures::sorted_completions(inst, sumc.schedule) ==
          std::vector<Time>{5, 5, 8, 8, 8});
}

TEST_CASE("solve_fixed_order on a single delayed job") {
    Instance inst;
    inst.machines = {{2, 1}, {3, 1}};
    inst.jobs = {{5, {}, {}}};
    const SolveResult r = solve_fixed_order(inst, std::vector<int>{0}, Objective::cmax(), true);
    CHECK(r.value == 10);
}

TEST_CASE("solve_fixed_order equals the fixed-order oracle") {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const bool zero = seed % 2 == 0;
        const Instance inst =
            fixtures::random_instance(seed, {6, 3, 4, 4, zero ? 0 : 4, true, true});
        const auto order = fixtures::random_erd_order(inst, seed * 11);
        for (const Objective& obj : {Objective::cmax(), Objective::sum_c(), Objective::lmax(),
                                     Objective::sum_t(), Objective::sum_wc()}) {
            CHECK(solve_fixed_order(inst, order, obj).value ==
                  oracle_permutation(inst, order, obj).value);
            ++checked;
        }
    }
    CHECK(checked == 125);
}

TEST_CASE("solve_makespan_fast matches the examples") {
    CHECK(solve_makespan_fast(fixtures::example1()).value == 8);

    Instance zero_release = fixtures::example1();
    for (Job& j : zero_release.jobs) j.r = 0;
    CHECK(solve_makespan_fast(zero_release).value == 8);

    Instance tiny;
    tiny.machines = {{1, 4}, {1, 4}};
    tiny.jobs.assign(4, Job{0, {}, {}});
    const SolveResult r = solve_makespan_fast(tiny);
    CHECK(r.value == 2);  // one full batch per machine
    CHECK(r.schedule.machines[0].size() == 1);
    CHECK(r.schedule.machines[1].size() == 1);
}

TEST_CASE("solve_makespan_fast equals the plain fixed-order program") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const Instance inst = fixtures::random_instance(seed, {8, 3, 4, 4, seed % 3 ? 5 : 0});
        const Value fast = solve_makespan_fast(inst).value;
        const Value plain =
            solve_fixed_order(inst, erd_order(inst).perm, Objective::cmax(), true).value;
        CHECK(fast == plain);
    }
}

TEST_CASE("custom regular objectives run through the program and the oracle") {
    const auto squared = Objective::custom(Aggregator::Sum, [](int, Time c) { return c * c; });
    const auto latest_square = Objective::custom(Aggregator::Max, [](int, Time c) { return c * c; });
    for (std::uint64_t seed = 150; seed <= 162; ++seed) {
        const Instance inst = fixtures::random_instance(seed, {5, 2, 3, 3, 3});
        const auto order = fixtures::random_erd_order(inst, seed + 1);
        for (const Objective& obj : {squared, latest_square}) {
            CHECK(solve_fixed_order(inst, order, obj).value ==
                  oracle_permutation(inst, order, obj).value);
        }
    }
    // The dispatcher has no certified ordering for custom objectives.
    CHECK_THROWS_AS(solve(fixtures::example1(), squared, SolveMode::Strict),
                    NoCertifiedOrderError);
    const SolveResult heur = solve(fixtures::example1(), squared, SolveMode::Heuristic);
    CHECK_FALSE(heur.exact);
    CHECK(evaluate(fixtures::example1(), heur.schedule, squared) == heur.value);
}

TEST_CASE("solve dispatcher on the examples") {
    const SolveResult cmax = solve(fixtures::example1(), Objective::cmax());
    CHECK(cmax.value == 8);
    CHECK(cmax.exact);

    CHECK_THROWS_AS(solve(fixtures::example2(), Objective::lmax(), SolveMode::Strict),
                    NoCertifiedOrderError);
    const SolveResult heur =
        solve(fixtures::example2(), Objective::lmax(), SolveMode::Heuristic);
    CHECK(heur.value == 1);  // best permutation-schedule value
    CHECK_FALSE(heur.exact);
}

TEST_CASE("solve handles zero-release due-date objectives exactly") {
    for (std::uint64_t seed = 60; seed <= 72; ++seed) {
        const Instance inst = fixtures::random_instance(seed, {5, 3, 3, 3, 0, true, true});
        for (const Objective& obj :
             {Objective::sum_wc(), Objective::lmax(), Objective::sum_t()}) {
            const SolveResult r = solve(inst, obj);
            CHECK(r.exact);
            CHECK(r.value == oracle_full(inst, obj).value);
            CHECK(evaluate(inst, r.schedule, obj) == r.value);
        }
    }
}

TEST_CASE("solve delegates late-job objectives and rejects missing fields") {
    Instance inst;
    inst.machines = {{2, 1}};
    inst.jobs = {{0, 2, {}}, {0, 2, {}}};
    const SolveResult r = solve(inst, Objective::sum_u());
    CHECK(r.value == 1);  // only one of the two can finish by time 2
    CHECK(r.exact);

    CHECK_THROWS_AS(solve(inst, Objective::sum_wu()), ConfigError);  // no weights
    Instance no_due = inst;
    no_due.jobs[0].d.reset();
    CHECK_THROWS_AS(solve(no_due, Objective::sum_u()), ConfigError);
}

TEST_CASE("memory cap raises a typed resource error") {
    DPOptions options;
    options.memory_cap_bytes = 256;
    CHECK_THROWS_WITH_AS(
        solve_fixed_order(fixtures::example1(), erd_order(fixtures::example1()).perm,
                          Objective::cmax(), false, options),
        doctest::Contains("memory cap"), ResourceLimitError);
}

TEST_CASE("machine-1 pinning keeps the optimum and shrinks the tables") {
    for (std::uint64_t seed = 80; seed <= 95; ++seed) {
        const Instance inst = fixtures::random_instance(seed, {6, 3, 3, 3, 0, true, true});
        for (const Objective& obj :
             {Objective::sum_wc(), Objective::lmax(), Objective::sum_t()}) {
            const auto order = *order_for(inst, obj);
            DPOptions pinned;
            pinned.pin_first_machine = true;
            const SolveResult with_pin = solve_fixed_order(inst, order.perm, obj, true, pinned);
            const SolveResult without = solve_fixed_order(inst, order.perm, obj, true);
            CHECK(with_pin.value == without.value);
            CHECK(with_pin.stats.states <= without.stats.states);
            CHECK(check_feasibility(inst, with_pin.schedule).empty());
            CHECK(evaluate(inst, with_pin.schedule, obj) == with_pin.value);
        }
    }
}

TEST_CASE("pinning requires zero release dates") {
    DPOptions pinned;
    pinned.pin_first_machine = true;
    CHECK_THROWS_AS(solve_fixed_order(fixtures::example1(), erd_order(fixtures::example1()).perm,
                                      Objective::cmax(), false, pinned),
                    PreconditionError);
}

TEST_CASE("solver schedules are feasible, batch-active, on the lattice") {
    for (std::uint64_t seed = 100; seed <= 115; ++seed) {
        const Instance inst = fixtures::random_instance(seed, {6, 3, 4, 4, 4});
        const GammaSets gamma = compute_gamma(inst);
        for (const Objective& obj : {Objective::cmax(), Objective::sum_c()}) {
            const SolveResult r = solve(inst, obj);
            CHECK(check_feasibility(inst, r.schedule).empty());
            CHECK(make_batch_active(inst, r.schedule) == r.schedule);
            CHECK(is_gamma_active(inst, gamma, r.schedule));
            CHECK(evaluate(inst, r.schedule, obj) == r.value);
        }
    }
}

TEST_CASE("appending a job never decreases the optimal makespan") {
    for (std::uint64_t seed = 120; seed <= 140; ++seed) {
        Instance inst = fixtures::random_instance(seed, {6, 3, 4, 4, 0});
        const Value before = solve(inst, Objective::cmax()).value;
        inst.jobs.push_back(Job{0, {}, {}});
        CHECK(solve(inst, Objective::cmax()).value >= before);
    }
}

TEST_CASE("stage state counts stay within the product bound") {
    const Instance inst = fixtures::example1();
    const SolveResult r =
        solve_fixed_order(inst, erd_order(inst).perm, Objective::sum_c(), true);
    CHECK(r.stats.stages == 5);
    CHECK(r.stats.per_stage_states.size() == 5);
    for (std::uint64_t count : r.stats.per_stage_states) {
        CHECK(count > 0);
        CHECK(count <= r.stats.state_space_bound);
    }
}
