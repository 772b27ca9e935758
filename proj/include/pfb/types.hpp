#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pfb {

// All times and objective values are exact signed 64-bit integers; instance
// validation bounds them so that no objective can overflow.
using Time = std::int64_t;
using Value = std::int64_t;

struct MachineConfig {
    Time p = 1;  // processing time per batch
    int b = 1;   // maximum batch size

    friend bool operator==(const MachineConfig&, const MachineConfig&) = default;
};

struct Job {
    Time r = 0;                        // release date
    std::optional<Time> d;             // due date
    std::optional<std::int64_t> w;     // weight

    friend bool operator==(const Job&, const Job&) = default;
};

struct Instance {
    std::vector<MachineConfig> machines;
    std::vector<Job> jobs;

    int machine_count() const { return static_cast<int>(machines.size()); }
    int job_count() const { return static_cast<int>(jobs.size()); }

    bool zero_release() const {
        for (const Job& j : jobs)
            if (j.r != 0) return false;
        return true;
    }

    bool all_due_dates() const {
        for (const Job& j : jobs)
            if (!j.d) return false;
        return true;
    }

    bool all_weights() const {
        for (const Job& j : jobs)
            if (!j.w) return false;
        return true;
    }

    // Upper bound on any completion time: max release date plus one batch of
    // every job on every machine.
    Time completion_bound() const;

    friend bool operator==(const Instance&, const Instance&) = default;
};

// A batch: set of jobs (0-based indices, kept sorted) started together.
// Start times are stored explicitly so that schedules with inserted idle
// time are representable.
struct Batch {
    Time start = 0;
    std::vector<int> jobs;

    friend bool operator==(const Batch&, const Batch&) = default;
};

// Per-machine ordered batch sequences; machines[i] must partition the job
// set. Completion of a job on machine i is its batch start plus p_i.
struct Schedule {
    std::vector<std::vector<Batch>> machines;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

enum class Aggregator { Sum, Max };

enum class ObjectiveKind { Cmax, SumC, SumWC, Lmax, SumT, SumU, SumWU, Custom };

// Either one of the traditional objectives or a generic regular sum/bottleneck
// objective given by an aggregator and per-job nondecreasing cost functions.
struct Objective {
    ObjectiveKind kind = ObjectiveKind::Cmax;
    Aggregator aggregator = Aggregator::Max;                  // used by Custom
    std::function<Value(int job, Time completion)> cost;      // used by Custom

    static Objective cmax() { return {ObjectiveKind::Cmax, Aggregator::Max, {}}; }
    static Objective sum_c() { return {ObjectiveKind::SumC, Aggregator::Sum, {}}; }
    static Objective sum_wc() { return {ObjectiveKind::SumWC, Aggregator::Sum, {}}; }
    static Objective lmax() { return {ObjectiveKind::Lmax, Aggregator::Max, {}}; }
    static Objective sum_t() { return {ObjectiveKind::SumT, Aggregator::Sum, {}}; }
    static Objective sum_u() { return {ObjectiveKind::SumU, Aggregator::Sum, {}}; }
    static Objective sum_wu() { return {ObjectiveKind::SumWU, Aggregator::Sum, {}}; }
    static Objective custom(Aggregator agg, std::function<Value(int, Time)> cost) {
        return {ObjectiveKind::Custom, agg, std::move(cost)};
    }
};

Aggregator aggregator_of(const Objective& obj);
bool needs_due_dates(const Objective& obj);
bool needs_weights(const Objective& obj);
std::string objective_name(const Objective& obj);
std::optional<Objective> objective_from_name(const std::string& name);

struct SolveStats {
    std::uint64_t states = 0;  // finite DP states over all stages, or oracle plans evaluated
    std::uint64_t stages = 0;
    std::vector<std::uint64_t> per_stage_states;
    std::uint64_t state_space_bound = 0;  // prod |Gamma_i| * prod b_i, saturated
    double wall_ms = 0.0;
};

struct SolveResult {
    Schedule schedule;
    Value value = 0;
    // True when a theorem certifies global optimality; false when the result
    // is only optimal among permutation schedules for the order that was used.
    bool exact = false;
    SolveStats stats;
};

}  // namespace pfb
