#pragma once

#include <span>
#include <vector>

#include "pfb/types.hpp"

namespace pfb {

// Batch composition per machine, without timing. Each machine holds an
// ordered list of disjoint job-index sets covering all jobs, sizes within
// the machine's capacity.
struct BatchSequencePlan {
    std::vector<std::vector<std::vector<int>>> machines;
};

// Enumeration caps; exceeding one raises ResourceLimitError naming it.
struct OracleLimits {
    int max_jobs_permutation = 10;
    int max_jobs_full = 5;
    int max_machines_full = 3;
    int max_jobs_best_order = 7;
};

// The unique batch-active schedule realizing a plan: machine by machine,
// batch by batch, start = max(machine free time, arrival of the latest
// member). Any plan is feasible once timed.
Schedule compute_timing(const Instance& inst, const BatchSequencePlan& plan);

// Exhaustive minimum over all permutation schedules with the given job order:
// per machine, every composition of n into parts within capacity, timed
// batch-actively. Witness is the first minimizer in a fixed enumeration
// order, so results are deterministic.
SolveResult oracle_permutation(const Instance& inst, std::span<const int> order,
                               const Objective& obj, const OracleLimits& limits = {});

// Ground truth over all schedules: every capacity-bounded ordered set
// partition per machine, cross product over machines, timed batch-actively.
SolveResult oracle_full(const Instance& inst, const Objective& obj,
                        const OracleLimits& limits = {});

// Same enumeration evaluating several objectives in one sweep.
std::vector<SolveResult> oracle_full_multi(const Instance& inst,
                                           std::span<const Objective> objectives,
                                           const OracleLimits& limits = {});

// Exact minimum over all permutation schedules: all n! orders times all
// batchings.
SolveResult oracle_best_order(const Instance& inst, const Objective& obj,
                              const OracleLimits& limits = {});

}  // namespace pfb
