#pragma once

#include <span>
#include <string>
#include <vector>

#include "pfb/types.hpp"

namespace pfb {

// Returns every violated field invariant; empty means the instance is valid.
// Includes the 62-bit overflow guard on the completion-time horizon and on
// weighted objective bounds.
std::vector<std::string> validate_instance(const Instance& inst);

// Structural match between schedule and instance: every machine carries a
// batch sequence that partitions the job set, batches nonempty, indices in
// range. Says nothing about timing.
std::vector<std::string> validate_schedule_structure(const Instance& inst, const Schedule& s);

// c[i][j] = start of the batch containing job j on machine i, plus p_i.
// Throws StructureError if the schedule does not match the instance.
std::vector<std::vector<Time>> completion_matrix(const Instance& inst, const Schedule& s);

Value evaluate(const Instance& inst, const Schedule& s, const Objective& obj);

// Same evaluation applied directly to a row of last-machine completion times.
Value evaluate_completions(const Instance& inst, std::span<const Time> completions,
                           const Objective& obj);

// Timing violations: release dates, machine precedence, batch overlap,
// capacity. Empty means feasible.
std::vector<std::string> check_feasibility(const Instance& inst, const Schedule& s);

// Recomputes every batch start at its earliest position, keeping batch
// composition and order (machines in index order, batches in sequence order).
// Ignores the input's start times.
Schedule batch_active_retiming(const Instance& inst, const Schedule& s);

// Lemma-style normalization: shifts each batch of a feasible schedule to its
// earliest feasible start. Never increases a regular objective; idempotent.
// Throws PreconditionError if the input is infeasible.
Schedule make_batch_active(const Instance& inst, const Schedule& s);

// Rebatching construction: keeps every batch's start time and size, reassigns
// jobs so each machine processes them in `order` (which must be an earliest
// release date order). Preserves the multiset of last-machine completion
// times; when all release dates are equal and `order` matches the input's
// last-machine job order, completion times are preserved per job.
Schedule permutation_rebatch(const Instance& inst, const Schedule& s, std::span<const int> order);

}  // namespace pfb
