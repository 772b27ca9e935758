#pragma once

#include <optional>
#include <vector>

#include "pfb/types.hpp"

namespace pfb {

enum class OrderCertificate { EarliestRelease, EarliestDueDate, NonIncreasingWeight, None };

struct JobOrder {
    std::vector<int> perm;  // perm[pos] = job scheduled at position pos
    OrderCertificate certificate = OrderCertificate::None;
};

// Stable sorts by the named key; ties keep ascending job index, so outputs
// are deterministic.
JobOrder erd_order(const Instance& inst);
JobOrder edd_order(const Instance& inst);    // requires all due dates
JobOrder weight_order(const Instance& inst); // requires all weights

// Dispatcher for the orderings whose optimality is proven: ERD for makespan
// and total completion time with arbitrary release dates; for zero-release
// instances, non-increasing weights for sum w_j C_j and EDD for Lmax, sum T_j
// and the late-job objectives. Returns nullopt when no ordering is certified
// (due-date or weighted objectives in the presence of release dates), in
// which case permutation schedules themselves can be suboptimal.
std::optional<JobOrder> order_for(const Instance& inst, const Objective& obj);

// A single order that is simultaneously ERD, EDD and non-increasing-weight,
// if one exists. Such instances admit optimal permutation schedules even for
// objectives that are otherwise uncovered. Requires due dates and weights.
std::optional<JobOrder> agreeable_order(const Instance& inst);

}  // namespace pfb
