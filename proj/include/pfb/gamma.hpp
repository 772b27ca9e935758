#pragma once

#include <optional>
#include <vector>

#include "pfb/types.hpp"

namespace pfb {

// Per-machine admissible completion-time lattices Gamma_i: every batch-active
// schedule completes each job on machine i at one of these times. Computed
// once per instance and shared; immutable afterwards.
struct GammaSets {
    std::vector<std::vector<Time>> sets;  // each strictly increasing
    bool zero_release = false;

    int machine_count() const { return static_cast<int>(sets.size()); }

    std::optional<int> index_of(int machine, Time t) const;
    bool contains(int machine, Time t) const { return index_of(machine, t).has_value(); }
};

// Gamma_i = { r_j' + sum_{i'<=i} lambda_i' * p_i' : j' in [n], lambda_i' in [n] },
// built layer by layer: Gamma_0 = distinct release dates,
// Gamma_i = { g + lambda * p_i : g in Gamma_{i-1}, lambda in [n] }.
GammaSets compute_gamma(const Instance& inst);

// True iff every completion time c_ij lies in Gamma_i.
bool is_gamma_active(const Instance& inst, const GammaSets& gamma, const Schedule& s);

}  // namespace pfb
