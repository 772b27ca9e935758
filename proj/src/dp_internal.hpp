#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

#include "pfb/errors.hpp"
#include "pfb/gamma.hpp"
#include "pfb/types.hpp"

namespace pfb::detail {

constexpr Time kNoTimeCap = std::numeric_limits<Time>::max();

// Approximate bytes per stored DP state (key + entry + hash table overhead),
// used for the memory cap.
constexpr std::uint64_t kStateFootprintBytes = 48;

struct MemoryBudget {
    std::uint64_t cap_bytes;
    std::uint64_t used_states = 0;

    void charge(std::uint64_t added_states) {
        used_states += added_states;
        if (used_states * kStateFootprintBytes > cap_bytes)
            throw ResourceLimitError(
                "dp state tables exceed the memory cap of " + std::to_string(cap_bytes) +
                " bytes (" + std::to_string(used_states) +
                " states); raise the memory cap (PFB_MEM_CAP) or reduce the instance");
    }
};

enum class FirstDimMode {
    Free,           // generic recurrence conditions on machine 1
    FullBatchStep,  // last-only-empty: open a machine-1 batch only when the
                    // previous one is full, exactly one processing time later
};

// Start states: batch-size vector all ones, t_1 >= release + p_1 and
// t_{i+1} >= t_i + p_{i+1}, with every t_i on the lattice. When pinned,
// machine 1 completes exactly at release + p_1. The last machine's time can
// be capped (late-jobs DP condition t_m <= d_j).
template <typename Sink>
void enumerate_start_states(const GammaSets& gamma, std::span<const MachineConfig> machines,
                            Time release, bool pin_first_exact, Time last_dim_cap, Sink&& sink) {
    const int m = static_cast<int>(machines.size());
    std::vector<int> t_idx(m);
    std::vector<int> k(m, 1);
    auto rec = [&](auto&& self, int dim, Time prev_time) -> void {
        if (dim == m) {
            sink(std::span<const int>(t_idx), std::span<const int>(k), prev_time);
            return;
        }
        const auto& lattice = gamma.sets[dim];
        const Time lb = (dim == 0 ? release : prev_time) + machines[dim].p;
        const Time cap = dim == m - 1 ? last_dim_cap : kNoTimeCap;
        if (dim == 0 && pin_first_exact) {
            auto idx = gamma.index_of(0, lb);
            if (idx && lb <= cap) {
                t_idx[0] = *idx;
                self(self, 1, lb);
            }
            return;
        }
        auto it = std::lower_bound(lattice.begin(), lattice.end(), lb);
        for (; it != lattice.end() && *it <= cap; ++it) {
            t_idx[dim] = static_cast<int>(it - lattice.begin());
            self(self, dim + 1, *it);
        }
    };
    rec(rec, 0, 0);
}

// Successors of predecessor state (prev_t_idx, prev_k), reading the
// recurrence forward: per machine either extend the predecessor's batch
// (k+1, same completion) or open a fresh batch at any lattice time at least
// one processing time later, subject to the chain conditions
// t_1 >= release + p_1 and t_{i+1} >= t_i + p_{i+1}.
template <typename Sink>
void enumerate_successors(const GammaSets& gamma, std::span<const MachineConfig> machines,
                          std::span<const int> prev_t_idx, std::span<const int> prev_k,
                          Time release, FirstDimMode mode, Time last_dim_cap, Sink&& sink) {
    const int m = static_cast<int>(machines.size());
    std::vector<int> t_idx(m);
    std::vector<int> k(m);
    auto rec = [&](auto&& self, int dim, Time prev_dim_time) -> void {
        if (dim == m) {
            sink(std::span<const int>(t_idx), std::span<const int>(k), prev_dim_time);
            return;
        }
        const auto& lattice = gamma.sets[dim];
        const Time p = machines[dim].p;
        const Time lb = (dim == 0 ? release : prev_dim_time) + p;
        const Time cap = dim == m - 1 ? last_dim_cap : kNoTimeCap;
        const Time pt = lattice[prev_t_idx[dim]];

        if (prev_k[dim] < machines[dim].b && pt >= lb && pt <= cap) {
            t_idx[dim] = prev_t_idx[dim];
            k[dim] = prev_k[dim] + 1;
            self(self, dim + 1, pt);
        }
        k[dim] = 1;
        if (dim == 0 && mode == FirstDimMode::FullBatchStep) {
            if (prev_k[0] == machines[0].b) {
                const Time t = pt + p;
                if (t >= lb && t <= cap) {
                    auto idx = gamma.index_of(0, t);
                    if (idx) {
                        t_idx[0] = *idx;
                        self(self, 1, t);
                    }
                }
            }
            return;
        }
        auto it = std::lower_bound(lattice.begin(), lattice.end(), std::max(lb, pt + p));
        for (; it != lattice.end() && *it <= cap; ++it) {
            t_idx[dim] = static_cast<int>(it - lattice.begin());
            self(self, dim + 1, *it);
        }
    };
    rec(rec, 0, 0);
}

}  // namespace pfb::detail
