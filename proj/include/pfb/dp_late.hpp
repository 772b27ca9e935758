#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pfb/dp.hpp"
#include "pfb/gamma.hpp"
#include "pfb/types.hpp"

namespace pfb {

// Minimizing the weighted number of late jobs on zero-release instances:
// the scan may skip a job (making it late, paying its weight), so each state
// describes the last ON-TIME job's completion times and batch sizes, and
// every stored value is reached in one of three ways.
enum class LateBackKind : std::uint8_t {
    OnTimeAlone = 0,  // job j on time, every earlier job late
    OnTimeAfter = 1,  // job j on time following the predecessor state
    Late = 2,         // job j late, state carried from the previous stage
};

struct LateEntry {
    static constexpr std::uint64_t kNoBack = ~std::uint64_t{0};
    Value value = 0;
    std::uint64_t back = kNoBack;
    LateBackKind kind = LateBackKind::OnTimeAlone;
};

struct LateDPStage {
    int job_position = 0;  // 1-based position in EDD order
    StateCodec codec;
    StateMap<LateEntry> table;

    std::size_t size() const { return table.size(); }
    std::optional<LateEntry> find(const GammaSets& gamma, std::span<const Time> t,
                                  std::span<const int> k) const;
    void for_each(const std::function<void(std::span<const int> t_idx, std::span<const int> k,
                                           const LateEntry&)>& fn) const;
};

struct LateOptions {
    std::uint64_t memory_cap_bytes = std::uint64_t{2} << 30;
    // Restrict machine-1 completion times to multiples of p_1 up to
    // ceil(n/b_1) and make machine-1 transitions deterministic
    // (last-only-empty batching of the on-time jobs). Source of the runtime
    // saving; guarded by an equality property test against the unrestricted
    // run.
    bool first_machine_lattice = true;
};

// The lattice the late-jobs program runs on: zero-release Gamma, with
// machine 1 optionally restricted as above. Requires zero release dates.
GammaSets late_gamma(const Instance& inst, bool first_machine_lattice);

// Objective value when job j is scheduled on time and every earlier job is
// late: sum of the earlier weights, provided the state is a single-job chain
// (all batch sizes 1, t_1 >= p_1, chain conditions, t_m <= d_j). Jobs must
// already be in EDD order. Position j is 1-based.
std::optional<Value> x_value(const Instance& inst, const GammaSets& gamma, int j,
                             std::span<const Time> t, std::span<const int> k);

// Best value with job j on time after at least one earlier on-time job:
// minimum predecessor value over the recurrence conditions. Definitional
// (scans the previous stage); the solver's forward pass is equivalent.
std::optional<Value> y_value(const Instance& inst, const GammaSets& gamma,
                             const LateDPStage& prev, int j, std::span<const Time> t,
                             std::span<const int> k);

// Stage builders mirroring the solver's forward pass (stage 1 holds the
// single-on-time-job states; each later stage combines skip / alone / after).
LateDPStage late_start_values(const Instance& inst, const GammaSets& gamma,
                              const LateOptions& options = {});
LateDPStage late_recurrence_step(const Instance& inst, const GammaSets& gamma,
                                 const LateDPStage& prev, const LateOptions& options = {});

// Minimum weighted number of late jobs over all schedules. Requires zero
// release dates, due dates and weights for every job (the dispatcher fills
// unit weights for the unweighted variant). On-time jobs are reconstructed
// from the backtrack; late jobs are appended afterwards in index order,
// greedily filling batches. Returns exact=true.
SolveResult solve_weighted_late(const Instance& inst, const LateOptions& options = {});

}  // namespace pfb
