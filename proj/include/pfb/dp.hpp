#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pfb/gamma.hpp"
#include "pfb/state_map.hpp"
#include "pfb/types.hpp"

namespace pfb {

// Regular sum or bottleneck objective in the form the dynamic program
// consumes: an aggregator and per-job cost functions, each nondecreasing in
// the completion time. Costs are indexed by original job id.
struct ObjectiveSpec {
    Aggregator aggregator = Aggregator::Max;
    std::function<Value(int job, Time completion)> cost;
};

// Lowers a named objective to its aggregator/cost form; validates that the
// required due dates / weights are present.
ObjectiveSpec make_objective_spec(const Instance& inst, const Objective& obj);

// Packs a state (t-index vector, batch-size vector) into one 64-bit
// mixed-radix key. Numeric key order equals lexicographic order on
// (t_idx, k); the deterministic tie-breaking rules rely on that.
class StateCodec {
public:
    StateCodec() = default;
    StateCodec(const GammaSets& gamma, std::span<const MachineConfig> machines, int jobs);

    int machine_count() const { return m_; }
    // Largest representable batch-size component for machine i.
    int batch_radix(int machine) const { return static_cast<int>(radix_[m_ + machine]); }
    std::uint64_t pack(std::span<const int> t_idx, std::span<const int> k) const;
    void unpack(std::uint64_t key, std::span<int> t_idx, std::span<int> k) const;

private:
    int m_ = 0;
    std::vector<std::uint64_t> radix_;
    std::vector<std::uint64_t> stride_;
};

struct DPEntry {
    static constexpr std::uint64_t kNoBack = ~std::uint64_t{0};
    Value value = 0;
    std::uint64_t back = kNoBack;  // predecessor state key, kNoBack at stage 1
};

// One stage of the dynamic program: all finite states for a fixed job
// position. Absent keys represent +infinity.
struct DPStage {
    int job_position = 0;  // 1-based position in the fixed order
    StateCodec codec;
    StateMap<DPEntry> table;

    std::size_t size() const { return table.size(); }

    // Lookup by completion-time values and batch sizes.
    std::optional<DPEntry> find(const GammaSets& gamma, std::span<const Time> t,
                                std::span<const int> k) const;

    // Iterates all finite states in unspecified order, decoding keys.
    void for_each(const std::function<void(std::span<const int> t_idx, std::span<const int> k,
                                           const DPEntry&)>& fn) const;

    std::pair<std::vector<int>, std::vector<int>> decode(std::uint64_t key) const;
};

struct DPOptions {
    // Approximate cap on total state-table memory across all retained stages.
    std::uint64_t memory_cap_bytes = std::uint64_t{2} << 30;
    // Zero-release speedup: pin machine 1 to last-only-empty batching, which
    // collapses the first state dimension. Requires all release dates zero.
    bool pin_first_machine = false;
};

// Stage 1 of the recurrence: batch-size vector all ones, chain conditions on
// the completion times, value f_1(t_m).
DPStage dp_start_values(const Instance& inst, const GammaSets& gamma, std::span<const int> order,
                        const ObjectiveSpec& spec, const DPOptions& options = {});

// One recurrence step: all finite states at position prev.job_position + 1,
// minimizing f_j(t_m) combined with the predecessor value; backpointers
// record the lexicographically smallest minimizing predecessor.
DPStage dp_recurrence_step(const Instance& inst, const GammaSets& gamma,
                           std::span<const int> order, const ObjectiveSpec& spec,
                           const DPStage& prev, const DPOptions& options = {});

// Best permutation schedule with the given job order, reconstructed by
// backtracking and returned batch-actively timed. `certified` is reported as
// the exactness flag: pass true only when a theorem covers the order/objective
// combination.
SolveResult solve_fixed_order(const Instance& inst, std::span<const int> order,
                              const ObjectiveSpec& spec, bool certified = false,
                              const DPOptions& options = {});
SolveResult solve_fixed_order(const Instance& inst, std::span<const int> order,
                              const Objective& obj, bool certified = false,
                              const DPOptions& options = {});

// Makespan via the reduced program: the dynamic program runs on machines
// 1..m-1 with the bottleneck costs c + ceil((n-j+1)/b_m) * p_m, then the last
// machine is appended with first-only-empty batching.
SolveResult solve_makespan_fast(const Instance& inst, const DPOptions& options = {});

enum class SolveMode { Strict, Heuristic };

// Dispatcher over the certified orderings and speedups. Strict mode refuses
// objective/release-date combinations with no certified ordering
// (NoCertifiedOrderError); heuristic mode falls back to the best ERD-order
// permutation schedule with exact=false.
SolveResult solve(const Instance& inst, const Objective& obj, SolveMode mode = SolveMode::Strict,
                  const DPOptions& options = {});

}  // namespace pfb
