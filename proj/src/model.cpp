#include "pfb/model.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "pfb/errors.hpp"

namespace pfb {

namespace {

constexpr std::int64_t kBitGuard = std::int64_t{1} << 62;

std::string msg(const std::string& where, const std::string& what) {
    return where.empty() ? what : where + ": " + what;
}

}  // namespace

Time Instance::completion_bound() const {
    Time max_r = 0;
    for (const Job& j : jobs) max_r = std::max(max_r, j.r);
    __int128 sum_p = 0;
    for (const MachineConfig& m : machines) sum_p += m.p;
    __int128 bound = static_cast<__int128>(max_r) + sum_p * static_cast<__int128>(jobs.size());
    if (bound > kBitGuard) return std::numeric_limits<Time>::max();
    return static_cast<Time>(bound);
}

Aggregator aggregator_of(const Objective& obj) {
    switch (obj.kind) {
        case ObjectiveKind::Cmax:
        case ObjectiveKind::Lmax:
            return Aggregator::Max;
        case ObjectiveKind::Custom:
            return obj.aggregator;
        default:
            return Aggregator::Sum;
    }
}

bool needs_due_dates(const Objective& obj) {
    switch (obj.kind) {
        case ObjectiveKind::Lmax:
        case ObjectiveKind::SumT:
        case ObjectiveKind::SumU:
        case ObjectiveKind::SumWU:
            return true;
        default:
            return false;
    }
}

bool needs_weights(const Objective& obj) {
    return obj.kind == ObjectiveKind::SumWC || obj.kind == ObjectiveKind::SumWU;
}

std::string objective_name(const Objective& obj) {
    switch (obj.kind) {
        case ObjectiveKind::Cmax: return "cmax";
        case ObjectiveKind::SumC: return "sumc";
        case ObjectiveKind::SumWC: return "sumwc";
        case ObjectiveKind::Lmax: return "lmax";
        case ObjectiveKind::SumT: return "sumt";
        case ObjectiveKind::SumU: return "sumu";
        case ObjectiveKind::SumWU: return "sumwu";
        case ObjectiveKind::Custom: return "custom";
    }
    return "custom";
}

std::optional<Objective> objective_from_name(const std::string& name) {
    if (name == "cmax") return Objective::cmax();
    if (name == "sumc") return Objective::sum_c();
    if (name == "sumwc") return Objective::sum_wc();
    if (name == "lmax") return Objective::lmax();
    if (name == "sumt") return Objective::sum_t();
    if (name == "sumu") return Objective::sum_u();
    if (name == "sumwu") return Objective::sum_wu();
    return std::nullopt;
}

std::vector<std::string> validate_instance(const Instance& inst) {
    std::vector<std::string> errors;
    if (inst.machines.empty()) errors.push_back("instance must have at least one machine");
    if (inst.jobs.empty()) errors.push_back("instance must have at least one job");

    for (std::size_t i = 0; i < inst.machines.size(); ++i) {
        const MachineConfig& m = inst.machines[i];
        std::string where = "machine " + std::to_string(i + 1);
        if (m.p < 1) errors.push_back(msg(where, "processing time must be >= 1"));
        if (m.b < 1) errors.push_back(msg(where, "batch size must be >= 1"));
    }
    for (std::size_t j = 0; j < inst.jobs.size(); ++j) {
        const Job& job = inst.jobs[j];
        std::string where = "job " + std::to_string(j + 1);
        if (job.r < 0) errors.push_back(msg(where, "release date must be >= 0"));
        if (job.d && *job.d < 0) errors.push_back(msg(where, "due date must be >= 0"));
        if (job.w && *job.w < 0) errors.push_back(msg(where, "weight must be >= 0"));
    }
    if (!errors.empty()) return errors;

    // Overflow guards: keep every completion time and every objective value
    // well inside signed 64 bits.
    Time max_r = 0;
    for (const Job& j : inst.jobs) max_r = std::max(max_r, j.r);
    __int128 sum_p = 0;
    for (const MachineConfig& m : inst.machines) sum_p += m.p;
    __int128 max_c = static_cast<__int128>(max_r) + sum_p * static_cast<__int128>(inst.jobs.size());
    if (max_c > kBitGuard) {
        errors.push_back("completion-time horizon exceeds the 62-bit bound");
        return errors;
    }
    __int128 n_times_c = max_c * static_cast<__int128>(inst.jobs.size());
    if (n_times_c > kBitGuard)
        errors.push_back("total completion time bound exceeds 62 bits");
    __int128 sum_w = 0;
    for (const Job& j : inst.jobs) sum_w += j.w.value_or(0);
    if (sum_w * max_c > kBitGuard)
        errors.push_back("weighted objective bound exceeds 62 bits");
    return errors;
}

std::vector<std::string> validate_schedule_structure(const Instance& inst, const Schedule& s) {
    std::vector<std::string> errors;
    const int n = inst.job_count();
    if (static_cast<int>(s.machines.size()) != inst.machine_count()) {
        errors.push_back("schedule has " + std::to_string(s.machines.size()) +
                         " machines, instance has " + std::to_string(inst.machine_count()));
        return errors;
    }
    for (std::size_t i = 0; i < s.machines.size(); ++i) {
        std::vector<int> seen(n, 0);
        std::string where = "machine " + std::to_string(i + 1);
        for (const Batch& b : s.machines[i]) {
            if (b.jobs.empty()) errors.push_back(msg(where, "empty batch"));
            for (int j : b.jobs) {
                if (j < 0 || j >= n) {
                    errors.push_back(msg(where, "job index out of range"));
                } else if (seen[j]++) {
                    errors.push_back(msg(where, "job " + std::to_string(j + 1) +
                                                    " appears in more than one batch"));
                }
            }
        }
        for (int j = 0; j < n; ++j)
            if (!seen[j])
                errors.push_back(
                    msg(where, "job " + std::to_string(j + 1) + " missing from schedule"));
    }
    return errors;
}

std::vector<std::vector<Time>> completion_matrix(const Instance& inst, const Schedule& s) {
    auto structure = validate_schedule_structure(inst, s);
    if (!structure.empty()) throw StructureError(structure.front());
    const int m = inst.machine_count();
    const int n = inst.job_count();
    std::vector<std::vector<Time>> c(m, std::vector<Time>(n, 0));
    for (int i = 0; i < m; ++i)
        for (const Batch& b : s.machines[i])
            for (int j : b.jobs) c[i][j] = b.start + inst.machines[i].p;
    return c;
}

Value evaluate_completions(const Instance& inst, std::span<const Time> completions,
                           const Objective& obj) {
    const int n = inst.job_count();
    if (static_cast<int>(completions.size()) != n)
        throw StructureError("completion row size does not match job count");
    if (needs_due_dates(obj) && !inst.all_due_dates())
        throw ConfigError("objective " + objective_name(obj) + " requires a due date for every job");
    if (needs_weights(obj) && !inst.all_weights())
        throw ConfigError("objective " + objective_name(obj) + " requires a weight for every job");

    auto cost = [&](int j, Time c) -> Value {
        switch (obj.kind) {
            case ObjectiveKind::Cmax:
            case ObjectiveKind::SumC: return c;
            case ObjectiveKind::SumWC: return *inst.jobs[j].w * c;
            case ObjectiveKind::Lmax: return c - *inst.jobs[j].d;
            case ObjectiveKind::SumT: return std::max<Value>(0, c - *inst.jobs[j].d);
            case ObjectiveKind::SumU: return c > *inst.jobs[j].d ? 1 : 0;
            case ObjectiveKind::SumWU: return c > *inst.jobs[j].d ? *inst.jobs[j].w : 0;
            case ObjectiveKind::Custom: return obj.cost(j, c);
        }
        return 0;
    };
    if (obj.kind == ObjectiveKind::Custom && !obj.cost)
        throw ConfigError("custom objective has no cost function");

    Value acc = cost(0, completions[0]);
    const bool is_sum = aggregator_of(obj) == Aggregator::Sum;
    for (int j = 1; j < n; ++j) {
        Value v = cost(j, completions[j]);
        acc = is_sum ? acc + v : std::max(acc, v);
    }
    return acc;
}

Value evaluate(const Instance& inst, const Schedule& s, const Objective& obj) {
    auto c = completion_matrix(inst, s);
    return evaluate_completions(inst, c.back(), obj);
}

std::vector<std::string> check_feasibility(const Instance& inst, const Schedule& s) {
    auto structure = validate_schedule_structure(inst, s);
    if (!structure.empty()) throw StructureError(structure.front());
    std::vector<std::string> violations;
    const int m = inst.machine_count();

    std::vector<Time> prev_completion(inst.job_count());
    for (int j = 0; j < inst.job_count(); ++j) prev_completion[j] = inst.jobs[j].r;

    for (int i = 0; i < m; ++i) {
        const Time p = inst.machines[i].p;
        const std::string where = "machine " + std::to_string(i + 1);
        Time machine_free = std::numeric_limits<Time>::min();
        int idx = 0;
        for (const Batch& b : s.machines[i]) {
            ++idx;
            std::string batch_where = where + " batch " + std::to_string(idx);
            if (static_cast<int>(b.jobs.size()) > inst.machines[i].b) {
                std::ostringstream os;
                os << batch_where << ": capacity exceeded (" << b.jobs.size() << " jobs, limit "
                   << inst.machines[i].b << ")";
                violations.push_back(os.str());
            }
            for (int j : b.jobs) {
                if (b.start < prev_completion[j]) {
                    std::ostringstream os;
                    if (i == 0) {
                        os << batch_where << ": starts at " << b.start << " before release date "
                           << inst.jobs[j].r << " of job " << (j + 1);
                    } else {
                        os << batch_where << ": precedence violated, starts at " << b.start
                           << " but job " << (j + 1) << " completes machine " << i << " at "
                           << prev_completion[j];
                    }
                    violations.push_back(os.str());
                }
            }
            if (machine_free != std::numeric_limits<Time>::min() && b.start < machine_free) {
                std::ostringstream os;
                os << batch_where << ": overlap, starts at " << b.start
                   << " before previous batch completes at " << machine_free;
                violations.push_back(os.str());
            }
            machine_free = b.start + p;
        }
        for (const Batch& b : s.machines[i])
            for (int j : b.jobs) prev_completion[j] = b.start + p;
    }
    return violations;
}

Schedule batch_active_retiming(const Instance& inst, const Schedule& s) {
    auto structure = validate_schedule_structure(inst, s);
    if (!structure.empty()) throw StructureError(structure.front());
    Schedule out = s;
    std::vector<Time> prev_completion(inst.job_count());
    for (int j = 0; j < inst.job_count(); ++j) prev_completion[j] = inst.jobs[j].r;

    for (int i = 0; i < inst.machine_count(); ++i) {
        const Time p = inst.machines[i].p;
        Time machine_free = 0;
        bool first = true;
        for (Batch& b : out.machines[i]) {
            Time start = 0;
            for (int j : b.jobs) start = std::max(start, prev_completion[j]);
            if (!first) start = std::max(start, machine_free);
            b.start = start;
            machine_free = start + p;
            first = false;
        }
        for (const Batch& b : out.machines[i])
            for (int j : b.jobs) prev_completion[j] = b.start + p;
    }
    return out;
}

Schedule make_batch_active(const Instance& inst, const Schedule& s) {
    auto violations = check_feasibility(inst, s);
    if (!violations.empty())
        throw PreconditionError("make_batch_active requires a feasible schedule: " +
                                violations.front());
    return batch_active_retiming(inst, s);
}

Schedule permutation_rebatch(const Instance& inst, const Schedule& s, std::span<const int> order) {
    const int n = inst.job_count();
    if (static_cast<int>(order.size()) != n)
        throw PreconditionError("order must be a permutation of all jobs");
    std::vector<int> seen(n, 0);
    for (int j : order) {
        if (j < 0 || j >= n || seen[j]++)
            throw PreconditionError("order must be a permutation of all jobs");
    }
    for (int pos = 1; pos < n; ++pos)
        if (inst.jobs[order[pos - 1]].r > inst.jobs[order[pos]].r)
            throw PreconditionError("order is not an earliest release date order");
    auto violations = check_feasibility(inst, s);
    if (!violations.empty())
        throw PreconditionError("permutation_rebatch requires a feasible schedule: " +
                                violations.front());

    Schedule out = s;
    for (auto& machine : out.machines) {
        int consumed = 0;
        for (Batch& b : machine) {
            const int size = static_cast<int>(b.jobs.size());
            b.jobs.assign(order.begin() + consumed, order.begin() + consumed + size);
            std::sort(b.jobs.begin(), b.jobs.end());
            consumed += size;
        }
    }
    return out;
}

}  // namespace pfb
