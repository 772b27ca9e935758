#include "pfb/orderings.hpp"

#include <algorithm>
#include <numeric>

#include "pfb/errors.hpp"
#include "pfb/model.hpp"

namespace pfb {

namespace {

template <typename Key>
std::vector<int> sorted_perm(int n, Key&& key) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return key(a) < key(b); });
    return perm;
}

}  // namespace

JobOrder erd_order(const Instance& inst) {
    return {sorted_perm(inst.job_count(), [&](int j) { return inst.jobs[j].r; }),
            OrderCertificate::EarliestRelease};
}

JobOrder edd_order(const Instance& inst) {
    if (!inst.all_due_dates())
        throw ConfigError("earliest due date order requires a due date for every job");
    return {sorted_perm(inst.job_count(), [&](int j) { return *inst.jobs[j].d; }),
            OrderCertificate::EarliestDueDate};
}

JobOrder weight_order(const Instance& inst) {
    if (!inst.all_weights())
        throw ConfigError("weight order requires a weight for every job");
    return {sorted_perm(inst.job_count(), [&](int j) { return -*inst.jobs[j].w; }),
            OrderCertificate::NonIncreasingWeight};
}

std::optional<JobOrder> order_for(const Instance& inst, const Objective& obj) {
    switch (obj.kind) {
        case ObjectiveKind::Cmax:
        case ObjectiveKind::SumC:
            return erd_order(inst);
        case ObjectiveKind::SumWC:
            if (inst.zero_release()) return weight_order(inst);
            return std::nullopt;
        case ObjectiveKind::Lmax:
        case ObjectiveKind::SumT:
        case ObjectiveKind::SumU:
        case ObjectiveKind::SumWU:
            if (inst.zero_release()) return edd_order(inst);
            return std::nullopt;
        case ObjectiveKind::Custom:
            return std::nullopt;
    }
    return std::nullopt;
}

std::optional<JobOrder> agreeable_order(const Instance& inst) {
    if (!inst.all_due_dates())
        throw ConfigError("agreeable order requires a due date for every job");
    if (!inst.all_weights())
        throw ConfigError("agreeable order requires a weight for every job");
    // If any simultaneous ERD+EDD+non-increasing-weight order exists, the
    // lexicographic sort by (r, d, -w) is one; checking it decides the matter.
    auto perm = sorted_perm(inst.job_count(), [&](int j) {
        return std::make_tuple(inst.jobs[j].r, *inst.jobs[j].d, -*inst.jobs[j].w);
    });
    for (std::size_t pos = 1; pos < perm.size(); ++pos) {
        const Job& a = inst.jobs[perm[pos - 1]];
        const Job& b = inst.jobs[perm[pos]];
        if (a.r > b.r || *a.d > *b.d || *a.w < *b.w) return std::nullopt;
    }
    return JobOrder{std::move(perm), OrderCertificate::None};
}

}  // namespace pfb
