#include "pfb/gamma.hpp"

#include <algorithm>

#include "pfb/errors.hpp"
#include "pfb/model.hpp"

namespace pfb {

std::optional<int> GammaSets::index_of(int machine, Time t) const {
    const auto& v = sets[machine];
    auto it = std::lower_bound(v.begin(), v.end(), t);
    if (it == v.end() || *it != t) return std::nullopt;
    return static_cast<int>(it - v.begin());
}

GammaSets compute_gamma(const Instance& inst) {
    auto errors = validate_instance(inst);
    if (!errors.empty()) throw ConfigError("invalid instance: " + errors.front());

    const auto n = static_cast<Time>(inst.job_count());
    std::vector<Time> layer;
    layer.reserve(inst.jobs.size());
    for (const Job& j : inst.jobs) layer.push_back(j.r);
    std::sort(layer.begin(), layer.end());
    layer.erase(std::unique(layer.begin(), layer.end()), layer.end());

    GammaSets gamma;
    gamma.zero_release = inst.zero_release();
    gamma.sets.reserve(inst.machines.size());
    for (const MachineConfig& mc : inst.machines) {
        std::vector<Time> next;
        next.reserve(layer.size() * inst.jobs.size());
        for (Time g : layer)
            for (Time lambda = 1; lambda <= n; ++lambda) next.push_back(g + lambda * mc.p);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        gamma.sets.push_back(next);
        layer = gamma.sets.back();
    }
    return gamma;
}

bool is_gamma_active(const Instance& inst, const GammaSets& gamma, const Schedule& s) {
    auto c = completion_matrix(inst, s);
    for (int i = 0; i < inst.machine_count(); ++i)
        for (int j = 0; j < inst.job_count(); ++j)
            if (!gamma.contains(i, c[i][j])) return false;
    return true;
}

}  // namespace pfb
