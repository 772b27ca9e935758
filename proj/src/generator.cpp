#include "pfb/generator.hpp"

#include <random>

#include "pfb/errors.hpp"

namespace pfb {

Instance generate_instance(const GenParams& params, std::uint64_t seed) {
    if (params.n < 1 || params.m < 1)
        throw ConfigError("generator needs n >= 1 and m >= 1");
    if (params.max_p < 1 || params.max_b < 1 || params.max_r < 0)
        throw ConfigError("generator needs max_p >= 1, max_b >= 1, max_r >= 0");
    if (params.with_due_dates && (params.due_min < 0 || params.due_max < params.due_min))
        throw ConfigError("generator due date range is invalid");
    if (params.with_weights && (params.weight_min < 0 || params.weight_max < params.weight_min))
        throw ConfigError("generator weight range is invalid");

    std::mt19937_64 rng(seed);
    // Modulo draws keep the byte stream identical across standard libraries.
    auto draw = [&rng](std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };

    Instance inst;
    inst.machines.reserve(params.m);
    for (int i = 0; i < params.m; ++i)
        inst.machines.push_back({draw(1, params.max_p), static_cast<int>(draw(1, params.max_b))});
    inst.jobs.reserve(params.n);
    for (int j = 0; j < params.n; ++j) {
        Job job;
        job.r = params.max_r == 0 ? 0 : draw(0, params.max_r);
        if (params.with_due_dates) job.d = draw(params.due_min, params.due_max);
        if (params.with_weights) job.w = draw(params.weight_min, params.weight_max);
        inst.jobs.push_back(job);
    }
    return inst;
}

}  // namespace pfb
