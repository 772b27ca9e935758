#pragma once

#include <cstdint>

#include "pfb/types.hpp"

namespace pfb {

// Uniform random instances; the same seed always yields the same instance,
// byte-identical after serialization.
struct GenParams {
    int n = 1;
    int m = 1;
    Time max_p = 5;
    int max_b = 4;
    Time max_r = 0;  // 0 means all release dates zero
    bool with_due_dates = false;
    Time due_min = 0;
    Time due_max = 0;
    bool with_weights = false;
    std::int64_t weight_min = 0;
    std::int64_t weight_max = 0;
};

Instance generate_instance(const GenParams& params, std::uint64_t seed);

}  // namespace pfb
