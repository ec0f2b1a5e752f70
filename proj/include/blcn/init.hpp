#pragma once

#include "blcn/rng.hpp"
#include "blcn/tensor.hpp"

namespace blcn {

// Normal(mean, std) with resampling outside mean +/- 2*std.
Tensor truncated_normal(std::vector<std::size_t> shape, double mean, double stddev, Rng& rng);

// Uniform in [-sqrt(6/fan_in), +sqrt(6/fan_in)].
Tensor he_uniform(std::vector<std::size_t> shape, std::size_t fan_in, Rng& rng);

}  // namespace blcn
