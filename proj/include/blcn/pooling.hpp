#pragma once

#include "blcn/tensor.hpp"

namespace blcn {

// Output length of a 1-D pool with floor semantics (trailing partial windows
// dropped): L' = floor((L - pool) / stride) + 1, requires L >= pool.
std::size_t avgpool1d_output_length(std::size_t length, std::size_t pool, std::size_t stride);

// x [L x C] -> [L' x C], each output the arithmetic mean of a pool-long window.
Tensor avgpool1d_forward(const Tensor& x, std::size_t pool, std::size_t stride);

// Distributes grad/pool back to every input position a window covered.
Tensor avgpool1d_backward(std::size_t input_length, std::size_t pool, std::size_t stride,
                          const Tensor& grad_out);

}  // namespace blcn
