#pragma once

#include "blcn/tensor.hpp"

namespace blcn {

// Valid (no-padding) cross-correlation along the time axis, stride 1.
// kernels [K x k x Cin], bias [K], x [L x Cin] -> [(L-k+1) x K].
// No activation here; that is a separate layer step.
Tensor conv1d_forward(const Tensor& kernels, const Tensor& bias, const Tensor& x);

struct Conv1dGrads {
    Tensor dkernels;
    Tensor dbias;
    Tensor dx;
};

Conv1dGrads conv1d_backward(const Tensor& kernels, const Tensor& x, const Tensor& grad_out);

}  // namespace blcn
