#pragma once

#include "blcn/tensor.hpp"

namespace blcn {

// Affine map over a batch: y[b] = W x[b] + bias, W [out x in], x [B x in].
Tensor dense_forward(const Tensor& W, const Tensor& bias, const Tensor& x);

struct DenseGrads {
    Tensor dW, dbias, dx;
};

DenseGrads dense_backward(const Tensor& W, const Tensor& x, const Tensor& grad_out);

}  // namespace blcn
