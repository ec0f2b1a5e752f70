#pragma once

#include "blcn/tensor.hpp"

namespace blcn {

struct LossResult {
    double loss = 0.0;
    // Gradient w.r.t. the softmax *input*: (probs - onehot) / B. Feeding this
    // to Model::backward realizes the fused softmax + cross-entropy gradient.
    Tensor grad_logits;
};

// Mean over the batch of -log p(true class), log clamped at 1e-12.
// probs and onehot are both [B x C]; onehot rows must contain exactly one 1
// and zeros elsewhere.
LossResult cross_entropy(const Tensor& probs, const Tensor& onehot);

}  // namespace blcn
