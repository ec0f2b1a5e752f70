#pragma once

#include "blcn/tensor.hpp"

namespace blcn {

// Per-feature normalization state. gamma/beta are trainable; the moving
// statistics are running estimates used in inference mode only.
struct BatchNormState {
    Tensor gamma, beta;              // [F], trainable
    Tensor moving_mean, moving_var;  // [F], non-trainable
    double momentum = 0.99;
    double epsilon = 1e-3;

    static BatchNormState init(std::size_t features, double momentum = 0.99, double epsilon = 1e-3);
    std::size_t features() const { return gamma.dim(0); }
    void validate() const;
};

struct BatchNormCache {
    Tensor x_centered;  // x - batch mean, [B x F]
    Tensor x_hat;       // normalized, [B x F]
    Tensor inv_std;     // 1/sqrt(var + eps), [F]
};

// Train mode normalizes by batch statistics (and updates the moving stats
// in place: m <- momentum*m + (1-momentum)*batch); infer mode uses the
// moving stats only. x is [B x F]; train mode requires B >= 2.
Tensor batchnorm_forward(BatchNormState& state, const Tensor& x, bool training,
                         BatchNormCache* cache = nullptr);

struct BatchNormGrads {
    Tensor dgamma, dbeta;
    Tensor dx;
};

// Standard train-mode gradient including the batch mean/variance paths.
BatchNormGrads batchnorm_backward(const BatchNormState& state, const BatchNormCache& cache,
                                  const Tensor& grad_out);

}  // namespace blcn
