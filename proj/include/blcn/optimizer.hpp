#pragma once

#include <cstdint>
#include <vector>

#include "blcn/param_store.hpp"

namespace blcn {

// First/second-moment buffers, one pair per *trainable* ParamStore entry,
// in store order. Non-trainable entries (batch-norm moving stats) have no
// slot and are never touched by a step.
struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t t = 0;  // completed steps
    std::vector<Tensor> m, v;

    static AdamState init(const ParamStore& params);
};

// One bias-corrected Adam update, in place, over every trainable entry:
//   m <- b1*m + (1-b1)*g ; v <- b2*v + (1-b2)*g^2
//   p <- p - lr * (m/(1-b1^t)) / (sqrt(v/(1-b2^t)) + eps)
void adam_step(ParamStore& params, AdamState& state, double lr);

// Plain p <- p - lr * g over every trainable entry.
void sgd_step(ParamStore& params, double lr);

}  // namespace blcn
