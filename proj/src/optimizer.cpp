#include "blcn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace blcn {

AdamState AdamState::init(const ParamStore& params) {
    AdamState state;
    for (const ParamStore::Entry& e : params.entries()) {
        if (!e.trainable) continue;
        state.m.emplace_back(e.value->shape());
        state.v.emplace_back(e.value->shape());
    }
    return state;
}

void adam_step(ParamStore& params, AdamState& state, double lr) {
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));

    std::size_t slot = 0;
    for (const ParamStore::Entry& e : params.entries()) {
        if (!e.trainable) continue;
        if (slot >= state.m.size())
            throw std::invalid_argument("adam_step: state has fewer slots than trainable params");
        Tensor& m = state.m[slot];
        Tensor& v = state.v[slot];
        if (!m.same_shape(*e.value))
            throw std::invalid_argument("adam_step: state shape mismatch for '" + e.name + "'");
        Tensor& p = *e.value;
        const Tensor& g = *e.grad;
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + state.epsilon);
        }
        ++slot;
    }
    if (slot != state.m.size())
        throw std::invalid_argument("adam_step: state has more slots than trainable params");
}

void sgd_step(ParamStore& params, double lr) {
    for (const ParamStore::Entry& e : params.entries()) {
        if (!e.trainable) continue;
        Tensor& p = *e.value;
        const Tensor& g = *e.grad;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
    }
}

}  // namespace blcn
