#pragma once

#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "blcn/param_store.hpp"
#include "blcn/rng.hpp"
#include "blcn/tensor.hpp"

namespace blcn {

class BuildError : public std::runtime_error {
public:
    explicit BuildError(const std::string& what) : std::runtime_error(what) {}
};

// Widths and knobs of the eleven-layer stack:
//   BatchNorm, AvgPool1D, BiLSTM, BiLSTM, Conv1D+ReLU, Conv1D+ReLU,
//   AvgPool1D, Flatten, Dense+ReLU, Dense, Softmax
// The conv steps zero-pad their input ('same') so the time axis survives the
// first pooling stage; the conv primitive itself is valid-only.
struct ModelConfig {
    std::size_t time_steps = 10;
    std::size_t input_features = 15;
    std::vector<std::size_t> bilstm_hidden = {8, 8};
    std::size_t conv_kernels = 128;
    std::size_t conv_kernel_size = 3;
    std::size_t pool_size = 3;
    std::size_t pool_stride = 2;
    std::vector<std::size_t> dense_sizes = {32};
    std::size_t num_classes = 5;
    std::uint64_t seed = 42;
    double bn_momentum = 0.99;
    double bn_epsilon = 1e-3;
    // Fold softmax into the final dense as its activation instead of keeping
    // it as a standalone (parameterless) layer. Changes layer count, not math.
    bool fused_softmax = false;

    void validate() const;
    bool operator==(const ModelConfig&) const = default;
};

// One node of the assembled stack. Batch tensors flow through forward and
// backward; each layer keeps whatever cache its backward needs.
class Layer {
public:
    virtual ~Layer() = default;
    virtual const std::string& name() const = 0;
    // Per-sample output shape given the per-sample input shape (build-time check).
    virtual std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const = 0;
    virtual Tensor forward(const Tensor& x, bool training) = 0;
    virtual Tensor backward(const Tensor& grad_out) = 0;
    virtual void register_params(ParamStore&) {}
    virtual void init_params(Rng&) {}
};

class Model {
public:
    Model() = default;
    Model(Model&&) = default;
    Model& operator=(Model&&) = default;
    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;

    const ModelConfig& config() const { return config_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }
    std::size_t layer_count() const { return layers_.size(); }
    const Layer& layer(std::size_t i) const { return *layers_[i]; }
    Layer& layer(std::size_t i) { return *layers_[i]; }

    // Per-sample class distribution; batch is [B x time_steps x features].
    Tensor forward(const Tensor& batch, bool training);

    // Populates every trainable parameter's gradient buffer. grad_logits is
    // the loss gradient w.r.t. the softmax *input* (the fused softmax +
    // cross-entropy convention); requires a preceding train-mode forward.
    void backward(const Tensor& grad_logits);

    friend Model build_model(const ModelConfig& config);

private:
    ModelConfig config_;
    std::vector<std::unique_ptr<Layer>> layers_;
    ParamStore params_;
    bool forward_ran_ = false;
};

// Assembles and shape-checks the stack. Rejects invalid shape chains at
// build time with an error naming both offending layers.
Model build_model(const ModelConfig& config);

// Draws every parameter per the initialization scheme: recurrent weights
// truncated_normal(0, 0.05), conv kernels and feedforward weights he_uniform,
// biases zero, batch-norm gamma 1 / beta 0 / moving stats (0, 1).
void init_params(Model& model, Rng& rng);

struct ParamCounts {
    std::size_t trainable = 0;
    std::size_t total = 0;  // trainable + batch-norm moving statistics
    bool operator==(const ParamCounts&) const = default;
};

// Counts by walking the actual ParamStore tensors.
ParamCounts count_params(const Model& model);

// Same counts derived arithmetically from the config alone, without building
// a model. Kept deliberately separate from count_params as a second route.
ParamCounts closed_form_param_count(const ModelConfig& config);

// Per-layer (name, trainable, total) breakdown from the closed form.
std::vector<std::tuple<std::string, std::size_t, std::size_t>> closed_form_layer_counts(
    const ModelConfig& config);

}  // namespace blcn
