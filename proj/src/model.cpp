#include "blcn/model.hpp"

#include <tuple>

#include "blcn/batchnorm.hpp"
#include "blcn/bilstm.hpp"
#include "blcn/conv1d.hpp"
#include "blcn/dense.hpp"
#include "blcn/init.hpp"
#include "blcn/pooling.hpp"

namespace blcn {

void ModelConfig::validate() const {
    if (time_steps < 1) throw BuildError("config: time_steps must be >= 1");
    if (num_classes < 2) throw BuildError("config: num_classes must be >= 2");
    if (input_features == 0 || conv_kernels == 0 || conv_kernel_size == 0 || pool_size == 0 ||
        pool_stride == 0)
        throw BuildError("config: all sizes must be positive");
    if (bilstm_hidden.empty()) throw BuildError("config: at least one BiLSTM layer required");
    for (std::size_t h : bilstm_hidden)
        if (h == 0) throw BuildError("config: bilstm_hidden entries must be positive");
    for (std::size_t d : dense_sizes)
        if (d == 0) throw BuildError("config: dense_sizes entries must be positive");
    if (bn_epsilon <= 0.0) throw BuildError("config: bn_epsilon must be positive");
    if (bn_momentum <= 0.0 || bn_momentum >= 1.0) throw BuildError("config: bn_momentum must be in (0,1)");
}

namespace {

// Copy sample s out of a [B x T x F] batch as [T x F].
Tensor sample_slice(const Tensor& batch, std::size_t s) {
    const std::size_t T = batch.dim(1), F = batch.dim(2);
    Tensor out({T, F});
    const double* src = batch.data() + s * T * F;
    std::copy(src, src + T * F, out.data());
    return out;
}

void store_sample(Tensor& batch, std::size_t s, const Tensor& sample) {
    const std::size_t n = sample.size();
    std::copy(sample.data(), sample.data() + n, batch.data() + s * n);
}

class BatchNormLayer final : public Layer {
public:
    BatchNormLayer(std::string name, std::size_t features, double momentum, double epsilon)
        : name_(std::move(name)), state_(BatchNormState::init(features, momentum, epsilon)),
          dgamma_({features}), dbeta_({features}) {}

    const std::string& name() const override { return name_; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override {
        if (input.empty() || input.back() != state_.features())
            throw ShapeError("feature dimension " + (input.empty() ? "none" : std::to_string(input.back())) +
                             " does not match batchnorm width " + std::to_string(state_.features()));
        return input;
    }

    Tensor forward(const Tensor& x, bool training) override {
        in_shape_ = x.shape();
        const std::size_t F = state_.features();
        Tensor rows = x.reshaped({x.size() / F, F});
        Tensor out = batchnorm_forward(state_, rows, training, training ? &cache_ : nullptr);
        return out.reshaped(in_shape_);
    }

    Tensor backward(const Tensor& grad_out) override {
        const std::size_t F = state_.features();
        BatchNormGrads g = batchnorm_backward(state_, cache_, grad_out.reshaped({grad_out.size() / F, F}));
        add_in_place(dgamma_, g.dgamma);
        add_in_place(dbeta_, g.dbeta);
        return g.dx.reshaped(in_shape_);
    }

    void register_params(ParamStore& store) override {
        store.add(name_ + ".gamma", &state_.gamma, &dgamma_);
        store.add(name_ + ".beta", &state_.beta, &dbeta_);
        store.add_stat(name_ + ".moving_mean", &state_.moving_mean);
        store.add_stat(name_ + ".moving_var", &state_.moving_var);
    }

    void init_params(Rng&) override {
        state_.gamma.fill(1.0);
        state_.beta.fill(0.0);
        state_.moving_mean.fill(0.0);
        state_.moving_var.fill(1.0);
    }

private:
    std::string name_;
    BatchNormState state_;
    Tensor dgamma_, dbeta_;
    BatchNormCache cache_;
    std::vector<std::size_t> in_shape_;
};

class AvgPoolLayer final : public Layer {
public:
    AvgPoolLayer(std::string name, std::size_t pool, std::size_t stride)
        : name_(std::move(name)), pool_(pool), stride_(stride) {}

    const std::string& name() const override { return name_; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override {
        if (input.size() != 2)
            throw ShapeError("expected [time x channels] input, got rank " + std::to_string(input.size()));
        return {avgpool1d_output_length(input[0], pool_, stride_), input[1]};
    }

    Tensor forward(const Tensor& x, bool) override {
        const std::size_t B = x.dim(0);
        in_length_ = x.dim(1);
        const std::size_t Lout = avgpool1d_output_length(in_length_, pool_, stride_);
        Tensor out({B, Lout, x.dim(2)});
        for (std::size_t s = 0; s < B; ++s)
            store_sample(out, s, avgpool1d_forward(sample_slice(x, s), pool_, stride_));
        return out;
    }

    Tensor backward(const Tensor& grad_out) override {
        const std::size_t B = grad_out.dim(0);
        Tensor dx({B, in_length_, grad_out.dim(2)});
        for (std::size_t s = 0; s < B; ++s)
            store_sample(dx, s, avgpool1d_backward(in_length_, pool_, stride_, sample_slice(grad_out, s)));
        return dx;
    }

private:
    std::string name_;
    std::size_t pool_, stride_;
    std::size_t in_length_ = 0;
};

class BiLstmLayer final : public Layer {
public:
    BiLstmLayer(std::string name, std::size_t input_dim, std::size_t hidden_dim)
        : name_(std::move(name)),
          params_(BiLstmParams::zeros(input_dim, hidden_dim, BiLstmMode::Concat)),
          grads_(BiLstmParams::zeros(input_dim, hidden_dim, BiLstmMode::Concat)) {}

    const std::string& name() const override { return name_; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override {
        if (input.size() != 2 || input[1] != params_.input_dim())
            throw ShapeError("expected [time x " + std::to_string(params_.input_dim()) +
                             "] input, got " + shape_to_string(input));
        return {input[0], params_.output_dim()};
    }

    Tensor forward(const Tensor& x, bool) override {
        const std::size_t B = x.dim(0), T = x.dim(1);
        caches_.assign(B, SeqCache{});
        Tensor out({B, T, params_.output_dim()});
        for (std::size_t s = 0; s < B; ++s)
            store_sample(out, s, bilstm_forward(params_, sample_slice(x, s), &caches_[s]));
        return out;
    }

    Tensor backward(const Tensor& grad_out) override {
        const std::size_t B = grad_out.dim(0), T = grad_out.dim(1);
        Tensor dx({B, T, params_.input_dim()});
        for (std::size_t s = 0; s < B; ++s) {
            BiLstmGrads g = bilstm_backward(params_, caches_[s], sample_slice(grad_out, s));
            grads_.forward.add_scaled(g.params.forward, 1.0);
            grads_.backward.add_scaled(g.params.backward, 1.0);
            store_sample(dx, s, g.dx_seq);
        }
        return dx;
    }

    void register_params(ParamStore& store) override {
        auto add_dir = [&](const char* dir, LstmParams& p, LstmParams& g) {
            const std::string base = name_ + "." + dir + ".";
            store.add(base + "W_xi", &p.W_xi, &g.W_xi);
            store.add(base + "W_xg", &p.W_xg, &g.W_xg);
            store.add(base + "W_xf", &p.W_xf, &g.W_xf);
            store.add(base + "W_xo", &p.W_xo, &g.W_xo);
            store.add(base + "U_hi", &p.U_hi, &g.U_hi);
            store.add(base + "U_hg", &p.U_hg, &g.U_hg);
            store.add(base + "U_hf", &p.U_hf, &g.U_hf);
            store.add(base + "U_ho", &p.U_ho, &g.U_ho);
            store.add(base + "b_i", &p.b_i, &g.b_i);
            store.add(base + "b_g", &p.b_g, &g.b_g);
            store.add(base + "b_f", &p.b_f, &g.b_f);
            store.add(base + "b_o", &p.b_o, &g.b_o);
        };
        add_dir("fw", params_.forward, grads_.forward);
        add_dir("bw", params_.backward, grads_.backward);
    }

    void init_params(Rng& rng) override {
        const std::size_t d = params_.input_dim(), u = params_.hidden_dim();
        for (LstmParams* p : {&params_.forward, &params_.backward}) {
            for (Tensor* w : {&p->W_xi, &p->W_xg, &p->W_xf, &p->W_xo})
                *w = he_uniform({u, d}, d, rng);
            for (Tensor* rw : {&p->U_hi, &p->U_hg, &p->U_hf, &p->U_ho})
                *rw = truncated_normal({u, u}, 0.0, 0.05, rng);
            for (Tensor* b : {&p->b_i, &p->b_g, &p->b_f, &p->b_o}) b->fill(0.0);
        }
    }

private:
    std::string name_;
    BiLstmParams params_, grads_;
    std::vector<SeqCache> caches_;
};

// Conv1D with 'same' zero padding around the valid-conv primitive, ReLU after.
class ConvLayer final : public Layer {
public:
    ConvLayer(std::string name, std::size_t kernels, std::size_t kernel_size, std::size_t in_channels)
        : name_(std::move(name)), kernels_({kernels, kernel_size, in_channels}),
          bias_({kernels}), dkernels_({kernels, kernel_size, in_channels}), dbias_({kernels}) {}

    const std::string& name() const override { return name_; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override {
        if (input.size() != 2 || input[1] != kernels_.dim(2))
            throw ShapeError("expected [time x " + std::to_string(kernels_.dim(2)) +
                             "] input, got " + shape_to_string(input));
        return {input[0], kernels_.dim(0)};
    }

    Tensor forward(const Tensor& x, bool) override {
        const std::size_t B = x.dim(0), L = x.dim(1), K = kernels_.dim(0);
        in_length_ = L;
        padded_.assign(B, Tensor{});
        preact_.assign(B, Tensor{});
        Tensor out({B, L, K});
        for (std::size_t s = 0; s < B; ++s) {
            padded_[s] = pad_same(sample_slice(x, s));
            preact_[s] = conv1d_forward(kernels_, bias_, padded_[s]);
            store_sample(out, s, relu(preact_[s]));
        }
        return out;
    }

    Tensor backward(const Tensor& grad_out) override {
        const std::size_t B = grad_out.dim(0);
        const std::size_t left = (kernels_.dim(1) - 1) / 2;
        Tensor dx({B, in_length_, kernels_.dim(2)});
        for (std::size_t s = 0; s < B; ++s) {
            Tensor dz = sample_slice(grad_out, s);
            for (std::size_t i = 0; i < dz.size(); ++i)
                if (preact_[s][i] <= 0.0) dz[i] = 0.0;
            Conv1dGrads g = conv1d_backward(kernels_, padded_[s], dz);
            add_in_place(dkernels_, g.dkernels);
            add_in_place(dbias_, g.dbias);
            // crop the padding back off
            Tensor dxs({in_length_, kernels_.dim(2)});
            for (std::size_t t = 0; t < in_length_; ++t)
                for (std::size_t c = 0; c < kernels_.dim(2); ++c) dxs.at(t, c) = g.dx.at(t + left, c);
            store_sample(dx, s, dxs);
        }
        return dx;
    }

    void register_params(ParamStore& store) override {
        store.add(name_ + ".kernels", &kernels_, &dkernels_);
        store.add(name_ + ".bias", &bias_, &dbias_);
    }

    void init_params(Rng& rng) override {
        const std::size_t fan_in = kernels_.dim(1) * kernels_.dim(2);
        kernels_ = he_uniform(kernels_.shape(), fan_in, rng);
        bias_.fill(0.0);
    }

private:
    Tensor pad_same(const Tensor& x) const {
        const std::size_t k = kernels_.dim(1), left = (k - 1) / 2, right = k - 1 - left;
        const std::size_t L = x.dim(0), C = x.dim(1);
        Tensor padded({L + left + right, C});
        for (std::size_t t = 0; t < L; ++t)
            for (std::size_t c = 0; c < C; ++c) padded.at(t + left, c) = x.at(t, c);
        return padded;
    }

    std::string name_;
    Tensor kernels_, bias_, dkernels_, dbias_;
    std::vector<Tensor> padded_, preact_;
    std::size_t in_length_ = 0;
};

class FlattenLayer final : public Layer {
public:
    explicit FlattenLayer(std::string name) : name_(std::move(name)) {}

    const std::string& name() const override { return name_; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override {
        std::size_t n = 1;
        for (std::size_t d : input) n *= d;
        return {n};
    }

    Tensor forward(const Tensor& x, bool) override {
        in_shape_ = x.shape();
        return x.reshaped({x.dim(0), x.size() / x.dim(0)});
    }

    Tensor backward(const Tensor& grad_out) override { return grad_out.reshaped(in_shape_); }

private:
    std::string name_;
    std::vector<std::size_t> in_shape_;
};

enum class DenseActivation { None, Relu, Softmax };

class DenseLayer final : public Layer {
public:
    DenseLayer(std::string name, std::size_t in_dim, std::size_t out_dim, DenseActivation act)
        : name_(std::move(name)), W_({out_dim, in_dim}), b_({out_dim}), dW_({out_dim, in_dim}),
          db_({out_dim}), act_(act) {}

    const std::string& name() const override { return name_; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override {
        if (input.size() != 1 || input[0] != W_.dim(1))
            throw ShapeError("expected flat input of width " + std::to_string(W_.dim(1)) +
                             ", got " + shape_to_string(input));
        return {W_.dim(0)};
    }

    Tensor forward(const Tensor& x, bool) override {
        input_ = x;
        preact_ = dense_forward(W_, b_, x);
        switch (act_) {
            case DenseActivation::None:
                return preact_;
            case DenseActivation::Relu:
                return relu(preact_);
            case DenseActivation::Softmax: {
                Tensor out(preact_.shape());
                for (std::size_t s = 0; s < preact_.dim(0); ++s) {
                    Tensor row({preact_.dim(1)});
                    for (std::size_t j = 0; j < row.size(); ++j) row[j] = preact_.at(s, j);
                    store_sample(out, s, softmax(row));
                }
                return out;
            }
        }
        return preact_;
    }

    Tensor backward(const Tensor& grad_out) override {
        Tensor dz = grad_out;
        // Softmax is fused with cross-entropy: upstream is already the
        // gradient w.r.t. the pre-activation.
        if (act_ == DenseActivation::Relu) {
            for (std::size_t i = 0; i < dz.size(); ++i)
                if (preact_[i] <= 0.0) dz[i] = 0.0;
        }
        DenseGrads g = dense_backward(W_, input_, dz);
        add_in_place(dW_, g.dW);
        add_in_place(db_, g.dbias);
        return g.dx;
    }

    void register_params(ParamStore& store) override {
        store.add(name_ + ".W", &W_, &dW_);
        store.add(name_ + ".b", &b_, &db_);
    }

    void init_params(Rng& rng) override {
        W_ = he_uniform(W_.shape(), W_.dim(1), rng);
        b_.fill(0.0);
    }

private:
    std::string name_;
    Tensor W_, b_, dW_, db_;
    DenseActivation act_;
    Tensor input_, preact_;
};

class SoftmaxLayer final : public Layer {
public:
    explicit SoftmaxLayer(std::string name) : name_(std::move(name)) {}

    const std::string& name() const override { return name_; }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& input) const override {
        if (input.size() != 1)
            throw ShapeError("expected flat logits, got " + shape_to_string(input));
        return input;
    }

    Tensor forward(const Tensor& x, bool) override {
        Tensor out(x.shape());
        for (std::size_t s = 0; s < x.dim(0); ++s) {
            Tensor row({x.dim(1)});
            for (std::size_t j = 0; j < row.size(); ++j) row[j] = x.at(s, j);
            store_sample(out, s, softmax(row));
        }
        return out;
    }

    // Fused with cross-entropy: the incoming gradient is already w.r.t. the
    // logits, so it passes through unchanged.
    Tensor backward(const Tensor& grad_out) override { return grad_out; }

private:
    std::string name_;
};

}  // namespace

Model build_model(const ModelConfig& config) {
    config.validate();

    Model model;
    model.config_ = config;
    auto& layers = model.layers_;

    layers.push_back(std::make_unique<BatchNormLayer>("batchnorm1", config.input_features,
                                                      config.bn_momentum, config.bn_epsilon));
    layers.push_back(std::make_unique<AvgPoolLayer>("avgpool1", config.pool_size, config.pool_stride));

    std::size_t width = config.input_features;
    for (std::size_t i = 0; i < config.bilstm_hidden.size(); ++i) {
        layers.push_back(std::make_unique<BiLstmLayer>("bilstm" + std::to_string(i + 1), width,
                                                       config.bilstm_hidden[i]));
        width = 2 * config.bilstm_hidden[i];
    }
    layers.push_back(std::make_unique<ConvLayer>("conv1", config.conv_kernels, config.conv_kernel_size, width));
    layers.push_back(std::make_unique<ConvLayer>("conv2", config.conv_kernels, config.conv_kernel_size,
                                                 config.conv_kernels));
    layers.push_back(std::make_unique<AvgPoolLayer>("avgpool2", config.pool_size, config.pool_stride));
    layers.push_back(std::make_unique<FlattenLayer>("flatten"));

    // Flat width is resolved by the shape walk below; dense layers need it up
    // front, so compute the time-axis arithmetic here. Failures must surface
    // as BuildError naming the pool stage, same as the walk would.
    auto pooled_steps = [&](std::size_t length, const char* which) {
        try {
            return avgpool1d_output_length(length, config.pool_size, config.pool_stride);
        } catch (const ShapeError& e) {
            throw BuildError("layer '" + std::string(which) +
                             "' cannot pool the time axis: " + e.what());
        }
    };
    const std::size_t t_pool1 = pooled_steps(config.time_steps, "avgpool1");
    const std::size_t t_pool2 = pooled_steps(t_pool1, "avgpool2");
    std::size_t flat = t_pool2 * config.conv_kernels;

    for (std::size_t i = 0; i < config.dense_sizes.size(); ++i) {
        layers.push_back(std::make_unique<DenseLayer>("dense" + std::to_string(i + 1), flat,
                                                      config.dense_sizes[i], DenseActivation::Relu));
        flat = config.dense_sizes[i];
    }
    const std::size_t head = config.dense_sizes.size() + 1;
    layers.push_back(std::make_unique<DenseLayer>(
        "dense" + std::to_string(head), flat, config.num_classes,
        config.fused_softmax ? DenseActivation::Softmax : DenseActivation::None));
    if (!config.fused_softmax) layers.push_back(std::make_unique<SoftmaxLayer>("softmax"));

    // Build-time shape walk; any incompatibility is reported against the pair
    // of layers involved, never deferred to forward time.
    std::vector<std::size_t> shape = {config.time_steps, config.input_features};
    for (std::size_t i = 0; i < layers.size(); ++i) {
        try {
            shape = layers[i]->output_shape(shape);
        } catch (const ShapeError& e) {
            const std::string prev = i == 0 ? "input" : "layer '" + layers[i - 1]->name() + "'";
            throw BuildError("layer '" + layers[i]->name() + "' incompatible with " + prev + ": " +
                             e.what());
        }
    }

    for (auto& layer : layers) layer->register_params(model.params_);
    return model;
}

void init_params(Model& model, Rng& rng) {
    for (std::size_t i = 0; i < model.layer_count(); ++i) model.layer(i).init_params(rng);
}

Tensor Model::forward(const Tensor& batch, bool training) {
    if (batch.rank() != 3 || batch.dim(1) != config_.time_steps || batch.dim(2) != config_.input_features)
        throw ShapeError("model forward: batch shape " + shape_to_string(batch.shape()) +
                         " vs expected (B, " + std::to_string(config_.time_steps) + ", " +
                         std::to_string(config_.input_features) + ")");
    Tensor x = batch;
    for (auto& layer : layers_) x = layer->forward(x, training);
    forward_ran_ = training;  // backward is only meaningful after a train pass
    return x;
}

void Model::backward(const Tensor& grad_logits) {
    if (!forward_ran_)
        throw std::logic_error("model backward: no forward cache (call forward(train) first)");
    params_.zero_grads();
    Tensor g = grad_logits;
    for (std::size_t i = layers_.size(); i-- > 0;) g = layers_[i]->backward(g);
}

ParamCounts count_params(const Model& model) {
    ParamCounts c;
    c.trainable = model.params().trainable_count();
    c.total = model.params().total_count();
    return c;
}

std::vector<std::tuple<std::string, std::size_t, std::size_t>> closed_form_layer_counts(
    const ModelConfig& config) {
    config.validate();
    std::vector<std::tuple<std::string, std::size_t, std::size_t>> rows;
    const std::size_t F = config.input_features;
    rows.emplace_back("batchnorm1", 2 * F, 4 * F);
    rows.emplace_back("avgpool1", 0, 0);

    std::size_t width = F;
    for (std::size_t i = 0; i < config.bilstm_hidden.size(); ++i) {
        const std::size_t u = config.bilstm_hidden[i];
        const std::size_t n = 2 * (4 * u * (width + u + 1));
        rows.emplace_back("bilstm" + std::to_string(i + 1), n, n);
        width = 2 * u;
    }
    const std::size_t K = config.conv_kernels, k = config.conv_kernel_size;
    rows.emplace_back("conv1", K * k * width + K, K * k * width + K);
    rows.emplace_back("conv2", K * k * K + K, K * k * K + K);
    rows.emplace_back("avgpool2", 0, 0);
    rows.emplace_back("flatten", 0, 0);

    const std::size_t t1 = avgpool1d_output_length(config.time_steps, config.pool_size, config.pool_stride);
    const std::size_t t2 = avgpool1d_output_length(t1, config.pool_size, config.pool_stride);
    std::size_t flat = t2 * K;
    for (std::size_t i = 0; i < config.dense_sizes.size(); ++i) {
        const std::size_t n = config.dense_sizes[i] * (flat + 1);
        rows.emplace_back("dense" + std::to_string(i + 1), n, n);
        flat = config.dense_sizes[i];
    }
    const std::size_t n_head = config.num_classes * (flat + 1);
    rows.emplace_back("dense" + std::to_string(config.dense_sizes.size() + 1), n_head, n_head);
    if (!config.fused_softmax) rows.emplace_back("softmax", 0, 0);
    return rows;
}

ParamCounts closed_form_param_count(const ModelConfig& config) {
    ParamCounts c;
    for (const auto& [name, trainable, total] : closed_form_layer_counts(config)) {
        c.trainable += trainable;
        c.total += total;
    }
    return c;
}

}  // namespace blcn
