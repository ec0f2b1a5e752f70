#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>

#include "blcn/checkpoint.hpp"
#include "blcn/loss.hpp"
#include "blcn/model.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace blcn;

namespace {

ModelConfig tiny_config() {
    // F=4, hidden=3, 8 kernels, dense 6 — small enough to finite-difference
    ModelConfig cfg;
    cfg.input_features = 4;
    cfg.bilstm_hidden = {3, 3};
    cfg.conv_kernels = 8;
    cfg.dense_sizes = {6};
    return cfg;
}

Model built_and_initialized(const ModelConfig& cfg, std::uint64_t seed = 42) {
    Model m = build_model(cfg);
    Rng rng = Rng::substream(seed, "init");
    init_params(m, rng);
    return m;
}

Tensor random_batch(const ModelConfig& cfg, std::size_t B, Rng& rng) {
    return oracle::random_tensor({B, cfg.time_steps, cfg.input_features}, rng);
}

Tensor onehot_rows(std::size_t B, std::size_t classes, Rng& rng) {
    Tensor y({B, classes});
    for (std::size_t b = 0; b < B; ++b) y.at(b, rng.bounded(classes)) = 1.0;
    return y;
}

}  // namespace

TEST_CASE("default build has exactly 11 layers; fused softmax has 10") {
    Model m = build_model(ModelConfig{});
    CHECK(m.layer_count() == 11);
    ModelConfig fused;
    fused.fused_softmax = true;
    CHECK(build_model(fused).layer_count() == 10);
}

TEST_CASE("first pool leaves 4 of 10 time steps") {
    Model m = build_model(ModelConfig{});
    // layer 0 batchnorm, layer 1 avgpool
    const std::vector<std::size_t> out = m.layer(1).output_shape({10, 15});
    REQUIRE(out.size() == 2);
    CHECK(out[0] == 4);
    CHECK(out[1] == 15);
}

TEST_CASE("conv layers carry 128 kernels of width 3") {
    Model m = built_and_initialized(ModelConfig{});
    bool saw_conv1 = false, saw_conv2 = false;
    for (const auto& e : m.params().entries()) {
        if (e.name == "conv1.kernels") {
            saw_conv1 = true;
            CHECK(e.value->shape() == std::vector<std::size_t>{128, 3, 16});
        }
        if (e.name == "conv2.kernels") {
            saw_conv2 = true;
            CHECK(e.value->shape() == std::vector<std::size_t>{128, 3, 128});
        }
    }
    CHECK(saw_conv1);
    CHECK(saw_conv2);
}

TEST_CASE("invalid configs are rejected at build time with layer names") {
    ModelConfig bad;
    bad.num_classes = 1;
    CHECK_THROWS_AS(build_model(bad), BuildError);

    ModelConfig shallow;  // 10 -> pool(5,5) -> 2 steps, second pool needs 5
    shallow.pool_size = 5;
    shallow.pool_stride = 5;
    try {
        build_model(shallow);
        FAIL("expected BuildError");
    } catch (const BuildError& e) {
        CHECK(std::string(e.what()).find("avgpool2") != std::string::npos);
    }

    ModelConfig zero_hidden;
    zero_hidden.bilstm_hidden = {4, 0};
    CHECK_THROWS_AS(build_model(zero_hidden), BuildError);
}

TEST_CASE("initialization: recurrent weights in [-0.1, 0.1], biases zero, deterministic") {
    Model a = built_and_initialized(ModelConfig{}, 7);
    for (const auto& e : a.params().entries()) {
        if (e.name.find("U_h") != std::string::npos)
            for (std::size_t i = 0; i < e.value->size(); ++i) {
                CHECK((*e.value)[i] >= -0.1);
                CHECK((*e.value)[i] <= 0.1);
            }
        const bool is_bias = e.name.find(".b_") != std::string::npos ||
                             e.name.ends_with(".bias") || e.name.ends_with(".b") ||
                             e.name.ends_with(".beta");
        if (is_bias)
            for (std::size_t i = 0; i < e.value->size(); ++i) CHECK((*e.value)[i] == 0.0);
    }

    Model b = built_and_initialized(ModelConfig{}, 7);
    REQUIRE(a.params().size() == b.params().size());
    for (std::size_t i = 0; i < a.params().size(); ++i) {
        const Tensor& ta = *a.params().entries()[i].value;
        const Tensor& tb = *b.params().entries()[i].value;
        REQUIRE(ta.size() == tb.size());
        for (std::size_t j = 0; j < ta.size(); ++j) CHECK(ta[j] == tb[j]);
    }
}

TEST_CASE("param store layout is a pure function of the config") {
    Model a = build_model(tiny_config());
    Model b = build_model(tiny_config());
    REQUIRE(a.params().size() == b.params().size());
    for (std::size_t i = 0; i < a.params().size(); ++i) {
        CHECK(a.params().entries()[i].name == b.params().entries()[i].name);
        CHECK(a.params().entries()[i].value->shape() == b.params().entries()[i].value->shape());
    }
}

TEST_CASE("forward yields per-sample distributions over 5 classes") {
    Model m = built_and_initialized(ModelConfig{});
    Rng rng(5);
    Tensor batch = random_batch(m.config(), 3, rng);
    Tensor probs = m.forward(batch, false);
    REQUIRE(probs.shape() == std::vector<std::size_t>{3, 5});
    for (std::size_t b = 0; b < 3; ++b) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 5; ++c) {
            CHECK(probs.at(b, c) >= 0.0);
            sum += probs.at(b, c);
        }
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("identical samples in one infer batch produce identical rows") {
    Model m = built_and_initialized(tiny_config());
    Rng rng(9);
    Tensor batch = random_batch(m.config(), 2, rng);
    for (std::size_t t = 0; t < m.config().time_steps; ++t)
        for (std::size_t f = 0; f < m.config().input_features; ++f)
            batch.at(1, t, f) = batch.at(0, t, f);
    Tensor probs = m.forward(batch, false);
    for (std::size_t c = 0; c < m.config().num_classes; ++c)
        CHECK(probs.at(0, c) == probs.at(1, c));
}

TEST_CASE("forward rejects batches with the wrong time dimension") {
    Model m = built_and_initialized(tiny_config());
    Tensor bad({2, 7, 4});
    CHECK_THROWS_AS(m.forward(bad, false), ShapeError);
}

TEST_CASE("backward requires a preceding train-mode forward") {
    Model m = built_and_initialized(tiny_config());
    Tensor grad({2, 5});
    CHECK_THROWS_AS(m.backward(grad), std::logic_error);
    Rng rng(3);
    Tensor batch = random_batch(m.config(), 2, rng);
    m.forward(batch, false);  // infer-mode forward does not arm backward
    CHECK_THROWS_AS(m.backward(grad), std::logic_error);
}

TEST_CASE("zero loss gradient produces all-zero parameter gradients") {
    Model m = built_and_initialized(tiny_config());
    Rng rng(4);
    m.forward(random_batch(m.config(), 2, rng), true);
    m.backward(Tensor({2, 5}));
    for (const auto& e : m.params().entries())
        if (e.trainable)
            for (std::size_t i = 0; i < e.grad->size(); ++i) CHECK((*e.grad)[i] == 0.0);
}

TEST_CASE("batch-norm moving statistics carry no gradient buffer") {
    Model m = built_and_initialized(ModelConfig{});
    std::size_t stats_seen = 0;
    for (const auto& e : m.params().entries()) {
        if (!e.trainable) {
            ++stats_seen;
            CHECK(e.grad == nullptr);
            CHECK(e.name.find("moving") != std::string::npos);
        } else {
            CHECK(e.grad != nullptr);
        }
    }
    CHECK(stats_seen == 2);  // moving_mean, moving_var
}

TEST_CASE("end-to-end gradients match finite differences on the tiny config") {
    Model m = built_and_initialized(tiny_config(), 11);
    Rng rng(12);
    const std::size_t B = 2;
    Tensor batch = random_batch(m.config(), B, rng);
    Tensor onehot = onehot_rows(B, m.config().num_classes, rng);

    auto objective = [&]() {
        Tensor probs = m.forward(batch, true);
        return cross_entropy(probs, onehot).loss;
    };

    Tensor probs = m.forward(batch, true);
    LossResult loss = cross_entropy(probs, onehot);
    m.params().zero_grads();
    m.backward(loss.grad_logits);

    // 50 randomly sampled trainable slots, relative error < 1e-4
    std::vector<std::pair<Tensor*, Tensor*>> trainable;
    for (const auto& e : m.params().entries())
        if (e.trainable) trainable.push_back({e.value, e.grad});
    std::size_t checked = 0;
    while (checked < 50) {
        auto& [value, grad] = trainable[rng.bounded(trainable.size())];
        const std::size_t slot = rng.bounded(value->size());
        const double fd = oracle::central_diff(objective, (*value)[slot], 1e-6);
        const double analytic = (*grad)[slot];
        CHECK_MESSAGE(oracle::close_rel(analytic, fd, 1e-4),
                      "slot " << slot << ": analytic=" << analytic << " fd=" << fd);
        ++checked;
    }
}

TEST_CASE("count_params equals the closed form for the default and tiny configs") {
    for (const ModelConfig& cfg : {ModelConfig{}, tiny_config()}) {
        Model m = build_model(cfg);
        CHECK(count_params(m) == closed_form_param_count(cfg));
    }
    // the default stack's totals, fixed by the architecture
    const ParamCounts def = closed_form_param_count(ModelConfig{});
    CHECK(def.total - def.trainable == 2 * ModelConfig{}.input_features);
}

TEST_CASE("count_params equals the closed form on 50 random configs") {
    Rng rng(2024);
    std::size_t accepted = 0;
    while (accepted < 50) {
        ModelConfig cfg;
        cfg.time_steps = 5 + rng.bounded(12);
        cfg.input_features = 1 + rng.bounded(20);
        cfg.bilstm_hidden = {1 + rng.bounded(12)};
        if (rng.bounded(2)) cfg.bilstm_hidden.push_back(1 + rng.bounded(12));
        cfg.conv_kernels = 1 + rng.bounded(32);
        cfg.conv_kernel_size = 1 + rng.bounded(3);
        cfg.pool_size = 2 + rng.bounded(2);
        cfg.pool_stride = 1 + rng.bounded(3);
        cfg.dense_sizes = {1 + rng.bounded(40)};
        if (rng.bounded(2)) cfg.dense_sizes.push_back(1 + rng.bounded(16));
        cfg.num_classes = 2 + rng.bounded(6);
        cfg.fused_softmax = rng.bounded(2) == 1;
        Model m;
        try {
            m = build_model(cfg);
        } catch (const BuildError&) {
            continue;  // pooling chain infeasible for this draw
        }
        ++accepted;
        CHECK(count_params(m) == closed_form_param_count(cfg));
    }
}

TEST_CASE("closed-form per-layer rows: BiLSTM 2*4u(d+u+1), batch-norm 2F/4F") {
    ModelConfig cfg;  // d=15, u=8
    const auto rows = closed_form_layer_counts(cfg);
    bool saw_bn = false, saw_bilstm = false;
    for (const auto& [name, trainable, total] : rows) {
        if (name == "batchnorm1") {
            saw_bn = true;
            CHECK(trainable == 2 * 15);
            CHECK(total == 4 * 15);
        }
        if (name == "bilstm1") {
            saw_bilstm = true;
            CHECK(trainable == 2 * 4 * 8 * (15 + 8 + 1));
            CHECK(total == trainable);
        }
    }
    CHECK(saw_bn);
    CHECK(saw_bilstm);
}

TEST_CASE("checkpoint round trip is bit exact") {
    const std::string path = "test_model_ckpt.blcn";
    Model m = built_and_initialized(tiny_config(), 77);
    NormStats stats;
    for (std::size_t i = 0; i < kZScored; ++i) {
        stats.mean[i] = 1.0 / (3.0 + static_cast<double>(i));  // not exactly representable
        stats.stddev[i] = std::sqrt(2.0 + static_cast<double>(i));
    }
    save_checkpoint(m, stats, path);
    Checkpoint loaded = load_checkpoint(path);

    CHECK(loaded.model.config() == m.config());
    CHECK(count_params(loaded.model) == count_params(m));
    for (std::size_t i = 0; i < kZScored; ++i) {
        CHECK(loaded.stats.mean[i] == stats.mean[i]);
        CHECK(loaded.stats.stddev[i] == stats.stddev[i]);
    }
    REQUIRE(loaded.model.params().size() == m.params().size());
    for (std::size_t i = 0; i < m.params().size(); ++i) {
        const Tensor& a = *m.params().entries()[i].value;
        const Tensor& b = *loaded.model.params().entries()[i].value;
        REQUIRE(a.same_shape(b));
        for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
    }

    // bit-identical logits on a fixed batch
    Rng rng(5);
    Tensor batch = random_batch(m.config(), 3, rng);
    Tensor pa = m.forward(batch, false);
    Tensor pb = loaded.model.forward(batch, false);
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
    std::remove(path.c_str());
}

TEST_CASE("corrupt or truncated checkpoints fail the checksum, no partial model") {
    const std::string path = "test_model_ckpt_bad.blcn";
    Model m = built_and_initialized(tiny_config(), 3);
    save_checkpoint(m, NormStats{}, path);

    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    SUBCASE("truncated") {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 10));
        out.close();
        try {
            load_checkpoint(path);
            FAIL("expected CheckpointError");
        } catch (const CheckpointError& e) {
            CHECK(std::string(e.what()).find("checksum") != std::string::npos);
        }
    }

    SUBCASE("flipped byte mid-file") {
        bytes[bytes.size() / 2] = static_cast<char>(bytes[bytes.size() / 2] ^ 0x55);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
    }

    SUBCASE("wrong magic") {
        bytes[0] = 'X';
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_AS(load_checkpoint(path), CheckpointError);
    }
    std::remove(path.c_str());
}

TEST_CASE("model config kv codec round-trips every field") {
    ModelConfig cfg = tiny_config();
    cfg.time_steps = 12;
    cfg.pool_stride = 3;
    cfg.seed = 99;
    cfg.bn_momentum = 0.97;
    cfg.fused_softmax = true;
    CHECK(model_config_from_kv(model_config_to_kv(cfg)) == cfg);
}
