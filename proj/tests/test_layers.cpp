#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <utility>

#include "blcn/batchnorm.hpp"
#include "blcn/bilstm.hpp"
#include "blcn/conv1d.hpp"
#include "blcn/dense.hpp"
#include "blcn/lstm.hpp"
#include "blcn/pooling.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace blcn;

namespace {

// Tolerances pinned once for the whole file: central differences with step
// 1e-6 against analytic gradients, relative error below 1e-5.
constexpr double kFdStep = 1e-6;
constexpr double kFdRelTol = 1e-5;

void check_grad(double analytic, const std::function<double()>& objective, double& slot) {
    const double fd = oracle::central_diff(objective, slot, kFdStep);
    CHECK_MESSAGE(oracle::close_rel(analytic, fd, kFdRelTol),
                  "analytic=" << analytic << " fd=" << fd);
}

void check_grad_tensor(const Tensor& analytic, const std::function<double()>& objective,
                       Tensor& storage) {
    REQUIRE(analytic.same_shape(storage));
    for (std::size_t i = 0; i < storage.size(); ++i)
        check_grad(analytic[i], objective, storage[i]);
}

std::vector<Tensor*> lstm_tensors(LstmParams& p) {
    return {&p.W_xi, &p.W_xg, &p.W_xf, &p.W_xo, &p.U_hi, &p.U_hg,
            &p.U_hf, &p.U_ho, &p.b_i,  &p.b_g,  &p.b_f,  &p.b_o};
}

std::vector<const Tensor*> lstm_tensors(const LstmParams& p) {
    return {&p.W_xi, &p.W_xg, &p.W_xf, &p.W_xo, &p.U_hi, &p.U_hg,
            &p.U_hf, &p.U_ho, &p.b_i,  &p.b_g,  &p.b_f,  &p.b_o};
}

}  // namespace

// --- LSTM cell ---------------------------------------------------------------

TEST_CASE("lstm params: zeros builds consistent shapes") {
    LstmParams p = LstmParams::zeros(3, 2);
    CHECK(p.input_dim() == 3);
    CHECK(p.hidden_dim() == 2);
    CHECK_NOTHROW(p.validate());
    CHECK(p.param_count() == 4 * (2 * 3 + 2 * 2 + 2));
}

TEST_CASE("lstm cell: all-zero params give i=f=o=0.5, g=0, c=0, h=0") {
    LstmParams p = LstmParams::zeros(3, 2);
    Tensor x = Tensor::vec({0.7, -1.2, 0.3});
    CellCache cache;
    LstmState out = lstm_cell_forward(p, x, LstmState::zeros(2), &cache);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(cache.i[j] == 0.5);
        CHECK(cache.f[j] == 0.5);
        CHECK(cache.o[j] == 0.5);
        CHECK(cache.g[j] == 0.0);
        CHECK(out.c[j] == 0.0);
        CHECK(out.h[j] == 0.0);
    }
}

TEST_CASE("lstm cell: scalar hand computation, c_prev=2 -> c'=1, h=tanh(1)/2") {
    LstmParams p = LstmParams::zeros(1, 1);
    LstmState prev;
    prev.h = Tensor::vec({0.0});
    prev.c = Tensor::vec({2.0});
    LstmState out = lstm_cell_forward(p, Tensor::vec({0.42}), prev);
    CHECK(out.c[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out.h[0] == doctest::Approx(std::tanh(1.0) * 0.5).epsilon(1e-12));
    CHECK(out.h[0] == doctest::Approx(0.380797).epsilon(1e-6));
}

TEST_CASE("lstm cell matches straight-line gate equations to 1e-12") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        Rng rng(seed);
        const std::size_t d = 1 + rng.bounded(5), u = 1 + rng.bounded(6);
        LstmParams p = LstmParams::zeros(d, u);
        oracle::fill_lstm_params(p, rng);
        Tensor x = oracle::random_tensor({d}, rng);
        LstmState prev;
        prev.h = oracle::random_tensor({u}, rng);
        prev.c = oracle::random_tensor({u}, rng);

        LstmState out = lstm_cell_forward(p, x, prev);
        oracle::LstmOut ref = oracle::lstm_cell(p, x.values(), prev.h.values(), prev.c.values());
        for (std::size_t j = 0; j < u; ++j) {
            CHECK(std::fabs(out.h[j] - ref.h[j]) < 1e-12);
            CHECK(std::fabs(out.c[j] - ref.c[j]) < 1e-12);
        }
    }
}

TEST_CASE("lstm cell backward: zero upstream gives zero gradients") {
    Rng rng(2);
    LstmParams p = LstmParams::zeros(3, 2);
    oracle::fill_lstm_params(p, rng);
    CellCache cache;
    LstmState prev;
    prev.h = oracle::random_tensor({2}, rng);
    prev.c = oracle::random_tensor({2}, rng);
    lstm_cell_forward(p, oracle::random_tensor({3}, rng), prev, &cache);
    CellGrads g = lstm_cell_backward(p, cache, Tensor({2}), Tensor({2}));
    for (const Tensor* t : lstm_tensors(g.params))
        for (std::size_t i = 0; i < t->size(); ++i) CHECK((*t)[i] == 0.0);
    for (std::size_t i = 0; i < g.dx.size(); ++i) CHECK(g.dx[i] == 0.0);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(g.dprev.h[i] == 0.0);
        CHECK(g.dprev.c[i] == 0.0);
    }
}

TEST_CASE("lstm cell backward matches finite differences (hidden=2, input=3)") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed * 13);
        LstmParams p = LstmParams::zeros(3, 2);
        oracle::fill_lstm_params(p, rng);
        Tensor x = oracle::random_tensor({3}, rng);
        LstmState prev;
        prev.h = oracle::random_tensor({2}, rng);
        prev.c = oracle::random_tensor({2}, rng);
        Tensor wh = oracle::random_tensor({2}, rng);
        Tensor wc = oracle::random_tensor({2}, rng);

        auto objective = [&]() {
            LstmState out = lstm_cell_forward(p, x, prev);
            double loss = 0.0;
            for (std::size_t j = 0; j < 2; ++j) loss += wh[j] * out.h[j] + wc[j] * out.c[j];
            return loss;
        };

        CellCache cache;
        lstm_cell_forward(p, x, prev, &cache);
        CellGrads g = lstm_cell_backward(p, cache, wh, wc);

        std::vector<Tensor*> slots = lstm_tensors(p);
        std::vector<const Tensor*> grads = lstm_tensors(std::as_const(g.params));
        for (std::size_t t = 0; t < slots.size(); ++t)
            check_grad_tensor(*grads[t], objective, *slots[t]);
        check_grad_tensor(g.dx, objective, x);
        check_grad_tensor(g.dprev.h, objective, prev.h);
        check_grad_tensor(g.dprev.c, objective, prev.c);
    }
}

TEST_CASE("lstm cell backward: saturated forget gate kills the c_prev path") {
    Rng rng(77);
    LstmParams p = LstmParams::zeros(3, 2);
    oracle::fill_lstm_params(p, rng);
    p.b_f.fill(-50.0);  // sigmoid(-50) ~ 2e-22: f = 0 for practical purposes
    Tensor x = oracle::random_tensor({3}, rng);
    LstmState prev;
    prev.h = oracle::random_tensor({2}, rng);
    prev.c = oracle::random_tensor({2}, rng);
    CellCache cache;
    lstm_cell_forward(p, x, prev, &cache);
    CellGrads g = lstm_cell_backward(p, cache, oracle::random_tensor({2}, rng),
                                     oracle::random_tensor({2}, rng));
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::fabs(g.dprev.c[j]) < 1e-8);
}

// --- BiLSTM ------------------------------------------------------------------

TEST_CASE("bilstm T=1: identical direction params give mirrored halves") {
    Rng rng(4);
    BiLstmParams p = BiLstmParams::zeros(3, 2, BiLstmMode::Concat);
    oracle::fill_lstm_params(p.forward, rng);
    p.backward = p.forward;
    Tensor x({1, 3});
    oracle::fill_uniform(x, rng);
    Tensor y = bilstm_forward(p, x);
    REQUIRE(y.shape() == std::vector<std::size_t>{1, 4});
    for (std::size_t j = 0; j < 2; ++j) CHECK(y.at(0, j) == y.at(0, 2 + j));
}

TEST_CASE("bilstm time-reversal property in concat mode") {
    Rng rng(6);
    const std::size_t T = 5, d = 3, u = 2;
    BiLstmParams p = BiLstmParams::zeros(d, u, BiLstmMode::Concat);
    oracle::fill_lstm_params(p.forward, rng);
    oracle::fill_lstm_params(p.backward, rng);
    Tensor x({T, d});
    oracle::fill_uniform(x, rng);

    BiLstmParams swapped = BiLstmParams::zeros(d, u, BiLstmMode::Concat);
    swapped.forward = p.backward;
    swapped.backward = p.forward;
    Tensor xrev({T, d});
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t j = 0; j < d; ++j) xrev.at(t, j) = x.at(T - 1 - t, j);

    Tensor y = bilstm_forward(p, x);
    Tensor yswap = bilstm_forward(swapped, xrev);
    // reverse(yswap) with halves exchanged must equal y
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t j = 0; j < u; ++j) {
            CHECK(std::fabs(y.at(t, j) - yswap.at(T - 1 - t, u + j)) < 1e-12);
            CHECK(std::fabs(y.at(t, u + j) - yswap.at(T - 1 - t, j)) < 1e-12);
        }
}

TEST_CASE("bilstm matches two-pass straight-line oracle (concat and project)") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        Rng rng(seed * 31);
        const std::size_t T = 3, d = 1 + rng.bounded(4), u = 2;
        for (BiLstmMode mode : {BiLstmMode::Concat, BiLstmMode::Project}) {
            BiLstmParams p = BiLstmParams::zeros(d, u, mode, 3);
            oracle::fill_lstm_params(p.forward, rng);
            oracle::fill_lstm_params(p.backward, rng);
            if (mode == BiLstmMode::Project) {
                oracle::fill_uniform(p.W_fy, rng);
                oracle::fill_uniform(p.W_by, rng);
                oracle::fill_uniform(p.b_y, rng);
            }
            Tensor x({T, d});
            oracle::fill_uniform(x, rng);
            Tensor y = bilstm_forward(p, x);
            Tensor ref = oracle::bilstm(p, x);
            REQUIRE(y.same_shape(ref));
            for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::fabs(y[i] - ref[i]) < 1e-12);
        }
    }
}

TEST_CASE("bilstm backward: zero upstream gives zero gradients") {
    Rng rng(8);
    BiLstmParams p = BiLstmParams::zeros(3, 2, BiLstmMode::Concat);
    oracle::fill_lstm_params(p.forward, rng);
    oracle::fill_lstm_params(p.backward, rng);
    Tensor x({4, 3});
    oracle::fill_uniform(x, rng);
    SeqCache cache;
    Tensor y = bilstm_forward(p, x, &cache);
    BiLstmGrads g = bilstm_backward(p, cache, Tensor(y.shape()));
    for (const LstmParams* dir : {&g.params.forward, &g.params.backward})
        for (const Tensor* t : lstm_tensors(*dir))
            for (std::size_t i = 0; i < t->size(); ++i) CHECK((*t)[i] == 0.0);
    for (std::size_t i = 0; i < g.dx_seq.size(); ++i) CHECK(g.dx_seq[i] == 0.0);
}

TEST_CASE("bilstm backward matches finite differences (T=4, input=3, hidden=2)") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        Rng rng(seed * 101);
        const std::size_t T = 4, d = 3, u = 2;
        BiLstmParams p = BiLstmParams::zeros(d, u, BiLstmMode::Concat);
        oracle::fill_lstm_params(p.forward, rng);
        oracle::fill_lstm_params(p.backward, rng);
        Tensor x({T, d});
        oracle::fill_uniform(x, rng);
        Tensor w({T, 2 * u});
        oracle::fill_uniform(w, rng);

        auto objective = [&]() {
            Tensor y = bilstm_forward(p, x);
            double loss = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) loss += w[i] * y[i];
            return loss;
        };

        SeqCache cache;
        bilstm_forward(p, x, &cache);
        BiLstmGrads g = bilstm_backward(p, cache, w);

        for (auto [dir, grad_dir] : {std::pair{&p.forward, &g.params.forward},
                                     std::pair{&p.backward, &g.params.backward}}) {
            std::vector<Tensor*> slots = lstm_tensors(*dir);
            std::vector<const Tensor*> grads = lstm_tensors(std::as_const(*grad_dir));
            for (std::size_t t = 0; t < slots.size(); ++t)
                check_grad_tensor(*grads[t], objective, *slots[t]);
        }
        check_grad_tensor(g.dx_seq, objective, x);
    }
}

TEST_CASE("bilstm backward in project mode matches finite differences") {
    Rng rng(303);
    const std::size_t T = 3, d = 2, u = 2, o = 3;
    BiLstmParams p = BiLstmParams::zeros(d, u, BiLstmMode::Project, o);
    oracle::fill_lstm_params(p.forward, rng);
    oracle::fill_lstm_params(p.backward, rng);
    oracle::fill_uniform(p.W_fy, rng);
    oracle::fill_uniform(p.W_by, rng);
    oracle::fill_uniform(p.b_y, rng);
    Tensor x({T, d});
    oracle::fill_uniform(x, rng);
    Tensor w({T, o});
    oracle::fill_uniform(w, rng);

    auto objective = [&]() {
        Tensor y = bilstm_forward(p, x);
        double loss = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) loss += w[i] * y[i];
        return loss;
    };

    SeqCache cache;
    bilstm_forward(p, x, &cache);
    BiLstmGrads g = bilstm_backward(p, cache, w);
    check_grad_tensor(g.params.W_fy, objective, p.W_fy);
    check_grad_tensor(g.params.W_by, objective, p.W_by);
    check_grad_tensor(g.params.b_y, objective, p.b_y);
    check_grad_tensor(g.dx_seq, objective, x);
}

TEST_CASE("bilstm palindromic input with equal direction params: mirror-equal dx") {
    Rng rng(12);
    const std::size_t T = 5, d = 3, u = 2;
    BiLstmParams p = BiLstmParams::zeros(d, u, BiLstmMode::Concat);
    oracle::fill_lstm_params(p.forward, rng);
    p.backward = p.forward;
    Tensor x({T, d});
    oracle::fill_uniform(x, rng);
    for (std::size_t t = 0; t < T / 2; ++t)  // make it a palindrome in time
        for (std::size_t j = 0; j < d; ++j) x.at(T - 1 - t, j) = x.at(t, j);

    SeqCache cache;
    Tensor y = bilstm_forward(p, x, &cache);
    BiLstmGrads g = bilstm_backward(p, cache, Tensor::full(y.shape(), 1.0));
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t j = 0; j < d; ++j)
            CHECK(std::fabs(g.dx_seq.at(t, j) - g.dx_seq.at(T - 1 - t, j)) < 1e-10);
}

// --- conv1d ------------------------------------------------------------------

TEST_CASE("conv1d k=1 identity kernel copies the input channel") {
    Tensor kernels({1, 1, 1}, {1.0});
    Tensor bias({1});
    Tensor x({6, 1}, {1, 2, 3, 4, 5, 6});
    Tensor y = conv1d_forward(kernels, bias, x);
    REQUIRE(y.shape() == std::vector<std::size_t>{6, 1});
    for (std::size_t i = 0; i < 6; ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("conv1d output length: L=10, k=3 -> 8") {
    Rng rng(14);
    Tensor kernels = oracle::random_tensor({4, 3, 2}, rng);
    Tensor bias = oracle::random_tensor({4}, rng);
    Tensor x = oracle::random_tensor({10, 2}, rng);
    CHECK(conv1d_forward(kernels, bias, x).shape() == std::vector<std::size_t>{8, 4});
}

TEST_CASE("conv1d matches nested-loop oracle to 1e-12") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        Rng rng(seed * 17);
        const std::size_t K = 1 + rng.bounded(4), k = 1 + rng.bounded(3),
                          cin = 1 + rng.bounded(3);
        const std::size_t L = k + rng.bounded(6);
        Tensor kernels = oracle::random_tensor({K, k, cin}, rng);
        Tensor bias = oracle::random_tensor({K}, rng);
        Tensor x = oracle::random_tensor({L, cin}, rng);
        Tensor y = conv1d_forward(kernels, bias, x);
        Tensor ref = oracle::conv1d(kernels, bias, x);
        REQUIRE(y.same_shape(ref));
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::fabs(y[i] - ref[i]) < 1e-12);
    }
}

TEST_CASE("conv1d backward: zero upstream, bias identity, finite differences") {
    Rng rng(19);
    Tensor kernels = oracle::random_tensor({3, 3, 2}, rng);
    Tensor bias = oracle::random_tensor({3}, rng);
    Tensor x = oracle::random_tensor({7, 2}, rng);

    SUBCASE("zero upstream -> zero grads") {
        Conv1dGrads g = conv1d_backward(kernels, x, Tensor({5, 3}));
        for (std::size_t i = 0; i < g.dkernels.size(); ++i) CHECK(g.dkernels[i] == 0.0);
        for (std::size_t i = 0; i < g.dbias.size(); ++i) CHECK(g.dbias[i] == 0.0);
        for (std::size_t i = 0; i < g.dx.size(); ++i) CHECK(g.dx[i] == 0.0);
    }

    SUBCASE("dbias[j] equals the column sum of grad_out") {
        Tensor w = oracle::random_tensor({5, 3}, rng);
        Conv1dGrads g = conv1d_backward(kernels, x, w);
        for (std::size_t j = 0; j < 3; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < 5; ++t) s += w.at(t, j);
            CHECK(g.dbias[j] == doctest::Approx(s).epsilon(1e-14));
        }
    }

    SUBCASE("full gradient check vs central differences") {
        Tensor w = oracle::random_tensor({5, 3}, rng);
        auto objective = [&]() {
            Tensor y = conv1d_forward(kernels, bias, x);
            double loss = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) loss += w[i] * y[i];
            return loss;
        };
        Conv1dGrads g = conv1d_backward(kernels, x, w);
        check_grad_tensor(g.dkernels, objective, kernels);
        check_grad_tensor(g.dx, objective, x);
        // dbias via FD as well (bias enters forward, not backward's inputs)
        for (std::size_t j = 0; j < 3; ++j) check_grad(g.dbias[j], objective, bias[j]);
    }
}

// --- avg pooling -------------------------------------------------------------

TEST_CASE("avgpool1d lengths and window means") {
    CHECK(avgpool1d_output_length(10, 3, 2) == 4);
    Tensor x({5, 1}, {1, 2, 3, 4, 5});
    Tensor y = avgpool1d_forward(x, 3, 2);
    REQUIRE(y.shape() == std::vector<std::size_t>{2, 1});
    CHECK(y[0] == doctest::Approx(2.0));
    CHECK(y[1] == doctest::Approx(4.0));
}

TEST_CASE("avgpool1d rejects windows longer than the input") {
    Tensor x({2, 1}, {1, 2});
    CHECK_THROWS_AS(avgpool1d_forward(x, 3, 2), ShapeError);
}

TEST_CASE("avgpool1d backward distributes by window membership") {
    // all-ones upstream on L=10, pool=3, stride=2: dx[t] = (#windows covering t)/3
    const std::size_t L = 10, pool = 3, stride = 2;
    Tensor w = Tensor::full({4, 1}, 1.0);
    Tensor dx = avgpool1d_backward(L, pool, stride, w);
    for (std::size_t t = 0; t < L; ++t) {
        std::size_t covering = 0;  // brute-force membership count
        for (std::size_t s = 0; s + pool <= L; s += stride)
            if (t >= s && t < s + pool) ++covering;
        CHECK(dx.at(t, 0) == doctest::Approx(static_cast<double>(covering) / 3.0));
    }
}

TEST_CASE("avgpool1d backward matches finite differences") {
    Rng rng(23);
    Tensor x = oracle::random_tensor({9, 3}, rng);
    Tensor w = oracle::random_tensor({4, 3}, rng);
    auto objective = [&]() {
        Tensor y = avgpool1d_forward(x, 3, 2);
        double loss = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) loss += w[i] * y[i];
        return loss;
    };
    Tensor dx = avgpool1d_backward(9, 3, 2, w);
    check_grad_tensor(dx, objective, x);
}

// --- batch norm ----------------------------------------------------------------

TEST_CASE("batchnorm constant batch collapses to beta") {
    BatchNormState st = BatchNormState::init(3);
    st.gamma = Tensor::vec({2.0, 3.0, 4.0});
    st.beta = Tensor::vec({-1.0, 0.5, 7.0});
    Tensor x({4, 3});
    for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t f = 0; f < 3; ++f) x.at(b, f) = 5.0 + static_cast<double>(f);
    Tensor y = batchnorm_forward(st, x, true);
    for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t f = 0; f < 3; ++f)
            CHECK(y.at(b, f) == doctest::Approx(st.beta[f]).epsilon(1e-12));
}

TEST_CASE("batchnorm train-mode output is normalized when gamma=1, beta=0") {
    Rng rng(29);
    BatchNormState st = BatchNormState::init(4);
    Tensor x = oracle::random_tensor({64, 4}, rng, -3, 5);
    Tensor y = batchnorm_forward(st, x, true);
    for (std::size_t f = 0; f < 4; ++f) {
        double mean = 0.0;
        for (std::size_t b = 0; b < 64; ++b) mean += y.at(b, f);
        mean /= 64.0;
        CHECK(std::fabs(mean) < 1e-10);
        double var = 0.0;
        for (std::size_t b = 0; b < 64; ++b) var += (y.at(b, f) - mean) * (y.at(b, f) - mean);
        var /= 64.0;
        // epsilon=1e-3 biases the variance slightly below 1
        CHECK(std::fabs(var - 1.0) < 1e-2);
    }
}

TEST_CASE("batchnorm infer mode uses the moving statistics") {
    BatchNormState st = BatchNormState::init(2);
    st.moving_mean = Tensor::vec({1.0, -2.0});
    st.moving_var = Tensor::vec({4.0, 9.0});
    st.gamma = Tensor::vec({2.0, 1.0});
    st.beta = Tensor::vec({0.5, 0.0});
    Tensor x({1, 2}, {3.0, 1.0});
    Tensor y = batchnorm_forward(st, x, false);
    CHECK(y.at(0, 0) ==
          doctest::Approx(2.0 * (3.0 - 1.0) / std::sqrt(4.0 + st.epsilon) + 0.5).epsilon(1e-12));
    CHECK(y.at(0, 1) ==
          doctest::Approx(1.0 * (1.0 - (-2.0)) / std::sqrt(9.0 + st.epsilon)).epsilon(1e-12));
}

TEST_CASE("batchnorm moving stats follow m <- mom*m + (1-mom)*batch") {
    BatchNormState st = BatchNormState::init(1, 0.9);
    Tensor x({2, 1}, {1.0, 3.0});  // batch mean 2, biased variance 1
    batchnorm_forward(st, x, true);
    CHECK(st.moving_mean[0] == doctest::Approx(0.9 * 0.0 + 0.1 * 2.0).epsilon(1e-12));
    CHECK(st.moving_var[0] == doctest::Approx(0.9 * 1.0 + 0.1 * 1.0).epsilon(1e-12));
}

TEST_CASE("batchnorm train mode requires a batch of at least 2") {
    BatchNormState st = BatchNormState::init(2);
    Tensor x({1, 2}, {1.0, 2.0});
    CHECK_THROWS_AS(batchnorm_forward(st, x, true), ShapeError);
    CHECK_NOTHROW(batchnorm_forward(st, x, false));
}

TEST_CASE("batchnorm backward matches finite differences (train mode)") {
    Rng rng(31);
    BatchNormState st = BatchNormState::init(3);
    oracle::fill_uniform(st.gamma, rng, 0.5, 1.5);
    oracle::fill_uniform(st.beta, rng, -0.5, 0.5);
    Tensor x = oracle::random_tensor({6, 3}, rng);
    Tensor w = oracle::random_tensor({6, 3}, rng);

    // moving-stat updates inside the objective do not affect train-mode output
    auto objective = [&]() {
        Tensor y = batchnorm_forward(st, x, true);
        double loss = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) loss += w[i] * y[i];
        return loss;
    };

    BatchNormCache cache;
    batchnorm_forward(st, x, true, &cache);
    BatchNormGrads g = batchnorm_backward(st, cache, w);
    check_grad_tensor(g.dgamma, objective, st.gamma);
    check_grad_tensor(g.dbeta, objective, st.beta);
    check_grad_tensor(g.dx, objective, x);
}

// --- dense ---------------------------------------------------------------------

TEST_CASE("dense identity weights pass the input through") {
    Tensor W({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    Tensor b({3});
    Tensor x({2, 3}, {1, 2, 3, 4, 5, 6});
    Tensor y = dense_forward(W, b, x);
    for (std::size_t i = 0; i < 6; ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("dense(4 -> 3) holds 15 parameters") {
    Tensor W({3, 4});
    Tensor b({3});
    CHECK(W.size() + b.size() == 15);
}

TEST_CASE("dense backward matches finite differences") {
    Rng rng(37);
    Tensor W = oracle::random_tensor({3, 4}, rng);
    Tensor b = oracle::random_tensor({3}, rng);
    Tensor x = oracle::random_tensor({5, 4}, rng);
    Tensor w = oracle::random_tensor({5, 3}, rng);
    auto objective = [&]() {
        Tensor y = dense_forward(W, b, x);
        double loss = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) loss += w[i] * y[i];
        return loss;
    };
    DenseGrads g = dense_backward(W, x, w);
    check_grad_tensor(g.dW, objective, W);
    check_grad_tensor(g.dx, objective, x);
    for (std::size_t j = 0; j < 3; ++j) check_grad(g.dbias[j], objective, b[j]);
}

// --- flatten (reshape round trip) ---------------------------------------------

TEST_CASE("flatten round trip is the identity") {
    Rng rng(43);
    Tensor t = oracle::random_tensor({2, 3, 4}, rng);
    Tensor back = flatten(t).reshaped({2, 3, 4});
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(back[i] == t[i]);
}
