#include "blcn/bilstm.hpp"

namespace blcn {

BiLstmParams BiLstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim, BiLstmMode mode,
                                 std::size_t out_dim) {
    BiLstmParams p;
    p.forward = LstmParams::zeros(input_dim, hidden_dim);
    p.backward = LstmParams::zeros(input_dim, hidden_dim);
    p.mode = mode;
    if (mode == BiLstmMode::Project) {
        p.W_fy = Tensor({out_dim, hidden_dim});
        p.W_by = Tensor({out_dim, hidden_dim});
        p.b_y = Tensor({out_dim});
    }
    return p;
}

void BiLstmParams::validate() const {
    forward.validate();
    backward.validate();
    if (forward.input_dim() != backward.input_dim() || forward.hidden_dim() != backward.hidden_dim())
        throw ShapeError("BiLstmParams: forward/backward (input, hidden) pairs differ");
    if (mode == BiLstmMode::Project) {
        if (W_fy.rank() != 2 || W_by.rank() != 2 || W_fy.dim(1) != hidden_dim() ||
            W_by.dim(1) != hidden_dim() || W_fy.dim(0) != W_by.dim(0) || b_y.dim(0) != W_fy.dim(0))
            throw ShapeError("BiLstmParams: projection shapes inconsistent");
    }
}

std::size_t BiLstmParams::param_count() const {
    std::size_t n = forward.param_count() + backward.param_count();
    if (mode == BiLstmMode::Project) n += W_fy.size() + W_by.size() + b_y.size();
    return n;
}

Tensor bilstm_forward(const BiLstmParams& params, const Tensor& x_seq, SeqCache* cache) {
    if (x_seq.rank() != 2 || x_seq.dim(0) == 0)
        throw ShapeError("bilstm_forward: expected non-empty [T x input] sequence, got " +
                         shape_to_string(x_seq.shape()));
    if (x_seq.dim(1) != params.input_dim())
        throw ShapeError("bilstm_forward: input width " + std::to_string(x_seq.dim(1)) +
                         " vs expected " + std::to_string(params.input_dim()));

    const std::size_t T = x_seq.dim(0), in = params.input_dim(), hid = params.hidden_dim();
    const std::size_t out = params.output_dim();

    SeqCache local;
    SeqCache& cc = cache ? *cache : local;
    cc.fwd.assign(T, CellCache{});
    cc.bwd.assign(T, CellCache{});

    auto step_input = [&](std::size_t t) {
        Tensor x({in});
        for (std::size_t j = 0; j < in; ++j) x[j] = x_seq.at(t, j);
        return x;
    };

    LstmState fwd = LstmState::zeros(hid);
    for (std::size_t t = 0; t < T; ++t) {
        fwd = lstm_cell_forward(params.forward, step_input(t), fwd, &cc.fwd[t]);
    }
    LstmState bwd = LstmState::zeros(hid);
    for (std::size_t t = T; t-- > 0;) {
        bwd = lstm_cell_forward(params.backward, step_input(t), bwd, &cc.bwd[t]);
    }

    Tensor y({T, out});
    for (std::size_t t = 0; t < T; ++t) {
        const Tensor& hf = cc.fwd[t].h;
        const Tensor& hb = cc.bwd[t].h;
        if (params.mode == BiLstmMode::Concat) {
            for (std::size_t k = 0; k < hid; ++k) {
                y.at(t, k) = hf[k];
                y.at(t, hid + k) = hb[k];
            }
        } else {
            Tensor yt = add(matvec(params.W_fy, hf), matvec(params.W_by, hb));
            add_in_place(yt, params.b_y);
            for (std::size_t k = 0; k < out; ++k) y.at(t, k) = yt[k];
        }
    }
    return y;
}

BiLstmGrads bilstm_backward(const BiLstmParams& params, const SeqCache& cache,
                            const Tensor& grad_y_seq) {
    const std::size_t T = cache.fwd.size(), in = params.input_dim(), hid = params.hidden_dim();
    const std::size_t out = params.output_dim();
    if (grad_y_seq.rank() != 2 || grad_y_seq.dim(0) != T || grad_y_seq.dim(1) != out)
        throw ShapeError("bilstm_backward: upstream gradient shape " +
                         shape_to_string(grad_y_seq.shape()) + " vs expected (" +
                         std::to_string(T) + ", " + std::to_string(out) + ")");

    BiLstmGrads grads;
    grads.params = BiLstmParams::zeros(in, hid, params.mode, params.mode == BiLstmMode::Project ? out : 0);
    grads.dx_seq = Tensor({T, in});

    // Per-step gradients reaching each direction's hidden vector.
    std::vector<Tensor> dhf(T, Tensor({hid})), dhb(T, Tensor({hid}));
    for (std::size_t t = 0; t < T; ++t) {
        if (params.mode == BiLstmMode::Concat) {
            for (std::size_t k = 0; k < hid; ++k) {
                dhf[t][k] = grad_y_seq.at(t, k);
                dhb[t][k] = grad_y_seq.at(t, hid + k);
            }
        } else {
            Tensor dy({out});
            for (std::size_t k = 0; k < out; ++k) dy[k] = grad_y_seq.at(t, k);
            for (std::size_t r = 0; r < out; ++r) {
                grads.params.b_y[r] += dy[r];
                for (std::size_t k = 0; k < hid; ++k) {
                    grads.params.W_fy.at(r, k) += dy[r] * cache.fwd[t].h[k];
                    grads.params.W_by.at(r, k) += dy[r] * cache.bwd[t].h[k];
                    dhf[t][k] += params.W_fy.at(r, k) * dy[r];
                    dhb[t][k] += params.W_by.at(r, k) * dy[r];
                }
            }
        }
    }

    // Forward direction unrolls t = T..1.
    {
        Tensor dh_next({hid}), dc_next({hid});
        for (std::size_t t = T; t-- > 0;) {
            Tensor dh = add(dhf[t], dh_next);
            CellGrads g = lstm_cell_backward(params.forward, cache.fwd[t], dh, dc_next);
            grads.params.forward.add_scaled(g.params, 1.0);
            for (std::size_t j = 0; j < in; ++j) grads.dx_seq.at(t, j) += g.dx[j];
            dh_next = std::move(g.dprev.h);
            dc_next = std::move(g.dprev.c);
        }
    }
    // Backward direction unrolls t = 1..T.
    {
        Tensor dh_next({hid}), dc_next({hid});
        for (std::size_t t = 0; t < T; ++t) {
            Tensor dh = add(dhb[t], dh_next);
            CellGrads g = lstm_cell_backward(params.backward, cache.bwd[t], dh, dc_next);
            grads.params.backward.add_scaled(g.params, 1.0);
            for (std::size_t j = 0; j < in; ++j) grads.dx_seq.at(t, j) += g.dx[j];
            dh_next = std::move(g.dprev.h);
            dc_next = std::move(g.dprev.c);
        }
    }
    return grads;
}

}  // namespace blcn
