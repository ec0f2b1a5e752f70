#include "blcn/lstm.hpp"

namespace blcn {

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
    LstmParams p;
    for (Tensor* w : {&p.W_xi, &p.W_xg, &p.W_xf, &p.W_xo}) *w = Tensor({hidden_dim, input_dim});
    for (Tensor* u : {&p.U_hi, &p.U_hg, &p.U_hf, &p.U_ho}) *u = Tensor({hidden_dim, hidden_dim});
    for (Tensor* b : {&p.b_i, &p.b_g, &p.b_f, &p.b_o}) *b = Tensor({hidden_dim});
    return p;
}

void LstmParams::validate() const {
    const std::size_t h = hidden_dim(), d = input_dim();
    for (const Tensor* w : {&W_xi, &W_xg, &W_xf, &W_xo}) {
        if (w->rank() != 2 || w->dim(0) != h || w->dim(1) != d)
            throw ShapeError("LstmParams: feedforward weight shape " + shape_to_string(w->shape()) +
                             " inconsistent with (" + std::to_string(h) + ", " + std::to_string(d) + ")");
    }
    for (const Tensor* u : {&U_hi, &U_hg, &U_hf, &U_ho}) {
        if (u->rank() != 2 || u->dim(0) != h || u->dim(1) != h)
            throw ShapeError("LstmParams: recurrent weight shape " + shape_to_string(u->shape()) +
                             " inconsistent with hidden " + std::to_string(h));
    }
    for (const Tensor* b : {&b_i, &b_g, &b_f, &b_o}) {
        if (b->rank() != 1 || b->dim(0) != h)
            throw ShapeError("LstmParams: bias shape " + shape_to_string(b->shape()) +
                             " inconsistent with hidden " + std::to_string(h));
    }
}

void LstmParams::add_scaled(const LstmParams& other, double s) {
    const Tensor* src[] = {&other.W_xi, &other.W_xg, &other.W_xf, &other.W_xo,
                           &other.U_hi, &other.U_hg, &other.U_hf, &other.U_ho,
                           &other.b_i,  &other.b_g,  &other.b_f,  &other.b_o};
    Tensor* dst[] = {&W_xi, &W_xg, &W_xf, &W_xo, &U_hi, &U_hg, &U_hf, &U_ho,
                     &b_i,  &b_g,  &b_f,  &b_o};
    for (int k = 0; k < 12; ++k) {
        for (std::size_t i = 0; i < dst[k]->size(); ++i) (*dst[k])[i] += s * (*src[k])[i];
    }
}

std::size_t LstmParams::param_count() const {
    // 4u(d + u + 1)
    const std::size_t u = hidden_dim(), d = input_dim();
    return 4 * u * (d + u + 1);
}

LstmState LstmState::zeros(std::size_t hidden_dim) {
    return LstmState{Tensor({hidden_dim}), Tensor({hidden_dim})};
}

namespace {

Tensor gate_preact(const Tensor& W, const Tensor& x, const Tensor& U, const Tensor& h_prev,
                   const Tensor& b) {
    Tensor z = matvec(W, x);
    add_in_place(z, matvec(U, h_prev));
    add_in_place(z, b);
    return z;
}

}  // namespace

LstmState lstm_cell_forward(const LstmParams& params, const Tensor& x_t, const LstmState& prev,
                            CellCache* cache) {
    if (x_t.rank() != 1 || x_t.dim(0) != params.input_dim())
        throw ShapeError("lstm_cell_forward: input shape " + shape_to_string(x_t.shape()) +
                         " vs expected (" + std::to_string(params.input_dim()) + ")");
    if (prev.h.dim(0) != params.hidden_dim() || prev.c.dim(0) != params.hidden_dim())
        throw ShapeError("lstm_cell_forward: previous state dims " + shape_to_string(prev.h.shape()) +
                         "/" + shape_to_string(prev.c.shape()) + " vs hidden " +
                         std::to_string(params.hidden_dim()));

    Tensor i = sigmoid(gate_preact(params.W_xi, x_t, params.U_hi, prev.h, params.b_i));
    Tensor g = tanh_elem(gate_preact(params.W_xg, x_t, params.U_hg, prev.h, params.b_g));
    Tensor f = sigmoid(gate_preact(params.W_xf, x_t, params.U_hf, prev.h, params.b_f));
    Tensor o = sigmoid(gate_preact(params.W_xo, x_t, params.U_ho, prev.h, params.b_o));

    Tensor c = add(hadamard(f, prev.c), hadamard(i, g));
    Tensor tc = tanh_elem(c);
    Tensor h = hadamard(tc, o);

    if (cache) {
        cache->x = x_t;
        cache->h_prev = prev.h;
        cache->c_prev = prev.c;
        cache->i = i;
        cache->g = g;
        cache->f = f;
        cache->o = o;
        cache->c = c;
        cache->tanh_c = tc;
        cache->h = h;
    }
    return LstmState{std::move(h), std::move(c)};
}

CellGrads lstm_cell_backward(const LstmParams& params, const CellCache& cache,
                             const Tensor& grad_h, const Tensor& grad_c) {
    const std::size_t hid = params.hidden_dim(), in = params.input_dim();
    if (grad_h.size() != hid || grad_c.size() != hid)
        throw ShapeError("lstm_cell_backward: upstream gradient shape " +
                         shape_to_string(grad_h.shape()) + "/" + shape_to_string(grad_c.shape()) +
                         " vs hidden " + std::to_string(hid));
    if (cache.x.size() != in)
        throw ShapeError("lstm_cell_backward: cache input dim " + shape_to_string(cache.x.shape()) +
                         " does not match params");

    CellGrads out;
    out.params = LstmParams::zeros(in, hid);
    out.dx = Tensor({in});
    out.dprev = LstmState::zeros(hid);

    // h = tanh(c) . o ; c = f . c_prev + i . g
    Tensor d_o({hid}), dc({hid});
    for (std::size_t k = 0; k < hid; ++k) {
        d_o[k] = grad_h[k] * cache.tanh_c[k];
        dc[k] = grad_c[k] + grad_h[k] * cache.o[k] * (1.0 - cache.tanh_c[k] * cache.tanh_c[k]);
    }

    // pre-activation gradients per gate
    Tensor ai({hid}), ag({hid}), af({hid}), ao({hid});
    for (std::size_t k = 0; k < hid; ++k) {
        const double di = dc[k] * cache.g[k];
        const double dg = dc[k] * cache.i[k];
        const double df = dc[k] * cache.c_prev[k];
        ai[k] = di * cache.i[k] * (1.0 - cache.i[k]);
        ag[k] = dg * (1.0 - cache.g[k] * cache.g[k]);
        af[k] = df * cache.f[k] * (1.0 - cache.f[k]);
        ao[k] = d_o[k] * cache.o[k] * (1.0 - cache.o[k]);
        out.dprev.c[k] = dc[k] * cache.f[k];
    }

    struct GateRef {
        const Tensor* a;
        Tensor* dW;
        Tensor* dU;
        Tensor* db;
        const Tensor* W;
        const Tensor* U;
    };
    const GateRef gates[] = {
        {&ai, &out.params.W_xi, &out.params.U_hi, &out.params.b_i, &params.W_xi, &params.U_hi},
        {&ag, &out.params.W_xg, &out.params.U_hg, &out.params.b_g, &params.W_xg, &params.U_hg},
        {&af, &out.params.W_xf, &out.params.U_hf, &out.params.b_f, &params.W_xf, &params.U_hf},
        {&ao, &out.params.W_xo, &out.params.U_ho, &out.params.b_o, &params.W_xo, &params.U_ho},
    };
    for (const GateRef& gr : gates) {
        for (std::size_t r = 0; r < hid; ++r) {
            const double a = (*gr.a)[r];
            (*gr.db)[r] += a;
            for (std::size_t cdx = 0; cdx < in; ++cdx) gr.dW->at(r, cdx) += a * cache.x[cdx];
            for (std::size_t cdx = 0; cdx < hid; ++cdx) gr.dU->at(r, cdx) += a * cache.h_prev[cdx];
            for (std::size_t cdx = 0; cdx < in; ++cdx) out.dx[cdx] += gr.W->at(r, cdx) * a;
            for (std::size_t cdx = 0; cdx < hid; ++cdx) out.dprev.h[cdx] += gr.U->at(r, cdx) * a;
        }
    }
    return out;
}

}  // namespace blcn
