#pragma once

#include "blcn/tensor.hpp"

namespace blcn {

// One LSTM cell's parameters: four input (feedforward) weight matrices, four
// recurrent weight matrices, four gate biases.
struct LstmParams {
    Tensor W_xi, W_xg, W_xf, W_xo;  // [hidden x input]
    Tensor U_hi, U_hg, U_hf, U_ho;  // [hidden x hidden]
    Tensor b_i, b_g, b_f, b_o;      // [hidden]

    static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim);

    std::size_t input_dim() const { return W_xi.dim(1); }
    std::size_t hidden_dim() const { return W_xi.dim(0); }

    // All twelve tensors present with one consistent (input, hidden) pair.
    void validate() const;

    void add_scaled(const LstmParams& other, double s);
    std::size_t param_count() const;
};

struct LstmState {
    Tensor h;  // hidden output
    Tensor c;  // memory cell

    static LstmState zeros(std::size_t hidden_dim);
};

// Gate activations and inputs captured by the forward pass for BPTT.
struct CellCache {
    Tensor x, h_prev, c_prev;
    Tensor i, g, f, o;
    Tensor c, tanh_c, h;
};

struct CellGrads {
    LstmParams params;  // gradient w.r.t. every weight/bias
    Tensor dx;
    LstmState dprev;
};

// Gate equations:
//   i = sigmoid(W_xi x + U_hi h_prev + b_i)
//   g = tanh   (W_xg x + U_hg h_prev + b_g)
//   f = sigmoid(W_xf x + U_hf h_prev + b_f)
//   o = sigmoid(W_xo x + U_ho h_prev + b_o)
//   c = f (.) c_prev + i (.) g
//   h = tanh(c) (.) o
LstmState lstm_cell_forward(const LstmParams& params, const Tensor& x_t, const LstmState& prev,
                            CellCache* cache = nullptr);

// Analytic gradients through one cell step. grad_h/grad_c are the upstream
// gradients w.r.t. the emitted h and c.
CellGrads lstm_cell_backward(const LstmParams& params, const CellCache& cache,
                             const Tensor& grad_h, const Tensor& grad_c);

}  // namespace blcn
