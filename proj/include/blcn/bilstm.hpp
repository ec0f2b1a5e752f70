#pragma once

#include <vector>

#include "blcn/lstm.hpp"

namespace blcn {

// How the two directions are combined per step:
//   Concat  - y_t = [h_fwd_t ; h_bwd_t], the stacked-layer contract
//   Project - y_t = W_fy h_fwd_t + W_by h_bwd_t + b_y, the output-layer form
enum class BiLstmMode { Concat, Project };

struct BiLstmParams {
    LstmParams forward;
    LstmParams backward;
    BiLstmMode mode = BiLstmMode::Concat;
    Tensor W_fy, W_by;  // [out x hidden], Project mode only
    Tensor b_y;         // [out], Project mode only

    static BiLstmParams zeros(std::size_t input_dim, std::size_t hidden_dim, BiLstmMode mode,
                              std::size_t out_dim = 0);

    std::size_t input_dim() const { return forward.input_dim(); }
    std::size_t hidden_dim() const { return forward.hidden_dim(); }
    std::size_t output_dim() const {
        return mode == BiLstmMode::Concat ? 2 * hidden_dim() : W_fy.dim(0);
    }

    void validate() const;
    std::size_t param_count() const;
};

struct SeqCache {
    std::vector<CellCache> fwd;  // index t ascending
    std::vector<CellCache> bwd;  // index t ascending (filled by the descending pass)
};

// Runs the ascending recurrence over t = 1..T and the descending recurrence
// over t = T..1, both from zero initial state, and combines them per step.
// x_seq is [T x input]; the result is [T x output_dim].
Tensor bilstm_forward(const BiLstmParams& params, const Tensor& x_seq, SeqCache* cache = nullptr);

struct BiLstmGrads {
    BiLstmParams params;
    Tensor dx_seq;
};

// Full-sequence BPTT: forward-direction gradients accumulate t = T..1,
// backward-direction t = 1..T.
BiLstmGrads bilstm_backward(const BiLstmParams& params, const SeqCache& cache,
                            const Tensor& grad_y_seq);

}  // namespace blcn
