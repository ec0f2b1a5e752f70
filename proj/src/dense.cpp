#include "blcn/dense.hpp"

namespace blcn {

Tensor dense_forward(const Tensor& W, const Tensor& bias, const Tensor& x) {
    if (W.rank() != 2 || x.rank() != 2 || x.dim(1) != W.dim(1))
        throw ShapeError("dense: input " + shape_to_string(x.shape()) + " vs weights " +
                         shape_to_string(W.shape()));
    if (bias.rank() != 1 || bias.dim(0) != W.dim(0))
        throw ShapeError("dense: bias " + shape_to_string(bias.shape()) + " vs weights " +
                         shape_to_string(W.shape()));
    const std::size_t B = x.dim(0), in = W.dim(1), out = W.dim(0);
    Tensor y({B, out});
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t r = 0; r < out; ++r) {
            double acc = bias[r];
            for (std::size_t c = 0; c < in; ++c) acc += W.at(r, c) * x.at(b, c);
            y.at(b, r) = acc;
        }
    }
    return y;
}

DenseGrads dense_backward(const Tensor& W, const Tensor& x, const Tensor& grad_out) {
    const std::size_t B = x.dim(0), in = W.dim(1), out = W.dim(0);
    if (grad_out.rank() != 2 || grad_out.dim(0) != B || grad_out.dim(1) != out)
        throw ShapeError("dense_backward: upstream shape " + shape_to_string(grad_out.shape()) +
                         " vs expected (" + std::to_string(B) + ", " + std::to_string(out) + ")");
    DenseGrads g;
    g.dW = Tensor({out, in});
    g.dbias = Tensor({out});
    g.dx = Tensor({B, in});
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t r = 0; r < out; ++r) {
            const double dy = grad_out.at(b, r);
            if (dy == 0.0) continue;
            g.dbias[r] += dy;
            for (std::size_t c = 0; c < in; ++c) {
                g.dW.at(r, c) += dy * x.at(b, c);
                g.dx.at(b, c) += dy * W.at(r, c);
            }
        }
    }
    return g;
}

}  // namespace blcn
