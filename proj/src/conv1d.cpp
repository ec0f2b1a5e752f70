#include "blcn/conv1d.hpp"

namespace blcn {

namespace {

void check_conv_shapes(const Tensor& kernels, const Tensor& bias, const Tensor& x) {
    if (kernels.rank() != 3)
        throw ShapeError("conv1d: kernels must be [K x k x Cin], got " + shape_to_string(kernels.shape()));
    if (x.rank() != 2)
        throw ShapeError("conv1d: input must be [L x Cin], got " + shape_to_string(x.shape()));
    if (kernels.dim(2) != x.dim(1))
        throw ShapeError("conv1d: kernel channels " + std::to_string(kernels.dim(2)) +
                         " vs input channels " + std::to_string(x.dim(1)));
    if (bias.rank() != 1 || bias.dim(0) != kernels.dim(0))
        throw ShapeError("conv1d: bias shape " + shape_to_string(bias.shape()) + " vs K=" +
                         std::to_string(kernels.dim(0)));
    if (x.dim(0) < kernels.dim(1))
        throw ShapeError("conv1d: input length " + std::to_string(x.dim(0)) +
                         " shorter than kernel size " + std::to_string(kernels.dim(1)));
}

}  // namespace

Tensor conv1d_forward(const Tensor& kernels, const Tensor& bias, const Tensor& x) {
    check_conv_shapes(kernels, bias, x);
    const std::size_t K = kernels.dim(0), k = kernels.dim(1), cin = kernels.dim(2);
    const std::size_t L = x.dim(0), Lout = L - k + 1;

    Tensor out({Lout, K});
    for (std::size_t p = 0; p < Lout; ++p) {
        for (std::size_t j = 0; j < K; ++j) {
            double acc = bias[j];
            for (std::size_t dk = 0; dk < k; ++dk)
                for (std::size_t c = 0; c < cin; ++c) acc += kernels.at(j, dk, c) * x.at(p + dk, c);
            out.at(p, j) = acc;
        }
    }
    return out;
}

Conv1dGrads conv1d_backward(const Tensor& kernels, const Tensor& x, const Tensor& grad_out) {
    const std::size_t K = kernels.dim(0), k = kernels.dim(1), cin = kernels.dim(2);
    const std::size_t L = x.dim(0), Lout = L - k + 1;
    if (grad_out.rank() != 2 || grad_out.dim(0) != Lout || grad_out.dim(1) != K)
        throw ShapeError("conv1d_backward: upstream shape " + shape_to_string(grad_out.shape()) +
                         " vs expected (" + std::to_string(Lout) + ", " + std::to_string(K) + ")");

    Conv1dGrads g;
    g.dkernels = Tensor({K, k, cin});
    g.dbias = Tensor({K});
    g.dx = Tensor({L, cin});

    for (std::size_t p = 0; p < Lout; ++p) {
        for (std::size_t j = 0; j < K; ++j) {
            const double go = grad_out.at(p, j);
            if (go == 0.0) continue;
            g.dbias[j] += go;
            for (std::size_t dk = 0; dk < k; ++dk) {
                for (std::size_t c = 0; c < cin; ++c) {
                    g.dkernels.at(j, dk, c) += go * x.at(p + dk, c);
                    g.dx.at(p + dk, c) += go * kernels.at(j, dk, c);
                }
            }
        }
    }
    return g;
}

}  // namespace blcn
