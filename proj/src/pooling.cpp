#include "blcn/pooling.hpp"

namespace blcn {

std::size_t avgpool1d_output_length(std::size_t length, std::size_t pool, std::size_t stride) {
    if (pool == 0 || stride == 0) throw ShapeError("avgpool1d: pool and stride must be positive");
    if (length < pool)
        throw ShapeError("avgpool1d: input length " + std::to_string(length) +
                         " shorter than pool size " + std::to_string(pool));
    return (length - pool) / stride + 1;
}

Tensor avgpool1d_forward(const Tensor& x, std::size_t pool, std::size_t stride) {
    if (x.rank() != 2)
        throw ShapeError("avgpool1d: input must be [L x C], got " + shape_to_string(x.shape()));
    const std::size_t L = x.dim(0), C = x.dim(1);
    const std::size_t Lout = avgpool1d_output_length(L, pool, stride);

    Tensor out({Lout, C});
    const double inv = 1.0 / static_cast<double>(pool);
    for (std::size_t p = 0; p < Lout; ++p) {
        const std::size_t start = p * stride;
        for (std::size_t c = 0; c < C; ++c) {
            double acc = 0.0;
            for (std::size_t w = 0; w < pool; ++w) acc += x.at(start + w, c);
            out.at(p, c) = acc * inv;
        }
    }
    return out;
}

Tensor avgpool1d_backward(std::size_t input_length, std::size_t pool, std::size_t stride,
                          const Tensor& grad_out) {
    const std::size_t Lout = avgpool1d_output_length(input_length, pool, stride);
    if (grad_out.rank() != 2 || grad_out.dim(0) != Lout)
        throw ShapeError("avgpool1d_backward: upstream shape " + shape_to_string(grad_out.shape()) +
                         " vs expected " + std::to_string(Lout) + " rows");
    const std::size_t C = grad_out.dim(1);

    Tensor dx({input_length, C});
    const double inv = 1.0 / static_cast<double>(pool);
    for (std::size_t p = 0; p < Lout; ++p) {
        const std::size_t start = p * stride;
        for (std::size_t c = 0; c < C; ++c) {
            const double share = grad_out.at(p, c) * inv;
            for (std::size_t w = 0; w < pool; ++w) dx.at(start + w, c) += share;
        }
    }
    return dx;
}

}  // namespace blcn
