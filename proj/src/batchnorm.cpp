#include "blcn/batchnorm.hpp"

#include <cmath>

namespace blcn {

BatchNormState BatchNormState::init(std::size_t features, double momentum, double epsilon) {
    BatchNormState s;
    s.gamma = Tensor::full({features}, 1.0);
    s.beta = Tensor({features});
    s.moving_mean = Tensor({features});
    s.moving_var = Tensor::full({features}, 1.0);
    s.momentum = momentum;
    s.epsilon = epsilon;
    return s;
}

void BatchNormState::validate() const {
    const std::size_t F = gamma.dim(0);
    if (beta.dim(0) != F || moving_mean.dim(0) != F || moving_var.dim(0) != F)
        throw ShapeError("batchnorm: gamma/beta/moving stats must share the feature dimension");
    if (epsilon <= 0.0) throw std::invalid_argument("batchnorm: epsilon must be positive");
    if (momentum <= 0.0 || momentum >= 1.0)
        throw std::invalid_argument("batchnorm: momentum must be in (0,1)");
    for (std::size_t i = 0; i < F; ++i)
        if (moving_var[i] < 0.0) throw std::invalid_argument("batchnorm: moving_var must be >= 0");
}

Tensor batchnorm_forward(BatchNormState& state, const Tensor& x, bool training,
                         BatchNormCache* cache) {
    state.validate();
    if (x.rank() != 2 || x.dim(1) != state.features())
        throw ShapeError("batchnorm: input must be [B x " + std::to_string(state.features()) +
                         "], got " + shape_to_string(x.shape()));
    const std::size_t B = x.dim(0), F = x.dim(1);

    if (!training) {
        Tensor out({B, F});
        for (std::size_t f = 0; f < F; ++f) {
            const double inv = 1.0 / std::sqrt(state.moving_var[f] + state.epsilon);
            for (std::size_t b = 0; b < B; ++b)
                out.at(b, f) = state.gamma[f] * (x.at(b, f) - state.moving_mean[f]) * inv + state.beta[f];
        }
        return out;
    }

    if (B < 2) throw ShapeError("batchnorm: train mode requires a batch of at least 2 rows");

    // biased batch variance, matching the normalization denominator
    Tensor mean({F}), var({F});
    for (std::size_t f = 0; f < F; ++f) {
        double m = 0.0;
        for (std::size_t b = 0; b < B; ++b) m += x.at(b, f);
        m /= static_cast<double>(B);
        double v = 0.0;
        for (std::size_t b = 0; b < B; ++b) {
            const double d = x.at(b, f) - m;
            v += d * d;
        }
        mean[f] = m;
        var[f] = v / static_cast<double>(B);
    }

    Tensor out({B, F});
    BatchNormCache local;
    BatchNormCache& cc = cache ? *cache : local;
    cc.x_centered = Tensor({B, F});
    cc.x_hat = Tensor({B, F});
    cc.inv_std = Tensor({F});
    for (std::size_t f = 0; f < F; ++f) {
        const double inv = 1.0 / std::sqrt(var[f] + state.epsilon);
        cc.inv_std[f] = inv;
        for (std::size_t b = 0; b < B; ++b) {
            const double xc = x.at(b, f) - mean[f];
            const double xh = xc * inv;
            cc.x_centered.at(b, f) = xc;
            cc.x_hat.at(b, f) = xh;
            out.at(b, f) = state.gamma[f] * xh + state.beta[f];
        }
        state.moving_mean[f] = state.momentum * state.moving_mean[f] + (1.0 - state.momentum) * mean[f];
        state.moving_var[f] = state.momentum * state.moving_var[f] + (1.0 - state.momentum) * var[f];
    }
    return out;
}

BatchNormGrads batchnorm_backward(const BatchNormState& state, const BatchNormCache& cache,
                                  const Tensor& grad_out) {
    const std::size_t B = cache.x_hat.dim(0), F = cache.x_hat.dim(1);
    if (grad_out.rank() != 2 || grad_out.dim(0) != B || grad_out.dim(1) != F)
        throw ShapeError("batchnorm_backward: upstream shape " + shape_to_string(grad_out.shape()) +
                         " vs cache " + shape_to_string(cache.x_hat.shape()));

    BatchNormGrads g;
    g.dgamma = Tensor({F});
    g.dbeta = Tensor({F});
    g.dx = Tensor({B, F});

    const double invB = 1.0 / static_cast<double>(B);
    for (std::size_t f = 0; f < F; ++f) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (std::size_t b = 0; b < B; ++b) {
            const double dy = grad_out.at(b, f);
            sum_dy += dy;
            sum_dy_xhat += dy * cache.x_hat.at(b, f);
        }
        g.dbeta[f] = sum_dy;
        g.dgamma[f] = sum_dy_xhat;

        // dx = gamma*inv_std/B * (B*dy - sum(dy) - x_hat * sum(dy*x_hat))
        const double k = state.gamma[f] * cache.inv_std[f] * invB;
        for (std::size_t b = 0; b < B; ++b) {
            const double dy = grad_out.at(b, f);
            g.dx.at(b, f) =
                k * (static_cast<double>(B) * dy - sum_dy - cache.x_hat.at(b, f) * sum_dy_xhat);
        }
    }
    return g;
}

}  // namespace blcn
