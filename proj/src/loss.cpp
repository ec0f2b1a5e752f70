#include "blcn/loss.hpp"

#include <cmath>

namespace blcn {

LossResult cross_entropy(const Tensor& probs, const Tensor& onehot) {
    if (probs.rank() != 2 || !probs.same_shape(onehot))
        throw ShapeError("cross_entropy: probs " + shape_to_string(probs.shape()) + " vs onehot " +
                         shape_to_string(onehot.shape()));
    const std::size_t B = probs.dim(0), C = probs.dim(1);
    if (B == 0) throw ShapeError("cross_entropy: empty batch");

    LossResult result;
    result.grad_logits = Tensor({B, C});
    double total = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
        std::size_t ones = 0, true_class = 0;
        for (std::size_t c = 0; c < C; ++c) {
            const double y = onehot.at(b, c);
            if (y == 1.0) {
                ++ones;
                true_class = c;
            } else if (y != 0.0) {
                throw std::invalid_argument("cross_entropy: malformed one-hot at row " +
                                            std::to_string(b) + " (entry not 0 or 1)");
            }
        }
        if (ones != 1)
            throw std::invalid_argument("cross_entropy: malformed one-hot at row " +
                                        std::to_string(b) + " (" + std::to_string(ones) +
                                        " ones, expected exactly 1)");
        const double p = probs.at(b, true_class);
        total += -std::log(p < 1e-12 ? 1e-12 : p);
        for (std::size_t c = 0; c < C; ++c)
            result.grad_logits.at(b, c) = (probs.at(b, c) - onehot.at(b, c)) / static_cast<double>(B);
    }
    result.loss = total / static_cast<double>(B);
    return result;
}

}  // namespace blcn
