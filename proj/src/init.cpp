#include "blcn/init.hpp"

#include <cmath>
#include <stdexcept>

namespace blcn {

Tensor truncated_normal(std::vector<std::size_t> shape, double mean, double stddev, Rng& rng) {
    if (stddev <= 0.0) throw std::invalid_argument("truncated_normal: std must be > 0");
    Tensor out(std::move(shape));
    const double bound = 2.0 * stddev;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double v;
        do {
            v = rng.normal(mean, stddev);
        } while (std::abs(v - mean) > bound);
        out[i] = v;
    }
    return out;
}

Tensor he_uniform(std::vector<std::size_t> shape, std::size_t fan_in, Rng& rng) {
    if (fan_in == 0) throw std::invalid_argument("he_uniform: fan_in must be > 0");
    Tensor out(std::move(shape));
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = rng.uniform(-limit, limit);
    return out;
}

}  // namespace blcn
