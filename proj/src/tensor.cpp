#include "blcn/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace blcn {

std::string shape_to_string(const std::vector<std::size_t>& shape) {
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out << ", ";
        out << shape[i];
    }
    out << ')';
    return out.str();
}

namespace {

std::size_t checked_count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) throw ShapeError("tensor dimension must be positive, got shape " + shape_to_string(shape));
        n *= d;
    }
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(checked_count(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
    if (checked_count(shape_) != data_.size()) {
        throw ShapeError("value count " + std::to_string(data_.size()) +
                         " does not match shape " + shape_to_string(shape_));
    }
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
    Tensor t(std::move(shape));
    t.fill(value);
    return t;
}

Tensor Tensor::vec(std::initializer_list<double> values) {
    return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
    std::size_t n = checked_count(shape);
    if (n != data_.size()) {
        throw ShapeError("cannot reshape " + shape_to_string(shape_) + " to " + shape_to_string(shape));
    }
    return Tensor(std::move(shape), data_);
}

void Tensor::fill(double value) {
    std::fill(data_.begin(), data_.end(), value);
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) +
                         " vs " + shape_to_string(b.shape()));
    }
}

template <typename F>
Tensor map(const Tensor& x, F f) {
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
    return out;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
        throw ShapeError("matmul: incompatible shapes " + shape_to_string(a.shape()) +
                         " x " + shape_to_string(b.shape()));
    }
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a.at(i, p);
            if (aip == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) out.at(i, j) += aip * b.at(p, j);
        }
    }
    return out;
}

Tensor matvec(const Tensor& a, const Tensor& x) {
    if (a.rank() != 2 || x.rank() != 1 || a.dim(1) != x.dim(0)) {
        throw ShapeError("matvec: incompatible shapes " + shape_to_string(a.shape()) +
                         " x " + shape_to_string(x.shape()));
    }
    const std::size_t m = a.dim(0), k = a.dim(1);
    Tensor out({m});
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t p = 0; p < k; ++p) acc += a.at(i, p) * x[p];
        out[i] = acc;
    }
    return out;
}

Tensor sigmoid(const Tensor& x) {
    return map(x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Tensor tanh_elem(const Tensor& x) {
    return map(x, [](double v) { return std::tanh(v); });
}

Tensor relu(const Tensor& x) {
    return map(x, [](double v) { return v > 0.0 ? v : 0.0; });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "hadamard");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Tensor scale(const Tensor& a, double s) {
    return map(a, [s](double v) { return v * s; });
}

void add_in_place(Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add_in_place");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

Tensor softmax(const Tensor& logits) {
    if (logits.rank() != 1 || logits.size() == 0) {
        throw ShapeError("softmax: expected non-empty 1-D tensor, got " + shape_to_string(logits.shape()));
    }
    double mx = logits[0];
    for (std::size_t i = 1; i < logits.size(); ++i) mx = std::max(mx, logits[i]);
    Tensor out(logits.shape());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= sum;
    return out;
}

Tensor flatten(const Tensor& x) {
    if (x.size() == 0) return Tensor();
    return x.reshaped({x.size()});
}

}  // namespace blcn
