#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace blcn {

// Thrown on any dimension/shape disagreement; message names both shapes.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

std::string shape_to_string(const std::vector<std::size_t>& shape);

// Dense row-major N-d array of doubles. Carrier for activations, parameters
// and gradients. Treated as an immutable value once an operation returns it.
class Tensor {
public:
    Tensor() = default;

    // zero-filled
    explicit Tensor(std::vector<std::size_t> shape);

    Tensor(std::vector<std::size_t> shape, std::vector<double> values);

    static Tensor full(std::vector<std::size_t> shape, double value);
    static Tensor vec(std::initializer_list<double> values);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t i) { return data_[i]; }
    double at(std::size_t i) const { return data_[i]; }
    double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    // Same data, new shape; element count must match.
    Tensor reshaped(std::vector<std::size_t> shape) const;

    void fill(double value);
    bool all_finite() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// --- elementwise / linear-algebra primitives -------------------------------

// Standard matrix product, [m x k] * [k x n] -> [m x n], f64 accumulation.
Tensor matmul(const Tensor& a, const Tensor& b);

// [m x k] * [k] -> [m]
Tensor matvec(const Tensor& a, const Tensor& x);

Tensor sigmoid(const Tensor& x);
Tensor tanh_elem(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor hadamard(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
void add_in_place(Tensor& a, const Tensor& b);

// Numerically stable softmax over a 1-D tensor (max subtraction).
Tensor softmax(const Tensor& logits);

// Row-major flattening to 1-D; values untouched.
Tensor flatten(const Tensor& x);

}  // namespace blcn
