#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "blcn/tensor.hpp"

namespace blcn {

// Named, ordered registry of parameter tensors. The store does not own the
// tensors; layers do. Non-trainable entries (batch-norm moving statistics)
// have no gradient buffer.
class ParamStore {
public:
    struct Entry {
        std::string name;
        Tensor* value = nullptr;
        Tensor* grad = nullptr;  // nullptr for non-trainable entries
        bool trainable = true;
    };

    void add(std::string name, Tensor* value, Tensor* grad) {
        entries_.push_back({std::move(name), value, grad, true});
    }
    void add_stat(std::string name, Tensor* value) {
        entries_.push_back({std::move(name), value, nullptr, false});
    }

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    std::size_t trainable_count() const {
        std::size_t n = 0;
        for (const Entry& e : entries_)
            if (e.trainable) n += e.value->size();
        return n;
    }
    std::size_t total_count() const {
        std::size_t n = 0;
        for (const Entry& e : entries_) n += e.value->size();
        return n;
    }

    void zero_grads() {
        for (Entry& e : entries_)
            if (e.grad) e.grad->fill(0.0);
    }

private:
    std::vector<Entry> entries_;
};

}  // namespace blcn
