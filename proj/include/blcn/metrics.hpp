#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace blcn {

// Multi-class confusion matrix; rows = true class, columns = predicted.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t classes)
        : classes_(classes), counts_(classes * classes, 0) {}

    std::size_t classes() const { return classes_; }
    std::uint64_t at(std::size_t true_c, std::size_t pred_c) const {
        return counts_[true_c * classes_ + pred_c];
    }
    void add(std::size_t true_c, std::size_t pred_c, std::uint64_t n = 1) {
        counts_[true_c * classes_ + pred_c] += n;
    }
    std::uint64_t total() const {
        std::uint64_t n = 0;
        for (std::uint64_t c : counts_) n += c;
        return n;
    }
    std::uint64_t trace() const {
        std::uint64_t n = 0;
        for (std::size_t c = 0; c < classes_; ++c) n += at(c, c);
        return n;
    }

private:
    std::size_t classes_;
    std::vector<std::uint64_t> counts_;
};

// Binary collapse with class 0 (Normal) as the negative class and every
// other class as "anomaly". A misclassified attack type still counts as a
// true positive: anomaly was predicted, just the wrong kind.
struct BinaryCounts {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
    std::uint64_t total() const { return tp + tn + fp + fn; }
};

BinaryCounts binary_collapse(const ConfusionMatrix& cm);

struct BinaryMetrics {
    double accuracy = 0.0;   // (TP+TN) / (TP+TN+FP+FN)
    double recall = 0.0;     // TP / (TP+FN)
    double precision = 0.0;  // TP / (TP+FP)
    double f1 = 0.0;         // 2PR / (P+R)
    // A denominator above was zero; the affected metrics were forced to 0
    // instead of NaN so exported reports stay parseable.
    bool degenerate = false;
};

BinaryMetrics compute_metrics(const BinaryCounts& counts);

double multiclass_accuracy(const ConfusionMatrix& cm);

}  // namespace blcn
