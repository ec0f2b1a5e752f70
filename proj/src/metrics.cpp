#include "blcn/metrics.hpp"

namespace blcn {

BinaryCounts binary_collapse(const ConfusionMatrix& cm) {
    BinaryCounts b;
    const std::size_t n = cm.classes();
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t p = 0; p < n; ++p) {
            const std::uint64_t c = cm.at(t, p);
            const bool true_anomaly = t != 0;
            const bool pred_anomaly = p != 0;
            if (true_anomaly && pred_anomaly) b.tp += c;
            else if (!true_anomaly && !pred_anomaly) b.tn += c;
            else if (!true_anomaly && pred_anomaly) b.fp += c;
            else b.fn += c;
        }
    }
    return b;
}

BinaryMetrics compute_metrics(const BinaryCounts& c) {
    BinaryMetrics m;
    const double tp = static_cast<double>(c.tp);

    if (c.total() == 0) {
        m.degenerate = true;
        return m;
    }
    m.accuracy = (tp + static_cast<double>(c.tn)) / static_cast<double>(c.total());

    if (c.tp + c.fn == 0) m.degenerate = true;
    else m.recall = tp / static_cast<double>(c.tp + c.fn);

    if (c.tp + c.fp == 0) m.degenerate = true;
    else m.precision = tp / static_cast<double>(c.tp + c.fp);

    if (m.precision + m.recall == 0.0) m.degenerate = true;
    else m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);

    return m;
}

double multiclass_accuracy(const ConfusionMatrix& cm) {
    const std::uint64_t total = cm.total();
    if (total == 0) return 0.0;
    return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

}  // namespace blcn
