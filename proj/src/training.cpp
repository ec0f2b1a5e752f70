#include "blcn/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "blcn/loss.hpp"
#include "blcn/optimizer.hpp"
#include "blcn/rng.hpp"

namespace blcn {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("train config: epochs must be >= 1");
    if (batch_size < 2)
        throw std::invalid_argument("train config: batch_size must be >= 2 (batch-norm constraint)");
    if (learning_rate < 0.0) throw std::invalid_argument("train config: negative learning rate");
    const double sum = split_ratios[0] + split_ratios[1] + split_ratios[2];
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("train config: split ratios sum to " + std::to_string(sum) +
                                    ", expected 1");
    for (double r : split_ratios)
        if (r < 0.0) throw std::invalid_argument("train config: negative split ratio");
}

namespace {

std::size_t argmax_row(const Tensor& m, std::size_t row) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < m.dim(1); ++c)
        if (m.at(row, c) > m.at(row, best)) best = c;
    return best;
}

// Largest-remainder apportionment of `target` slots over per-class ideals,
// capped by what each class still has available.
std::vector<std::size_t> apportion(const std::vector<double>& ideal,
                                   const std::vector<std::size_t>& cap, std::size_t target) {
    const std::size_t k = ideal.size();
    std::vector<std::size_t> take(k);
    std::vector<double> frac(k);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
        take[c] = std::min(static_cast<std::size_t>(std::floor(ideal[c])), cap[c]);
        frac[c] = ideal[c] - std::floor(ideal[c]);
        assigned += take[c];
    }
    while (assigned < target) {
        std::size_t best = k;
        for (std::size_t c = 0; c < k; ++c) {
            if (take[c] >= cap[c]) continue;
            if (best == k || frac[c] > frac[best]) best = c;
        }
        if (best == k) break;  // every class exhausted; caller handles shortfall
        take[best] += 1;
        frac[best] -= 1.0;  // deprioritize after a grant so ties rotate
        ++assigned;
    }
    return take;
}

}  // namespace

SplitIndices split_indices(const std::vector<std::size_t>& labels,
                           const std::array<double, 3>& ratios, std::uint64_t seed) {
    const std::size_t n = labels.size();
    if (n < 5)
        throw std::invalid_argument("split_dataset: need at least 5 samples, got " +
                                    std::to_string(n));
    const double sum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("split_dataset: ratios sum to " + std::to_string(sum));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = Rng::substream(seed, "shuffle");
    rng.shuffle(order);

    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios[0]));
    const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios[1]));

    // class census decides stratified vs plain slicing
    std::size_t k = 0;
    for (std::size_t label : labels) k = std::max(k, label + 1);
    std::vector<std::vector<std::size_t>> by_class(k);  // shuffled order preserved
    for (std::size_t i : order) by_class[labels[i]].push_back(i);

    bool stratify = true;
    for (const auto& cls : by_class)
        if (cls.size() < 5) stratify = false;

    SplitIndices split;
    if (!stratify) {
        split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
        split.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                         order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
        split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
        return split;
    }

    std::vector<double> ideal_train(k), ideal_val(k);
    std::vector<std::size_t> cap(k);
    for (std::size_t c = 0; c < k; ++c) {
        cap[c] = by_class[c].size();
        ideal_train[c] = static_cast<double>(cap[c]) * ratios[0];
    }
    const std::vector<std::size_t> take_train = apportion(ideal_train, cap, n_train);
    for (std::size_t c = 0; c < k; ++c) {
        cap[c] -= take_train[c];
        ideal_val[c] = static_cast<double>(by_class[c].size()) * ratios[1];
    }
    const std::vector<std::size_t> take_val = apportion(ideal_val, cap, n_val);

    for (std::size_t c = 0; c < k; ++c) {
        const auto& cls = by_class[c];
        for (std::size_t i = 0; i < cls.size(); ++i) {
            if (i < take_train[c]) split.train.push_back(cls[i]);
            else if (i < take_train[c] + take_val[c]) split.val.push_back(cls[i]);
            else split.test.push_back(cls[i]);
        }
    }
    return split;
}

Split split_dataset(const Dataset& samples, const std::array<double, 3>& ratios,
                    std::uint64_t seed) {
    std::vector<std::size_t> labels;
    labels.reserve(samples.size());
    for (const EncodedSample& s : samples) labels.push_back(static_cast<std::size_t>(s.label));
    const SplitIndices idx = split_indices(labels, ratios, seed);

    Split split;
    auto take = [&](const std::vector<std::size_t>& from, Dataset& to) {
        to.reserve(from.size());
        for (std::size_t i : from) to.push_back(samples[i]);
    };
    take(idx.train, split.train);
    take(idx.val, split.val);
    take(idx.test, split.test);
    return split;
}

namespace {

// infer-mode loss/accuracy over a whole set, batched
EpochStats eval_pass(Model& model, const Dataset& set, std::size_t batch_size, EpochStats stats) {
    if (set.empty()) return stats;
    const std::size_t classes = model.config().num_classes;
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t at = 0; at < set.size(); at += batch_size) {
        const std::size_t end = std::min(at + batch_size, set.size());
        const Tensor probs = model.forward(batch_inputs(set, at, end), false);
        const Tensor onehot = batch_onehot(set, at, end, classes);
        loss_sum += cross_entropy(probs, onehot).loss * static_cast<double>(end - at);
        for (std::size_t b = 0; b < end - at; ++b)
            if (argmax_row(probs, b) == static_cast<std::size_t>(set[at + b].label)) ++correct;
    }
    stats.val_loss = loss_sum / static_cast<double>(set.size());
    stats.val_acc = static_cast<double>(correct) / static_cast<double>(set.size());
    return stats;
}

}  // namespace

TrainHistory train(Model& model, const Split& split, const TrainConfig& config) {
    config.validate();
    if (split.train.empty()) throw std::invalid_argument("train: empty training split");
    if (split.train.size() < 2)
        throw std::invalid_argument("train: training split smaller than one valid batch (need >= 2)");

    const std::size_t classes = model.config().num_classes;
    const std::size_t B = config.batch_size;

    // One shuffle up front; reusing the batch composition across epochs keeps
    // batch-norm statistics per batch stable when parameters are frozen.
    Dataset train_set = split.train;
    {
        Rng rng = Rng::substream(config.shuffle_seed, "shuffle");
        rng.shuffle(train_set);
    }

    AdamState adam = AdamState::init(model.params());
    TrainHistory history;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double loss_sum = 0.0;
        std::size_t seen = 0, correct = 0;
        for (std::size_t at = 0; at < train_set.size(); at += B) {
            const std::size_t end = std::min(at + B, train_set.size());
            if (end - at < 2) break;  // drop the undersized tail batch
            const Tensor probs = model.forward(batch_inputs(train_set, at, end), true);
            const Tensor onehot = batch_onehot(train_set, at, end, classes);
            const LossResult loss = cross_entropy(probs, onehot);
            model.backward(loss.grad_logits);
            if (config.optimizer == TrainConfig::Optimizer::Adam)
                adam_step(model.params(), adam, config.learning_rate);
            else
                sgd_step(model.params(), config.learning_rate);
            ++history.optimizer_steps;

            loss_sum += loss.loss * static_cast<double>(end - at);
            seen += end - at;
            for (std::size_t b = 0; b < end - at; ++b)
                if (argmax_row(probs, b) == static_cast<std::size_t>(train_set[at + b].label))
                    ++correct;
        }
        if (seen == 0) throw std::invalid_argument("train: no batch of size >= 2 could be formed");

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(seen);
        stats.train_acc = static_cast<double>(correct) / static_cast<double>(seen);
        stats = eval_pass(model, split.val, B, stats);
        history.epochs.push_back(stats);
    }
    return history;
}

std::pair<ConfusionMatrix, BinaryMetrics> evaluate(Model& model, const Dataset& samples) {
    if (samples.empty()) throw std::invalid_argument("evaluate: empty sample set");
    const std::size_t classes = model.config().num_classes;
    ConfusionMatrix cm(classes);
    constexpr std::size_t kChunk = 64;
    for (std::size_t at = 0; at < samples.size(); at += kChunk) {
        const std::size_t end = std::min(at + kChunk, samples.size());
        const Tensor probs = model.forward(batch_inputs(samples, at, end), false);
        for (std::size_t b = 0; b < end - at; ++b)
            cm.add(static_cast<std::size_t>(samples[at + b].label), argmax_row(probs, b));
    }
    return {cm, compute_metrics(binary_collapse(cm))};
}

void export_history(const TrainHistory& history, const std::string& path) {
    if (history.epochs.empty()) throw std::invalid_argument("export_history: empty history");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
    char buf[160];
    for (std::size_t i = 0; i < history.epochs.size(); ++i) {
        const EpochStats& e = history.epochs[i];
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f\n", i + 1, e.train_loss,
                      e.train_acc, e.val_loss, e.val_acc);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace blcn
