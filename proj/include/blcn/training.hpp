#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "blcn/features.hpp"
#include "blcn/metrics.hpp"
#include "blcn/model.hpp"

namespace blcn {

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    enum class Optimizer { Adam, Sgd } optimizer = Optimizer::Adam;
    std::array<double, 3> split_ratios = {0.6, 0.2, 0.2};
    std::uint64_t shuffle_seed = 42;

    void validate() const;  // ratios sum to 1 (1e-9), epochs >= 1, batch_size >= 2
};

struct EpochStats {
    double train_loss = 0.0, train_acc = 0.0;
    double val_loss = 0.0, val_acc = 0.0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    std::size_t optimizer_steps = 0;
};

struct Split {
    Dataset train, val, test;
};

struct SplitIndices {
    std::vector<std::size_t> train, val, test;
};

// Deterministic shuffle by seed, then sizes floor(n*r0) / floor(n*r1) /
// remainder. Stratified by class when every class has >= 5 samples
// (largest-remainder allocation per class, global sizes unchanged);
// unstratified contiguous slicing otherwise. Requires n >= 5.
// split_indices is the core; it partitions positions given per-sample label
// codes, so callers can split unencoded data the same way.
SplitIndices split_indices(const std::vector<std::size_t>& labels,
                           const std::array<double, 3>& ratios, std::uint64_t seed);
Split split_dataset(const Dataset& samples, const std::array<double, 3>& ratios,
                    std::uint64_t seed);

// Mini-batch loop: forward(train) -> cross-entropy -> backward -> optimizer
// step. The sample order is shuffled once up front (seeded substream) and
// batch composition stays fixed across epochs, so a zero learning rate
// yields bit-identical epochs. A final batch smaller than 2 is dropped
// (batch-norm train-mode constraint). Train metrics are running averages
// over the epoch's batches; validation runs in infer mode after each epoch.
TrainHistory train(Model& model, const Split& split, const TrainConfig& config);

// Argmax predictions over the samples (infer mode), multi-class confusion
// matrix, and the binary normal/anomaly metrics.
std::pair<ConfusionMatrix, BinaryMetrics> evaluate(Model& model, const Dataset& samples);

// CSV: epoch,train_loss,train_acc,val_loss,val_acc with 6-decimal floats.
void export_history(const TrainHistory& history, const std::string& path);

}  // namespace blcn
