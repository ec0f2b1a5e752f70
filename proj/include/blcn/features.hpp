#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "blcn/flow.hpp"
#include "blcn/tensor.hpp"

namespace blcn {

// Feature vector layout (schema version 1):
//   [0..3]  src IP octets / 255
//   [4..7]  dst IP octets / 255
//   [8]     dst_port / 65535
//   [9..14] z-scored counters: packet_count, byte_count, mean_inter_arrival,
//           distinct_dst_ports, syn_ratio, arp_count
constexpr std::uint32_t kSchemaVersion = 1;
constexpr std::size_t kZScored = 6;
constexpr std::size_t kFeatureDim = 9 + kZScored;

// Z-score statistics for the counter block. Fit these on the training split
// only; validation/test flows are encoded with the training statistics.
struct NormStats {
    std::uint32_t schema_version = kSchemaVersion;
    std::array<double, kZScored> mean{};
    std::array<double, kZScored> stddev{};  // floored at 1e-6 when fit

    static NormStats fit(const std::vector<FlowRecord>& training_flows);
};

Tensor encode_features(const FlowRecord& flow, const NormStats& stats);  // [kFeatureDim]

// One model sample before encoding: up to time_steps consecutive flow
// records of a single (src, dst, dst_port) key, oldest first. Shorter
// sequences are front-padded with zero vectors at encode time.
struct FlowSequence {
    std::vector<FlowRecord> steps;  // real steps only, size() in [1, time_steps]
    std::size_t time_steps = 10;
    ClassLabel label = ClassLabel::Normal;  // label of the final step
};

// Sliding windows of time_steps consecutive flow records per
// (src, dst, dst_port) key, ordered by window_start. A key with m >= T
// windows yields m-T+1 sequences; a key with fewer yields one short
// (to-be-padded) sequence.
std::vector<FlowSequence> build_sequences(const std::vector<FlowRecord>& flows,
                                          std::size_t time_steps = 10);

struct EncodedSample {
    Tensor x;  // [time_steps x kFeatureDim]
    // One flag per step; 0 marks front-padding (zero vectors).
    std::vector<std::uint8_t> mask;
    ClassLabel label = ClassLabel::Normal;
};

using Dataset = std::vector<EncodedSample>;

EncodedSample encode_sequence(const FlowSequence& seq, const NormStats& stats);
Dataset encode_sequences(const std::vector<FlowSequence>& seqs, const NormStats& stats);

// Every real step of every sequence, occurrence-weighted — the flow
// population NormStats::fit sees for a split of sequences.
std::vector<FlowRecord> sequence_flows(const std::vector<FlowSequence>& seqs);

// [B x T x F] batch of samples[begin..end)
Tensor batch_inputs(const Dataset& samples, std::size_t begin, std::size_t end);
// [B x classes] one-hot labels of samples[begin..end)
Tensor batch_onehot(const Dataset& samples, std::size_t begin, std::size_t end,
                    std::size_t classes);

}  // namespace blcn
