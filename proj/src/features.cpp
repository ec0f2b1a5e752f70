#include "blcn/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace blcn {

namespace {

std::array<double, kZScored> counter_block(const FlowRecord& f) {
    return {static_cast<double>(f.packet_count), static_cast<double>(f.byte_count),
            f.mean_inter_arrival, static_cast<double>(f.distinct_dst_ports), f.syn_ratio,
            static_cast<double>(f.arp_count)};
}

}  // namespace

NormStats NormStats::fit(const std::vector<FlowRecord>& training_flows) {
    if (training_flows.empty())
        throw std::invalid_argument("NormStats::fit: empty training split");
    NormStats s;
    const double n = static_cast<double>(training_flows.size());
    for (const FlowRecord& f : training_flows) {
        const auto c = counter_block(f);
        for (std::size_t i = 0; i < kZScored; ++i) s.mean[i] += c[i];
    }
    for (std::size_t i = 0; i < kZScored; ++i) s.mean[i] /= n;
    for (const FlowRecord& f : training_flows) {
        const auto c = counter_block(f);
        for (std::size_t i = 0; i < kZScored; ++i) {
            const double d = c[i] - s.mean[i];
            s.stddev[i] += d * d;
        }
    }
    for (std::size_t i = 0; i < kZScored; ++i) {
        s.stddev[i] = std::sqrt(s.stddev[i] / n);
        if (s.stddev[i] < 1e-6) s.stddev[i] = 1e-6;  // keeps encode NaN/Inf-free
    }
    return s;
}

Tensor encode_features(const FlowRecord& flow, const NormStats& stats) {
    if (stats.schema_version != kSchemaVersion)
        throw std::invalid_argument("encode_features: schema version " +
                                    std::to_string(stats.schema_version) + ", expected " +
                                    std::to_string(kSchemaVersion));
    Tensor v({kFeatureDim});
    for (int i = 0; i < 4; ++i) {
        v[static_cast<std::size_t>(i)] = ((flow.src_ip >> (24 - 8 * i)) & 0xff) / 255.0;
        v[static_cast<std::size_t>(4 + i)] = ((flow.dst_ip >> (24 - 8 * i)) & 0xff) / 255.0;
    }
    v[8] = flow.dst_port / 65535.0;
    const auto c = counter_block(flow);
    for (std::size_t i = 0; i < kZScored; ++i) v[9 + i] = (c[i] - stats.mean[i]) / stats.stddev[i];
    return v;
}

std::vector<FlowSequence> build_sequences(const std::vector<FlowRecord>& flows,
                                          std::size_t time_steps) {
    if (time_steps == 0) throw std::invalid_argument("build_sequences: time_steps must be >= 1");

    // group by key, ordered; within a key, ordered by window_start
    using Key = std::tuple<std::uint32_t, std::uint32_t, std::uint16_t>;
    std::map<Key, std::vector<const FlowRecord*>> by_key;
    for (const FlowRecord& f : flows) by_key[{f.src_ip, f.dst_ip, f.dst_port}].push_back(&f);
    for (auto& [key, recs] : by_key)
        std::stable_sort(recs.begin(), recs.end(), [](const FlowRecord* a, const FlowRecord* b) {
            return a->window_start < b->window_start;
        });

    std::vector<FlowSequence> out;
    const std::size_t T = time_steps;
    for (const auto& [key, recs] : by_key) {
        const std::size_t m = recs.size();
        const std::size_t n_seqs = m >= T ? m - T + 1 : 1;
        for (std::size_t s = 0; s < n_seqs; ++s) {
            FlowSequence seq;
            seq.time_steps = T;
            const std::size_t real = std::min(m, T);
            seq.steps.reserve(real);
            for (std::size_t t = 0; t < real; ++t) seq.steps.push_back(*recs[m >= T ? s + t : t]);
            seq.label = seq.steps.back().label;
            out.push_back(std::move(seq));
        }
    }
    return out;
}

EncodedSample encode_sequence(const FlowSequence& seq, const NormStats& stats) {
    const std::size_t T = seq.time_steps;
    if (seq.steps.empty() || seq.steps.size() > T)
        throw std::invalid_argument("encode_sequence: " + std::to_string(seq.steps.size()) +
                                    " steps vs time_steps " + std::to_string(T));
    EncodedSample sample;
    sample.x = Tensor({T, kFeatureDim});
    sample.mask.assign(T, 1);
    const std::size_t pad = T - seq.steps.size();
    for (std::size_t t = 0; t < pad; ++t) sample.mask[t] = 0;  // front padding stays zero
    for (std::size_t t = 0; t < seq.steps.size(); ++t) {
        const Tensor enc = encode_features(seq.steps[t], stats);
        for (std::size_t j = 0; j < kFeatureDim; ++j) sample.x.at(pad + t, j) = enc[j];
    }
    sample.label = seq.label;
    return sample;
}

Dataset encode_sequences(const std::vector<FlowSequence>& seqs, const NormStats& stats) {
    Dataset out;
    out.reserve(seqs.size());
    for (const FlowSequence& seq : seqs) out.push_back(encode_sequence(seq, stats));
    return out;
}

std::vector<FlowRecord> sequence_flows(const std::vector<FlowSequence>& seqs) {
    std::vector<FlowRecord> flows;
    for (const FlowSequence& seq : seqs)
        flows.insert(flows.end(), seq.steps.begin(), seq.steps.end());
    return flows;
}

Tensor batch_inputs(const Dataset& samples, std::size_t begin, std::size_t end) {
    if (begin >= end || end > samples.size())
        throw std::invalid_argument("batch_inputs: bad range");
    const std::size_t B = end - begin;
    const std::size_t T = samples[begin].x.dim(0), F = samples[begin].x.dim(1);
    Tensor batch({B, T, F});
    for (std::size_t b = 0; b < B; ++b) {
        const Tensor& x = samples[begin + b].x;
        if (x.dim(0) != T || x.dim(1) != F)
            throw ShapeError("batch_inputs: mixed sample shapes in one batch");
        std::copy(x.data(), x.data() + x.size(), batch.data() + b * T * F);
    }
    return batch;
}

Tensor batch_onehot(const Dataset& samples, std::size_t begin, std::size_t end,
                    std::size_t classes) {
    if (begin >= end || end > samples.size())
        throw std::invalid_argument("batch_onehot: bad range");
    Tensor onehot({end - begin, classes});
    for (std::size_t b = begin; b < end; ++b) {
        const auto c = static_cast<std::size_t>(samples[b].label);
        if (c >= classes)
            throw std::invalid_argument("batch_onehot: label code " + std::to_string(c) +
                                        " out of range for " + std::to_string(classes) + " classes");
        onehot.at(b - begin, c) = 1.0;
    }
    return onehot;
}

}  // namespace blcn
