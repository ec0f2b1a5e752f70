#pragma once

#include <cstdint>
#include <vector>

#include "blcn/flow.hpp"
#include "blcn/kv.hpp"
#include "blcn/rng.hpp"

namespace blcn {

// Knobs for the synthetic flow generator. Defaults give five cleanly
// separable traffic signatures at desk scale:
//   Normal  - low rate, a few ports, syn_ratio around 0.1, no ARP
//   Mirai   - bursty mid-rate flows from a handful of sources to many
//             destinations (short inter-arrivals)
//   DoS     - heavy-tailed high packet counts toward one destination,
//             syn-flood-like ratios
//   MitmArp - Normal-shaped traffic plus a strongly elevated ARP count
//   Scan    - one or two probe packets per flow but a very wide
//             distinct-port footprint, syn_ratio near 1
struct SynthProfile {
    double window_seconds = 1.0;

    // Each (src, dst, dst_port) key gets this many consecutive windows, so a
    // default run fills a whole 10-step model sequence with real data.
    std::uint64_t flows_per_key = 10;

    std::uint64_t normal_packets_min = 5, normal_packets_max = 30;
    double normal_syn_ratio = 0.1;

    std::uint64_t mirai_sources = 4;
    std::uint64_t mirai_packets_min = 30, mirai_packets_max = 120;

    std::uint64_t dos_packets_min = 200, dos_packets_max = 4000;
    double dos_syn_min = 0.8;

    std::uint64_t mitm_arp_min = 20, mitm_arp_max = 60;

    std::uint64_t scan_ports_min = 50, scan_ports_max = 200;
    std::uint64_t scan_packets_max = 3;

    void validate() const;  // throws std::invalid_argument on bad bounds

    kv::Map to_kv() const;
    static SynthProfile from_kv(const kv::Map& map);  // unknown keys rejected
};

// Exactly n_per_class flows per label, emitted in label order
// (Normal, Mirai, DoS, MitmArp, Scan). Flows come in runs of flows_per_key
// consecutive windows sharing one (src, dst, dst_port) key; with the
// defaults every key carries a full 10-step sequence downstream.
// Deterministic given the rng state.
std::vector<FlowRecord> synth_generate(const SynthProfile& profile, std::size_t n_per_class,
                                       Rng& rng);

}  // namespace blcn
