#include "blcn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blcn {

namespace {

std::uint64_t in_range(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
    return lo + rng.bounded(hi - lo + 1);
}

std::uint32_t make_ip(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return a << 24 | b << 16 | c << 8 | d;
}

// spreads a key index across two octets (supports up to 65536 keys/class)
std::uint32_t idx_hi(std::size_t i) { return static_cast<std::uint32_t>(i >> 8 & 0xff); }
std::uint32_t idx_lo(std::size_t i) { return static_cast<std::uint32_t>(i & 0xff); }

// Quantize a target ratio so ratio * packets is exactly integral.
double quantized_ratio(double target, std::uint64_t packets, Rng& rng) {
    const double jitter = rng.uniform(-0.05, 0.05);
    double syns = std::round((target + jitter) * static_cast<double>(packets));
    if (syns < 0) syns = 0;
    if (syns > static_cast<double>(packets)) syns = static_cast<double>(packets);
    return syns / static_cast<double>(packets);
}

}  // namespace

void SynthProfile::validate() const {
    auto check = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("synth profile: ") + what);
    };
    check(window_seconds > 0, "window_seconds must be positive");
    check(flows_per_key >= 1, "flows_per_key must be >= 1");
    check(normal_packets_min >= 1 && normal_packets_min <= normal_packets_max,
          "normal packet bounds inverted or zero");
    check(mirai_sources >= 1, "mirai_sources must be >= 1");
    check(mirai_packets_min >= 1 && mirai_packets_min <= mirai_packets_max,
          "mirai packet bounds inverted or zero");
    check(dos_packets_min >= 1 && dos_packets_min <= dos_packets_max,
          "dos packet bounds inverted or zero");
    check(dos_syn_min >= 0.0 && dos_syn_min <= 1.0, "dos_syn_min outside [0,1]");
    check(normal_syn_ratio >= 0.0 && normal_syn_ratio <= 1.0, "normal_syn_ratio outside [0,1]");
    check(mitm_arp_min >= 1 && mitm_arp_min <= mitm_arp_max, "mitm arp bounds inverted or zero");
    check(scan_ports_min >= 1 && scan_ports_min <= scan_ports_max,
          "scan port bounds inverted or zero");
    check(scan_packets_max >= 1, "scan_packets_max must be >= 1");
}

kv::Map SynthProfile::to_kv() const {
    kv::Map m;
    m["window_seconds"] = kv::format_double(window_seconds);
    m["flows_per_key"] = std::to_string(flows_per_key);
    m["normal_packets_min"] = std::to_string(normal_packets_min);
    m["normal_packets_max"] = std::to_string(normal_packets_max);
    m["normal_syn_ratio"] = kv::format_double(normal_syn_ratio);
    m["mirai_sources"] = std::to_string(mirai_sources);
    m["mirai_packets_min"] = std::to_string(mirai_packets_min);
    m["mirai_packets_max"] = std::to_string(mirai_packets_max);
    m["dos_packets_min"] = std::to_string(dos_packets_min);
    m["dos_packets_max"] = std::to_string(dos_packets_max);
    m["dos_syn_min"] = kv::format_double(dos_syn_min);
    m["mitm_arp_min"] = std::to_string(mitm_arp_min);
    m["mitm_arp_max"] = std::to_string(mitm_arp_max);
    m["scan_ports_min"] = std::to_string(scan_ports_min);
    m["scan_ports_max"] = std::to_string(scan_ports_max);
    m["scan_packets_max"] = std::to_string(scan_packets_max);
    return m;
}

SynthProfile SynthProfile::from_kv(const kv::Map& map) {
    SynthProfile p;
    const kv::Map known = p.to_kv();
    for (const auto& [key, value] : map)
        if (!known.count(key)) throw kv::KvError("synth profile: unknown key '" + key + "'");
    auto u64 = [&](const char* key, std::uint64_t dflt) {
        return map.count(key) ? kv::get_u64(map, key) : dflt;
    };
    auto dbl = [&](const char* key, double dflt) {
        return map.count(key) ? kv::get_double(map, key) : dflt;
    };
    p.window_seconds = dbl("window_seconds", p.window_seconds);
    p.flows_per_key = u64("flows_per_key", p.flows_per_key);
    p.normal_packets_min = u64("normal_packets_min", p.normal_packets_min);
    p.normal_packets_max = u64("normal_packets_max", p.normal_packets_max);
    p.normal_syn_ratio = dbl("normal_syn_ratio", p.normal_syn_ratio);
    p.mirai_sources = u64("mirai_sources", p.mirai_sources);
    p.mirai_packets_min = u64("mirai_packets_min", p.mirai_packets_min);
    p.mirai_packets_max = u64("mirai_packets_max", p.mirai_packets_max);
    p.dos_packets_min = u64("dos_packets_min", p.dos_packets_min);
    p.dos_packets_max = u64("dos_packets_max", p.dos_packets_max);
    p.dos_syn_min = dbl("dos_syn_min", p.dos_syn_min);
    p.mitm_arp_min = u64("mitm_arp_min", p.mitm_arp_min);
    p.mitm_arp_max = u64("mitm_arp_max", p.mitm_arp_max);
    p.scan_ports_min = u64("scan_ports_min", p.scan_ports_min);
    p.scan_ports_max = u64("scan_ports_max", p.scan_ports_max);
    p.scan_packets_max = u64("scan_packets_max", p.scan_packets_max);
    p.validate();
    return p;
}

std::vector<FlowRecord> synth_generate(const SynthProfile& profile, std::size_t n_per_class,
                                       Rng& rng) {
    profile.validate();
    if (n_per_class < 1) throw std::invalid_argument("synth_generate: n_per_class must be >= 1");

    std::vector<FlowRecord> flows;
    flows.reserve(n_per_class * kNumClasses);
    const double w = profile.window_seconds;

    for (std::size_t cls = 0; cls < kNumClasses; ++cls) {
        const ClassLabel label = static_cast<ClassLabel>(cls);
        std::size_t emitted = 0;
        for (std::size_t key = 0; emitted < n_per_class; ++key) {
            // run of consecutive windows under one flow key; the last key of a
            // class may come up short when flows_per_key does not divide n
            const std::size_t run =
                std::min<std::size_t>(profile.flows_per_key, n_per_class - emitted);

            std::uint32_t src = 0, dst = 0;
            std::uint16_t port = 0;
            switch (label) {
                case ClassLabel::Normal:
                    src = make_ip(192, 168, idx_hi(key), idx_lo(key));
                    dst = make_ip(10, 0, idx_hi(key), idx_lo(key));
                    port = static_cast<std::uint16_t>(in_range(rng, 1024, 49151));
                    break;
                case ClassLabel::Mirai:
                    // few sources, many destinations
                    src = make_ip(203, 0, 113,
                                  static_cast<std::uint32_t>(rng.bounded(profile.mirai_sources)));
                    dst = make_ip(10, 1, idx_hi(key), idx_lo(key));
                    port = rng.bounded(2) == 0 ? 23 : 2323;  // telnet-style targets
                    break;
                case ClassLabel::DoS:
                    // many sources hammering one destination
                    src = make_ip(198, 51, idx_hi(key), idx_lo(key));
                    dst = make_ip(10, 0, 0, 2);
                    port = 80;
                    break;
                case ClassLabel::MitmArp:
                    src = make_ip(192, 168, 100 + idx_hi(key), idx_lo(key));
                    dst = make_ip(10, 2, idx_hi(key), idx_lo(key));
                    port = static_cast<std::uint16_t>(in_range(rng, 1024, 49151));
                    break;
                case ClassLabel::Scan:
                    src = make_ip(172, 16, idx_hi(key), idx_lo(key));
                    dst = make_ip(10, 3, idx_hi(key), idx_lo(key));
                    port = static_cast<std::uint16_t>(in_range(rng, 1, 1023));
                    break;
            }
            const double t0 = static_cast<double>(rng.bounded(1000)) * w;

            for (std::size_t j = 0; j < run; ++j) {
                FlowRecord f;
                f.label = label;
                f.src_ip = src;
                f.dst_ip = dst;
                f.dst_port = port;
                f.window_start = t0 + static_cast<double>(j) * w;
                switch (label) {
                    case ClassLabel::Normal: {
                        f.packet_count =
                            in_range(rng, profile.normal_packets_min, profile.normal_packets_max);
                        f.byte_count = f.packet_count * in_range(rng, 60, 300);
                        f.mean_inter_arrival = rng.uniform(0.05, 0.5);
                        f.distinct_dst_ports = in_range(rng, 1, 3);
                        f.syn_ratio =
                            quantized_ratio(profile.normal_syn_ratio, f.packet_count, rng);
                        f.arp_count = rng.bounded(4) == 0 ? 1 : 0;
                        break;
                    }
                    case ClassLabel::Mirai: {
                        f.packet_count =
                            in_range(rng, profile.mirai_packets_min, profile.mirai_packets_max);
                        f.byte_count = f.packet_count * in_range(rng, 60, 120);
                        f.mean_inter_arrival = rng.uniform(0.001, 0.01);  // bursty
                        f.distinct_dst_ports = in_range(rng, 3, 10);
                        f.syn_ratio = quantized_ratio(0.45, f.packet_count, rng);
                        f.arp_count = 0;
                        break;
                    }
                    case ClassLabel::DoS: {
                        // Pareto-style heavy tail, clamped to the configured bounds
                        const double u = rng.uniform01();
                        const double tail = static_cast<double>(profile.dos_packets_min) /
                                            std::pow(1.0 - u, 1.0 / 1.5);
                        f.packet_count = static_cast<std::uint64_t>(
                            std::min(tail, static_cast<double>(profile.dos_packets_max)));
                        f.byte_count = f.packet_count * in_range(rng, 40, 120);
                        f.mean_inter_arrival = rng.uniform(1e-4, 2e-3);
                        f.distinct_dst_ports = 1;
                        f.syn_ratio = quantized_ratio(rng.uniform(profile.dos_syn_min, 1.0),
                                                      f.packet_count, rng);
                        f.arp_count = 0;
                        break;
                    }
                    case ClassLabel::MitmArp: {
                        // normal-shaped traffic plus heavy ARP chatter
                        f.packet_count =
                            in_range(rng, profile.normal_packets_min, profile.normal_packets_max);
                        f.byte_count = f.packet_count * in_range(rng, 60, 300);
                        f.mean_inter_arrival = rng.uniform(0.05, 0.5);
                        f.distinct_dst_ports = in_range(rng, 1, 3);
                        f.syn_ratio =
                            quantized_ratio(profile.normal_syn_ratio, f.packet_count, rng);
                        f.arp_count = in_range(rng, profile.mitm_arp_min, profile.mitm_arp_max);
                        break;
                    }
                    case ClassLabel::Scan: {
                        // a probe or two per window, but a huge port footprint
                        f.packet_count = in_range(rng, 1, profile.scan_packets_max);
                        f.byte_count = f.packet_count * in_range(rng, 40, 60);
                        f.mean_inter_arrival = f.packet_count > 1 ? rng.uniform(0.001, 0.05) : 0.0;
                        f.distinct_dst_ports =
                            in_range(rng, profile.scan_ports_min, profile.scan_ports_max);
                        f.syn_ratio = quantized_ratio(0.95, f.packet_count, rng);
                        f.arp_count = 0;
                        break;
                    }
                }
                flows.push_back(f);
            }
            emitted += run;
        }
    }
    return flows;
}

}  // namespace blcn
