#include "blcn/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include "blcn/kv.hpp"

namespace blcn {

namespace {
const std::array<std::string, kNumClasses> kLabelNames = {"Normal", "Mirai", "DoS", "MitmArp",
                                                          "Scan"};
}

const std::string& label_to_string(ClassLabel label) {
    const auto i = static_cast<std::size_t>(label);
    if (i >= kNumClasses) throw std::invalid_argument("label_to_string: code out of range");
    return kLabelNames[i];
}

ClassLabel label_from_string(const std::string& name) {
    for (std::size_t i = 0; i < kNumClasses; ++i)
        if (kLabelNames[i] == name) return static_cast<ClassLabel>(i);
    std::string valid;
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        if (i) valid += ", ";
        valid += kLabelNames[i];
    }
    throw std::invalid_argument("unknown label '" + name + "' (valid: " + valid + ")");
}

std::string ipv4_to_string(std::uint32_t ip) {
    return std::to_string(ip >> 24) + "." + std::to_string((ip >> 16) & 0xff) + "." +
           std::to_string((ip >> 8) & 0xff) + "." + std::to_string(ip & 0xff);
}

std::uint32_t ipv4_from_string(const std::string& text) {
    std::uint32_t ip = 0;
    std::size_t pos = 0;
    for (int octet = 0; octet < 4; ++octet) {
        const std::size_t dot = octet < 3 ? text.find('.', pos) : text.size();
        if (dot == std::string::npos)
            throw std::invalid_argument("bad IPv4 address '" + text + "'");
        const std::uint64_t v = kv::parse_u64(text.substr(pos, dot - pos), "IPv4 octet");
        if (v > 255) throw std::invalid_argument("bad IPv4 address '" + text + "'");
        ip = ip << 8 | static_cast<std::uint32_t>(v);
        pos = dot + 1;
    }
    return ip;
}

std::vector<FlowRecord> extract_flows(std::vector<PacketRecord> packets, double window_seconds) {
    if (window_seconds <= 0.0)
        throw std::invalid_argument("extract_flows: window must be positive, got " +
                                    std::to_string(window_seconds));

    std::stable_sort(packets.begin(), packets.end(),
                     [](const PacketRecord& a, const PacketRecord& b) { return a.time() < b.time(); });

    // key = (window index, src, dst, dst_port); std::map gives a stable,
    // sorted emission order.
    using Key = std::tuple<std::int64_t, std::uint32_t, std::uint32_t, std::uint16_t>;
    struct Acc {
        std::uint64_t packets = 0, bytes = 0, syns = 0, arps = 0;
        double first_t = 0, last_t = 0;
    };
    std::map<Key, Acc> flows;
    std::map<std::tuple<std::int64_t, std::uint32_t, std::uint32_t>, std::set<std::uint16_t>> pair_ports;

    for (const PacketRecord& p : packets) {
        if (p.protocol == Protocol::Other) continue;
        const auto window = static_cast<std::int64_t>(std::floor(p.time() / window_seconds));
        const Key key{window, p.src_ip, p.dst_ip, p.dst_port};
        Acc& acc = flows[key];
        if (acc.packets == 0) acc.first_t = p.time();
        acc.last_t = p.time();
        acc.packets += 1;
        acc.bytes += p.length;
        if (p.tcp_syn) acc.syns += 1;
        if (p.protocol == Protocol::Arp) acc.arps += 1;
        pair_ports[{window, p.src_ip, p.dst_ip}].insert(p.dst_port);
    }

    std::vector<FlowRecord> out;
    out.reserve(flows.size());
    for (const auto& [key, acc] : flows) {
        const auto& [window, src, dst, port] = key;
        FlowRecord f;
        f.window_start = static_cast<double>(window) * window_seconds;
        f.src_ip = src;
        f.dst_ip = dst;
        f.dst_port = port;
        f.packet_count = acc.packets;
        f.byte_count = acc.bytes;
        f.mean_inter_arrival =
            acc.packets > 1 ? (acc.last_t - acc.first_t) / static_cast<double>(acc.packets - 1) : 0.0;
        f.distinct_dst_ports = pair_ports[{window, src, dst}].size();
        f.syn_ratio = static_cast<double>(acc.syns) / static_cast<double>(acc.packets);
        f.arp_count = acc.arps;
        out.push_back(f);
    }
    return out;
}

}  // namespace blcn
