#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blcn/pcap.hpp"

namespace blcn {

// Stable integer codes; Normal is the unique non-anomaly class.
enum class ClassLabel : int { Normal = 0, Mirai = 1, DoS = 2, MitmArp = 3, Scan = 4 };

constexpr std::size_t kNumClasses = 5;

const std::string& label_to_string(ClassLabel label);
ClassLabel label_from_string(const std::string& name);  // error lists the 5 valid names

std::string ipv4_to_string(std::uint32_t ip);
std::uint32_t ipv4_from_string(const std::string& text);

// Per-(src, dst, dst_port) aggregate over one tumbling window.
struct FlowRecord {
    double window_start = 0.0;
    std::uint32_t src_ip = 0;
    std::uint32_t dst_ip = 0;
    std::uint16_t dst_port = 0;
    std::uint64_t packet_count = 0;
    std::uint64_t byte_count = 0;
    double mean_inter_arrival = 0.0;     // seconds; 0 for single-packet flows
    std::uint64_t distinct_dst_ports = 0;  // breadth of the (src, dst) pair in this window
    double syn_ratio = 0.0;              // TCP SYN-without-ACK fraction of packets
    std::uint64_t arp_count = 0;
    ClassLabel label = ClassLabel::Normal;
};

// Groups packets by (src_ip, dst_ip, dst_port) inside tumbling windows of
// window_seconds (window index = floor(t / window)). Sorts by time first.
// Protocol::Other packets are not aggregated; everything else is, so the sum
// of packet_count equals the number of parseable IPv4/ARP packets. Labels
// come out as Normal placeholders — assignment happens downstream.
std::vector<FlowRecord> extract_flows(std::vector<PacketRecord> packets, double window_seconds);

}  // namespace blcn
