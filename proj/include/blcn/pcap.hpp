#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace blcn {

class PcapError : public std::runtime_error {
public:
    explicit PcapError(const std::string& what) : std::runtime_error(what) {}
};

enum class Protocol { Tcp, Udp, Icmp, Arp, Other };

const char* protocol_name(Protocol p);

struct PacketRecord {
    std::uint32_t ts_sec = 0;
    std::uint32_t ts_usec = 0;
    std::uint32_t src_ip = 0;  // host byte order; 0 when not parseable
    std::uint32_t dst_ip = 0;
    std::uint16_t src_port = 0;  // TCP/UDP only, else 0
    std::uint16_t dst_port = 0;
    Protocol protocol = Protocol::Other;
    std::uint32_t length = 0;  // original on-wire length
    bool tcp_syn = false;      // TCP SYN set without ACK

    double time() const { return ts_sec + ts_usec * 1e-6; }
};

// Classic pcap only: 24-byte global header (magic 0xa1b2c3d4, or the
// byte-swapped 0xd4c3b2a1 which flips all header fields), 16-byte per-record
// headers, microsecond timestamps. Ethernet payloads are decoded to
// IPv4/TCP/UDP/ICMP and ARP; anything else becomes protocol=Other with
// addressing zeroed. Structural damage (bad magic, truncated header, caplen
// past end-of-file) raises PcapError with the byte offset.
std::vector<PacketRecord> parse_pcap(const std::vector<std::uint8_t>& bytes);

}  // namespace blcn
