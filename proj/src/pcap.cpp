#include "blcn/pcap.hpp"

#include <cstdio>

namespace blcn {

const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::Tcp: return "tcp";
        case Protocol::Udp: return "udp";
        case Protocol::Icmp: return "icmp";
        case Protocol::Arp: return "arp";
        case Protocol::Other: return "other";
    }
    return "other";
}

namespace {

constexpr std::uint32_t kMagicLe = 0xa1b2c3d4;
constexpr std::uint32_t kMagicBe = 0xd4c3b2a1;
constexpr std::uint32_t kMagicPcapng = 0x0a0d0d0a;
constexpr std::uint32_t kLinkEthernet = 1;

std::uint32_t read_u32(const std::uint8_t* p, bool swap) {
    std::uint32_t v = static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
                      static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
    if (swap) v = __builtin_bswap32(v);
    return v;
}

// network byte order (big-endian) fields inside packet payloads
std::uint16_t read_be16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] << 8 | p[1]);
}
std::uint32_t read_be32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) << 24 | static_cast<std::uint32_t>(p[1]) << 16 |
           static_cast<std::uint32_t>(p[2]) << 8 | static_cast<std::uint32_t>(p[3]);
}

std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", v);
    return buf;
}

// Fills protocol/addressing from an Ethernet frame; leaves Other/zeroed when
// the frame is not IPv4/ARP or too short to carry the claimed headers.
void decode_ethernet(const std::uint8_t* frame, std::size_t caplen, PacketRecord& rec) {
    if (caplen < 14) return;
    const std::uint16_t ethertype = read_be16(frame + 12);
    const std::uint8_t* payload = frame + 14;
    const std::size_t payload_len = caplen - 14;

    if (ethertype == 0x0806) {  // ARP over IPv4/Ethernet
        rec.protocol = Protocol::Arp;
        // htype(2) ptype(2) hlen(1) plen(1) oper(2) sha(6) spa(4) tha(6) tpa(4)
        if (payload_len >= 28 && read_be16(payload + 2) == 0x0800) {
            rec.src_ip = read_be32(payload + 14);
            rec.dst_ip = read_be32(payload + 24);
        }
        return;
    }
    if (ethertype != 0x0800) return;  // not IPv4
    if (payload_len < 20) return;

    const std::uint8_t version = payload[0] >> 4;
    const std::size_t ihl = static_cast<std::size_t>(payload[0] & 0x0f) * 4;
    if (version != 4 || ihl < 20 || payload_len < ihl) return;

    rec.src_ip = read_be32(payload + 12);
    rec.dst_ip = read_be32(payload + 16);
    const std::uint8_t ip_proto = payload[9];
    const std::uint8_t* l4 = payload + ihl;
    const std::size_t l4_len = payload_len - ihl;

    switch (ip_proto) {
        case 6:
            rec.protocol = Protocol::Tcp;
            if (l4_len >= 4) {
                rec.src_port = read_be16(l4);
                rec.dst_port = read_be16(l4 + 2);
            }
            if (l4_len >= 14) {
                const std::uint8_t flags = l4[13];
                rec.tcp_syn = (flags & 0x02) != 0 && (flags & 0x10) == 0;
            }
            break;
        case 17:
            rec.protocol = Protocol::Udp;
            if (l4_len >= 4) {
                rec.src_port = read_be16(l4);
                rec.dst_port = read_be16(l4 + 2);
            }
            break;
        case 1:
            rec.protocol = Protocol::Icmp;
            break;
        default:
            // IPv4 but an unmodeled transport; keep the addressing.
            rec.protocol = Protocol::Other;
            break;
    }
}

}  // namespace

std::vector<PacketRecord> parse_pcap(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 24)
        throw PcapError("truncated global header: " + std::to_string(bytes.size()) +
                        " bytes, need 24");

    const std::uint32_t magic = read_u32(bytes.data(), false);
    bool swap = false;
    if (magic == kMagicLe) swap = false;
    else if (magic == kMagicBe) swap = true;
    else if (magic == kMagicPcapng)
        throw PcapError("pcapng input not supported: classic pcap only");
    else
        throw PcapError("bad magic " + hex32(magic) + ": classic pcap only");

    const std::uint32_t linktype = read_u32(bytes.data() + 20, swap);

    std::vector<PacketRecord> records;
    std::size_t off = 24;
    while (off < bytes.size()) {
        if (bytes.size() - off < 16)
            throw PcapError("truncated packet header at offset " + std::to_string(off) + ": " +
                            std::to_string(bytes.size() - off) + " bytes, need 16");
        PacketRecord rec;
        rec.ts_sec = read_u32(bytes.data() + off, swap);
        rec.ts_usec = read_u32(bytes.data() + off + 4, swap);
        const std::uint32_t caplen = read_u32(bytes.data() + off + 8, swap);
        rec.length = read_u32(bytes.data() + off + 12, swap);
        off += 16;
        if (bytes.size() - off < caplen)
            throw PcapError("truncated packet data at offset " + std::to_string(off) +
                            ": caplen " + std::to_string(caplen) + ", remaining " +
                            std::to_string(bytes.size() - off));
        if (linktype == kLinkEthernet) decode_ethernet(bytes.data() + off, caplen, rec);
        off += caplen;
        records.push_back(rec);
    }
    return records;
}

}  // namespace blcn
