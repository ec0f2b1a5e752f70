#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "blcn/flow.hpp"

namespace blcn {

class CsvError : public std::runtime_error {
public:
    explicit CsvError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr const char* kFlowCsvHeader =
    "window_start,src_ip,dst_ip,dst_port,packet_count,byte_count,mean_iat,"
    "distinct_ports,syn_ratio,arp_count,label";

// Floats are written with 6 decimal places; round-trip is lossless at that
// precision. Labels are class-name strings.
void save_flow_csv(const std::vector<FlowRecord>& flows, const std::string& path);

// Errors carry 1-based row numbers (header is row 1).
std::vector<FlowRecord> load_flow_csv(const std::string& path);

}  // namespace blcn
