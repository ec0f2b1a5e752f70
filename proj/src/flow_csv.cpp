#include "blcn/flow_csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "blcn/kv.hpp"

namespace blcn {

namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cols;
    std::string col;
    std::istringstream in(line);
    while (std::getline(in, col, ',')) cols.push_back(col);
    if (!line.empty() && line.back() == ',') cols.push_back("");
    return cols;
}

}  // namespace

void save_flow_csv(const std::vector<FlowRecord>& flows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot open '" + path + "' for writing");
    out << kFlowCsvHeader << '\n';
    for (const FlowRecord& f : flows) {
        out << fmt6(f.window_start) << ',' << ipv4_to_string(f.src_ip) << ','
            << ipv4_to_string(f.dst_ip) << ',' << f.dst_port << ',' << f.packet_count << ','
            << f.byte_count << ',' << fmt6(f.mean_inter_arrival) << ',' << f.distinct_dst_ports
            << ',' << fmt6(f.syn_ratio) << ',' << f.arp_count << ',' << label_to_string(f.label)
            << '\n';
    }
    if (!out) throw CsvError("write failed for '" + path + "'");
}

std::vector<FlowRecord> load_flow_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw CsvError("'" + path + "': missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kFlowCsvHeader) {
        // name the missing columns; "label" is the one people forget
        std::string missing;
        const std::vector<std::string> got = split_row(line);
        for (const std::string& want : split_row(kFlowCsvHeader)) {
            if (std::find(got.begin(), got.end(), want) == got.end()) {
                if (!missing.empty()) missing += ", ";
                missing += "'" + want + "'";
            }
        }
        throw CsvError("'" + path + "': unexpected header" +
                       (missing.empty() ? " (column order differs)" : ": missing column(s) " + missing) +
                       "; expected '" + std::string(kFlowCsvHeader) + "'");
    }

    std::vector<FlowRecord> flows;
    std::size_t row = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cols = split_row(line);
        if (cols.size() != 11)
            throw CsvError("'" + path + "' row " + std::to_string(row) + ": expected 11 columns, got " +
                           std::to_string(cols.size()));
        const std::string where = "'" + path + "' row " + std::to_string(row);
        try {
            FlowRecord f;
            f.window_start = kv::parse_double(cols[0], "window_start");
            f.src_ip = ipv4_from_string(cols[1]);
            f.dst_ip = ipv4_from_string(cols[2]);
            const std::uint64_t port = kv::parse_u64(cols[3], "dst_port");
            if (port > 65535) throw std::invalid_argument("dst_port out of range");
            f.dst_port = static_cast<std::uint16_t>(port);
            f.packet_count = kv::parse_u64(cols[4], "packet_count");
            f.byte_count = kv::parse_u64(cols[5], "byte_count");
            f.mean_inter_arrival = kv::parse_double(cols[6], "mean_iat");
            f.distinct_dst_ports = kv::parse_u64(cols[7], "distinct_ports");
            f.syn_ratio = kv::parse_double(cols[8], "syn_ratio");
            f.arp_count = kv::parse_u64(cols[9], "arp_count");
            f.label = label_from_string(cols[10]);
            flows.push_back(f);
        } catch (const std::exception& e) {
            throw CsvError(where + ": " + e.what());
        }
    }
    return flows;
}

}  // namespace blcn
