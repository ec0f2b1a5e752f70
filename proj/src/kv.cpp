#include "blcn/kv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace blcn::kv {

namespace {

std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    const auto begin = s.find_first_not_of(ws);
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(ws);
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) parts.push_back(trim(item));
    return parts;
}

}  // namespace

Map parse(const std::string& text) {
    Map map;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw KvError("line " + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw KvError("line " + std::to_string(lineno) + ": empty key");
        if (!map.emplace(key, value).second)
            throw KvError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    return map;
}

std::string serialize(const Map& map) {
    std::string out;
    for (const auto& [key, value] : map) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

const std::string& get_string(const Map& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end()) throw KvError("missing key '" + key + "'");
    return it->second;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    if (text.empty() || text[0] == '-')
        throw KvError(what + ": expected non-negative integer, got '" + text + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (errno != 0 || end != text.c_str() + text.size())
        throw KvError(what + ": expected non-negative integer, got '" + text + "'");
    return v;
}

double parse_double(const std::string& text, const std::string& what) {
    if (text.empty()) throw KvError(what + ": expected number, got empty string");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (errno != 0 || end != text.c_str() + text.size())
        throw KvError(what + ": expected number, got '" + text + "'");
    return v;
}

std::uint64_t get_u64(const Map& m, const std::string& key) {
    return parse_u64(get_string(m, key), "key '" + key + "'");
}

double get_double(const Map& m, const std::string& key) {
    return parse_double(get_string(m, key), "key '" + key + "'");
}

bool get_bool(const Map& m, const std::string& key) {
    const std::string& v = get_string(m, key);
    if (v == "0") return false;
    if (v == "1") return true;
    throw KvError("key '" + key + "': expected 0 or 1, got '" + v + "'");
}

std::vector<std::size_t> get_size_list(const Map& m, const std::string& key) {
    std::vector<std::size_t> out;
    const std::string& v = get_string(m, key);
    if (trim(v).empty()) return out;
    for (const std::string& part : split_commas(v))
        out.push_back(parse_u64(part, "key '" + key + "'"));
    return out;
}

std::vector<double> get_double_list(const Map& m, const std::string& key) {
    std::vector<double> out;
    const std::string& v = get_string(m, key);
    if (trim(v).empty()) return out;
    for (const std::string& part : split_commas(v))
        out.push_back(parse_double(part, "key '" + key + "'"));
    return out;
}

}  // namespace blcn::kv
