#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace blcn::kv {

class KvError : public std::runtime_error {
public:
    explicit KvError(const std::string& what) : std::runtime_error(what) {}
};

// std::map keeps keys sorted, which is what makes serialize canonical.
using Map = std::map<std::string, std::string>;

// One `key=value` pair per line; '#' starts a comment; blank lines ignored.
// Keys and values are trimmed. Duplicate keys and '='-less lines are errors
// (reported with their line number).
Map parse(const std::string& text);

// Inverse of parse: sorted keys, `key=value\n` per entry.
std::string serialize(const Map& map);

// Round-trip-exact formatting for doubles.
std::string format_double(double v);

std::string join_sizes(const std::vector<std::size_t>& v);
std::string join_doubles(const std::vector<double>& v);

// Typed getters; every failure names the key.
const std::string& get_string(const Map& m, const std::string& key);
std::uint64_t get_u64(const Map& m, const std::string& key);
double get_double(const Map& m, const std::string& key);
bool get_bool(const Map& m, const std::string& key);  // "0" or "1"
std::vector<std::size_t> get_size_list(const Map& m, const std::string& key);
std::vector<double> get_double_list(const Map& m, const std::string& key);

// Standalone value parsers (used by the getters and by CSV code).
std::uint64_t parse_u64(const std::string& text, const std::string& what);
double parse_double(const std::string& text, const std::string& what);

}  // namespace blcn::kv
