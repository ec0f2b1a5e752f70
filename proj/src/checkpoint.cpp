#include "blcn/checkpoint.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace blcn {

namespace {

constexpr char kMagic[4] = {'B', 'L', 'C', 'N'};
constexpr std::uint16_t kVersion = 1;

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i) & 0xff));
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i) & 0xff));
}

void append_f64(std::vector<std::uint8_t>& out, double v) {
    append_u64(out, std::bit_cast<std::uint64_t>(v));
}

// Bounds-checked little-endian reader over the loaded file.
class Reader {
public:
    Reader(const std::vector<std::uint8_t>& bytes, std::size_t limit) : bytes_(bytes), limit_(limit) {}

    std::size_t offset() const { return off_; }
    std::size_t remaining() const { return limit_ - off_; }

    void need(std::size_t n, const char* what) {
        if (limit_ - off_ < n)
            throw CheckpointError(std::string("truncated checkpoint: reading ") + what +
                                  " at offset " + std::to_string(off_));
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = static_cast<std::uint16_t>(bytes_[off_] | bytes_[off_ + 1] << 8);
        off_ += 2;
        return v;
    }
    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[off_ + i]) << (8 * i);
        off_ += 8;
        return v;
    }
    double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
    std::string str(std::size_t n, const char* what) {
        need(n, what);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + off_), n);
        off_ += n;
        return s;
    }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t limit_;
    std::size_t off_ = 0;
};

}  // namespace

kv::Map model_config_to_kv(const ModelConfig& config) {
    kv::Map m;
    m["time_steps"] = std::to_string(config.time_steps);
    m["input_features"] = std::to_string(config.input_features);
    m["bilstm_hidden"] = kv::join_sizes(config.bilstm_hidden);
    m["conv_kernels"] = std::to_string(config.conv_kernels);
    m["conv_kernel_size"] = std::to_string(config.conv_kernel_size);
    m["pool_size"] = std::to_string(config.pool_size);
    m["pool_stride"] = std::to_string(config.pool_stride);
    m["dense_sizes"] = kv::join_sizes(config.dense_sizes);
    m["num_classes"] = std::to_string(config.num_classes);
    m["seed"] = std::to_string(config.seed);
    m["bn_momentum"] = kv::format_double(config.bn_momentum);
    m["bn_epsilon"] = kv::format_double(config.bn_epsilon);
    m["fused_softmax"] = config.fused_softmax ? "1" : "0";
    return m;
}

ModelConfig model_config_from_kv(const kv::Map& m) {
    ModelConfig c;
    c.time_steps = kv::get_u64(m, "time_steps");
    c.input_features = kv::get_u64(m, "input_features");
    c.bilstm_hidden = kv::get_size_list(m, "bilstm_hidden");
    c.conv_kernels = kv::get_u64(m, "conv_kernels");
    c.conv_kernel_size = kv::get_u64(m, "conv_kernel_size");
    c.pool_size = kv::get_u64(m, "pool_size");
    c.pool_stride = kv::get_u64(m, "pool_stride");
    c.dense_sizes = kv::get_size_list(m, "dense_sizes");
    c.num_classes = kv::get_u64(m, "num_classes");
    c.seed = kv::get_u64(m, "seed");
    c.bn_momentum = kv::get_double(m, "bn_momentum");
    c.bn_epsilon = kv::get_double(m, "bn_epsilon");
    c.fused_softmax = kv::get_bool(m, "fused_softmax");
    return c;
}

namespace {

kv::Map stats_to_kv(const NormStats& stats) {
    kv::Map m;
    m["schema_version"] = std::to_string(stats.schema_version);
    m["norm_mean"] = kv::join_doubles(std::vector<double>(stats.mean.begin(), stats.mean.end()));
    m["norm_std"] = kv::join_doubles(std::vector<double>(stats.stddev.begin(), stats.stddev.end()));
    return m;
}

NormStats stats_from_kv(const kv::Map& m) {
    NormStats s;
    s.schema_version = static_cast<std::uint32_t>(kv::get_u64(m, "schema_version"));
    const auto mean = kv::get_double_list(m, "norm_mean");
    const auto sd = kv::get_double_list(m, "norm_std");
    if (mean.size() != kZScored || sd.size() != kZScored)
        throw CheckpointError("normalization stats length " + std::to_string(mean.size()) + "/" +
                              std::to_string(sd.size()) + ", expected " + std::to_string(kZScored));
    std::copy(mean.begin(), mean.end(), s.mean.begin());
    std::copy(sd.begin(), sd.end(), s.stddev.begin());
    return s;
}

}  // namespace

void save_checkpoint(const Model& model, const NormStats& stats, const std::string& path) {
    kv::Map config = model_config_to_kv(model.config());
    config.merge(stats_to_kv(stats));
    const std::string config_text = kv::serialize(config);

    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    append_u16(out, kVersion);
    append_u64(out, config_text.size());
    out.insert(out.end(), config_text.begin(), config_text.end());

    for (const ParamStore::Entry& e : model.params().entries()) {
        append_u64(out, e.name.size());
        out.insert(out.end(), e.name.begin(), e.name.end());
        append_u64(out, e.value->rank());
        for (std::size_t d : e.value->shape()) append_u64(out, d);
        for (std::size_t i = 0; i < e.value->size(); ++i) append_f64(out, (*e.value)[i]);
    }

    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size())));
    append_u32(out, crc);

    std::ofstream file(path, std::ios::binary);
    if (!file) throw CheckpointError("cannot open '" + path + "' for writing");
    file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!file) throw CheckpointError("write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw CheckpointError("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)),
                                    std::istreambuf_iterator<char>());

    if (bytes.size() < 4 + 2 + 8 + 4) throw CheckpointError("file too small to be a checkpoint");

    // checksum first: no partial model from a damaged file
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i)
        stored |= static_cast<std::uint32_t>(bytes[bytes.size() - 4 + i]) << (8 * i);
    const auto computed = static_cast<std::uint32_t>(crc32(
        0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size() - 4)));
    if (stored != computed)
        throw CheckpointError("checksum mismatch: file is corrupt or truncated");

    Reader r(bytes, bytes.size() - 4);
    if (r.str(4, "magic") != std::string(kMagic, 4))
        throw CheckpointError("bad magic: not a checkpoint file");
    const std::uint16_t version = r.u16("version");
    if (version != kVersion)
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version) +
                              " (expected " + std::to_string(kVersion) + ")");

    const std::uint64_t config_len = r.u64("config length");
    kv::Map config_map;
    try {
        config_map = kv::parse(r.str(config_len, "config section"));
    } catch (const kv::KvError& e) {
        throw CheckpointError(std::string("bad config section: ") + e.what());
    }

    Checkpoint cp;
    try {
        cp.model = build_model(model_config_from_kv(config_map));
    } catch (const std::exception& e) {
        throw CheckpointError(std::string("config does not build: ") + e.what());
    }
    cp.stats = stats_from_kv(config_map);

    for (const ParamStore::Entry& e : cp.model.params().entries()) {
        const std::uint64_t name_len = r.u64("parameter name length");
        const std::string name = r.str(name_len, "parameter name");
        if (name != e.name)
            throw CheckpointError("parameter order mismatch: file has '" + name + "', model expects '" +
                                  e.name + "'");
        const std::uint64_t rank = r.u64("parameter rank");
        std::vector<std::size_t> dims(rank);
        for (std::uint64_t i = 0; i < rank; ++i) dims[i] = r.u64("parameter dim");
        if (dims != e.value->shape())
            throw CheckpointError("shape mismatch for '" + name + "': file " + shape_to_string(dims) +
                                  " vs model " + shape_to_string(e.value->shape()));
        for (std::size_t i = 0; i < e.value->size(); ++i) (*e.value)[i] = r.f64("parameter data");
    }
    if (r.remaining() != 0)
        throw CheckpointError(std::to_string(r.remaining()) + " unexpected trailing bytes");
    return cp;
}

}  // namespace blcn
