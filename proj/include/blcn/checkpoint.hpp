#pragma once

#include <stdexcept>
#include <string>

#include "blcn/features.hpp"
#include "blcn/kv.hpp"
#include "blcn/model.hpp"

namespace blcn {

class CheckpointError : public std::runtime_error {
public:
    explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

struct Checkpoint {
    Model model;
    NormStats stats;
};

// File layout (all integers little-endian):
//   "BLCN" | u16 version | u64 config length | config (canonical key=value,
//   holds ModelConfig plus the fitted normalization stats) | per ParamStore
//   entry: u64 name length, name, u64 rank, u64 dims..., raw f64 data |
//   u32 CRC-32 over all preceding bytes.
// Round-trip is bit-exact: doubles in the config section use %.17g.
void save_checkpoint(const Model& model, const NormStats& stats, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Config-section codecs, shared with the CLI's config handling.
kv::Map model_config_to_kv(const ModelConfig& config);
ModelConfig model_config_from_kv(const kv::Map& map);

}  // namespace blcn
