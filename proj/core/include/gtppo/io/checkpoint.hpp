#pragma once

#include <string>

#include "gtppo/io/config.hpp"
#include "gtppo/netcore/parameter_store.hpp"

namespace gtppo::io {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  int format_version = kCheckpointFormatVersion;
  std::uint64_t config_hash = 0;
  int update = 0;
  RunConfig config;
  netcore::ParameterStore params;
};

// Writes <stem>.json (manifest) and <stem>.bin (little-endian f32 blob).
// Returns the manifest path.
std::string save_checkpoint(const std::string& stem, const RunConfig& cfg, int update, const netcore::ParameterStore& params);

// Reads a manifest and its blob; validates offsets, sizes and the layout.
Checkpoint load_checkpoint(const std::string& manifest_path);

// Manifest summary without loading the blob contents.
Json inspect_checkpoint(const std::string& manifest_path);

}  // namespace gtppo::io
