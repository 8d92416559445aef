#include "gtppo/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "gtppo/gtrxl/model.hpp"

namespace gtppo::io {

namespace fs = std::filesystem;

namespace {

void append_le(std::string& out, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

float read_le(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return std::bit_cast<float>(bits);
}

std::string parent_dir(const std::string& path) {
  const auto p = fs::path(path).parent_path();
  return p.empty() ? std::string(".") : p.string();
}

}  // namespace

std::string save_checkpoint(const std::string& stem, const RunConfig& cfg, int update, const netcore::ParameterStore& params) {
  const std::string manifest_path = stem + ".json";
  const std::string blob_path = stem + ".bin";
  std::string blob;
  Json records = Json::array();
  for (const auto& [name, shape] : gtrxl::parameter_layout(cfg.model)) {
    const auto& t = params.value(name);
    if (t.shape() != shape) throw RuntimeFailure("parameter '" + name + "' has shape " + t.shape_string());
    const std::size_t offset = blob.size();
    for (float v : t.values()) append_le(blob, v);
    records.push_back(Json{{"name", name},
                           {"shape", shape},
                           {"dtype", "f32"},
                           {"offset", offset},
                           {"length", blob.size() - offset}});
  }
  Json manifest{{"format_version", kCheckpointFormatVersion},
                {"config_hash", hash_hex(config_hash(cfg))},
                {"update", update},
                {"blob", fs::path(blob_path).filename().string()},
                {"parameters", records},
                {"config", to_json(cfg)}};
  write_text_file(blob_path, blob);
  write_text_file(manifest_path, manifest.dump(2) + "\n");
  return manifest_path;
}

Json inspect_checkpoint(const std::string& manifest_path) {
  const Json m = read_json_file(manifest_path);
  for (const char* key : {"format_version", "config_hash", "update", "blob", "parameters", "config"}) {
    if (!m.contains(key)) throw ConfigError("checkpoint manifest '" + manifest_path + "' lacks '" + key + "'");
  }
  if (m["format_version"].get<int>() != kCheckpointFormatVersion) {
    throw ConfigError("unsupported checkpoint format version " + m["format_version"].dump());
  }
  std::size_t count = 0, bytes = 0;
  for (const auto& p : m["parameters"]) {
    std::size_t n = 1;
    for (int d : p["shape"]) n *= static_cast<std::size_t>(d);
    count += n;
    bytes += p["length"].get<std::size_t>();
  }
  return Json{{"path", manifest_path},
              {"format_version", m["format_version"]},
              {"config_hash", m["config_hash"]},
              {"update", m["update"]},
              {"env", m["config"]["env"]},
              {"n_parameters", m["parameters"].size()},
              {"n_values", count},
              {"blob_bytes", bytes},
              {"model", m["config"]["model"]}};
}

Checkpoint load_checkpoint(const std::string& manifest_path) {
  const Json m = read_json_file(manifest_path);
  inspect_checkpoint(manifest_path);
  Checkpoint ck;
  ck.format_version = m["format_version"].get<int>();
  ck.update = m["update"].get<int>();
  ck.config = parse_run_config(m["config"]);
  ck.config_hash = config_hash(ck.config);
  if (hash_hex(ck.config_hash) != m["config_hash"].get<std::string>()) {
    throw ConfigError("checkpoint config hash " + m["config_hash"].get<std::string>() +
                      " does not match its embedded configuration (" + hash_hex(ck.config_hash) + ")");
  }

  const std::string blob_path = parent_dir(manifest_path) + "/" + m["blob"].get<std::string>();
  std::ifstream in(blob_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint blob '" + blob_path + "'");
  std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const auto layout = gtrxl::parameter_layout(ck.config.model);
  const auto& records = m["parameters"];
  if (records.size() != layout.size()) {
    throw ConfigError("checkpoint lists " + std::to_string(records.size()) + " parameters, the model has " +
                      std::to_string(layout.size()));
  }
  std::size_t expected_offset = 0;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto& rec = records[k];
    const auto& [name, shape] = layout[k];
    if (rec["name"].get<std::string>() != name) {
      throw ConfigError("checkpoint parameter " + std::to_string(k) + " is '" + rec["name"].get<std::string>() +
                        "', expected '" + name + "'");
    }
    if (rec["shape"].get<std::vector<int>>() != shape) throw ConfigError("checkpoint parameter '" + name + "' has the wrong shape");
    if (rec["dtype"].get<std::string>() != "f32") throw ConfigError("checkpoint parameter '" + name + "' is not f32");
    const auto offset = rec["offset"].get<std::size_t>();
    const auto length = rec["length"].get<std::size_t>();
    const std::size_t n = netcore::Tensor::count(shape);
    if (offset != expected_offset || length != 4 * n) {
      throw ConfigError("checkpoint parameter '" + name + "' has a non-contiguous or mis-sized byte range");
    }
    if (offset + length > blob.size()) throw ConfigError("checkpoint blob is truncated at '" + name + "'");
    netcore::Tensor t(shape);
    const auto* p = reinterpret_cast<const unsigned char*>(blob.data()) + offset;
    for (std::size_t i = 0; i < n; ++i) t[i] = read_le(p + 4 * i);
    ck.params.add(name, std::move(t));
    expected_offset += length;
  }
  if (expected_offset != blob.size()) throw ConfigError("checkpoint blob has trailing bytes");
  return ck;
}

}  // namespace gtppo::io
