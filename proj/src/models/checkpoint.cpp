#include "lobforge/models/checkpoint.hpp"

#include <cstring>

#include "lobforge/errors.hpp"
#include "lobforge/io/binary.hpp"
#include "lobforge/sample/sample_io.hpp"

namespace lobforge::models {

using nlohmann::json;

json arch_to_json(const ArchSpec& arch) {
  json j;
  j["kind"] = to_string(arch.kind);
  j["frames"] = arch.frames;
  j["depth"] = arch.depth;
  j["features"] = arch.features;
  j["input_channels"] = arch.input_channels;
  j["output_dim"] = arch.output_dim;
  j["conv_channels"] = arch.conv_channels;
  j["dense_hidden"] = arch.dense_hidden;
  j["lstm_hidden"] = arch.lstm_hidden;
  j["embed_width"] = arch.embed_width;
  return j;
}

ArchSpec arch_from_json(const json& j) {
  ArchSpec arch;
  arch.kind = arch_kind_from_string(j.at("kind").get<std::string>());
  arch.frames = j.at("frames").get<std::int64_t>();
  arch.depth = j.at("depth").get<std::int64_t>();
  arch.features = j.at("features").get<std::int64_t>();
  arch.input_channels = j.at("input_channels").get<std::int64_t>();
  arch.output_dim = j.at("output_dim").get<std::int64_t>();
  arch.conv_channels = j.at("conv_channels").get<std::vector<std::int64_t>>();
  arch.dense_hidden = j.at("dense_hidden").get<std::int64_t>();
  arch.lstm_hidden = j.at("lstm_hidden").get<std::int64_t>();
  arch.embed_width = j.at("embed_width").get<std::int64_t>();
  return arch;
}

void save_checkpoint(Model& model, const CheckpointMeta& meta,
                     const std::string& path) {
  json j;
  j["arch"] = arch_to_json(meta.arch);
  j["scaler"] = sampling::scaler_to_json(meta.scaler);
  j["target_kind"] = sampling::to_string(meta.target_kind);
  j["embed"] = meta.embed_meta;
  j["history"] = meta.history.epoch_loss;
  j["seed"] = meta.seed;
  if (!meta.config.is_null() && !meta.config.empty()) j["config"] = meta.config;

  const auto params = model.params();
  io::BinaryWriter w(path);
  w.write_bytes(kCheckpointMagic, 4);
  w.write_u16(kCheckpointVersion);
  w.write_string(j.dump());
  w.write_u32(static_cast<std::uint32_t>(params.size()));
  for (const auto* p : params) {
    w.write_string(p->name);
    w.write_u8(static_cast<std::uint8_t>(p->value.ndim()));
    for (auto d : p->value.shape) w.write_i64(d);
    w.write_f32_array(p->value.ptr(), p->value.data.size());
  }
  w.write_crc_trailer();
  w.close();
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  io::BinaryReader r(path);
  char magic[4];
  r.read_bytes(magic, 4);
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw VersionMismatch(path + " is not a model checkpoint");
  const std::uint16_t version = r.read_u16();
  if (version != kCheckpointVersion)
    throw VersionMismatch("unsupported checkpoint version " +
                          std::to_string(version));

  json j;
  try {
    j = json::parse(r.read_string());
  } catch (const json::exception& e) {
    throw CorruptChecksum(std::string("bad checkpoint metadata: ") + e.what());
  }

  LoadedCheckpoint out;
  out.meta.arch = arch_from_json(j.at("arch"));
  out.meta.scaler = sampling::scaler_from_json(j.at("scaler"));
  out.meta.target_kind =
      sampling::target_kind_from_string(j.at("target_kind").get<std::string>());
  out.meta.embed_meta = j.value("embed", json{});
  out.meta.history.epoch_loss = j.at("history").get<std::vector<double>>();
  out.meta.seed = j.at("seed").get<std::uint64_t>();
  out.meta.config = j.value("config", json{});

  out.model = build_model<float>(out.meta.arch, out.meta.seed);
  auto params = out.model->params();
  const std::uint32_t count = r.read_u32();
  if (count != params.size())
    throw VersionMismatch("checkpoint holds " + std::to_string(count) +
                          " tensors, architecture expects " +
                          std::to_string(params.size()));
  for (auto* p : params) {
    const std::string name = r.read_string();
    if (name != p->name)
      throw VersionMismatch("tensor order mismatch: got '" + name +
                            "', expected '" + p->name + "'");
    const std::uint8_t ndim = r.read_u8();
    std::vector<std::int64_t> shape(ndim);
    for (auto& d : shape) d = r.read_i64();
    if (shape != p->value.shape)
      throw ShapeMismatch("tensor '" + name + "' shape mismatch");
    r.read_f32_array(p->value.ptr(), p->value.data.size());
  }
  r.verify_crc_trailer();
  return out;
}

}  // namespace lobforge::models
