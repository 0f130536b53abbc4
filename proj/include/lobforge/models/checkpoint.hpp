#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "lobforge/models/model.hpp"
#include "lobforge/models/train.hpp"

namespace lobforge::models {

inline constexpr char kCheckpointMagic[4] = {'L', 'O', 'B', 'M'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

nlohmann::json arch_to_json(const ArchSpec& arch);
ArchSpec arch_from_json(const nlohmann::json& j);

struct CheckpointMeta {
  ArchSpec arch;
  sampling::TargetScaler scaler;
  sampling::TargetKind target_kind = sampling::TargetKind::delta;
  nlohmann::json embed_meta;  // embedding config the model was trained on
  TrainHistory history;
  std::uint64_t seed = 0;
  nlohmann::json config;  // resolved run config echo
};

// Container: magic "LOBM", u16 version, JSON meta blob, named f32 tensors
// with shapes, trailing CRC-32. Round-trips to bit-identical predictions.
void save_checkpoint(Model& model, const CheckpointMeta& meta,
                     const std::string& path);

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  CheckpointMeta meta;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace lobforge::models
