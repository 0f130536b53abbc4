#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "lobforge/sample/sampling.hpp"

namespace lobforge::sampling {

inline constexpr char kSampleMagic[4] = {'L', 'O', 'B', 'S'};
inline constexpr std::uint16_t kSampleFormatVersion = 1;

nlohmann::json embed_config_to_json(const embed::EmbedConfig& cfg);
embed::EmbedConfig embed_config_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const SampleSpec& spec);
SampleSpec spec_from_json(const nlohmann::json& j);
nlohmann::json scaler_to_json(const TargetScaler& s);
TargetScaler scaler_from_json(const nlohmann::json& j);

// Binary container: magic "LOBS", u16 version, JSON metadata blob, then
// per-sample records (f32 tensor row-major, f64 anchor mid(s), f64
// target(s), i64 timestamps, u16 symbol index). extra_meta, when given,
// is embedded under "config" for provenance.
void save_sample_set(const SampleSet& set, const std::string& path,
                     const nlohmann::json& extra_meta = {});
SampleSet load_sample_set(const std::string& path);

}  // namespace lobforge::sampling
