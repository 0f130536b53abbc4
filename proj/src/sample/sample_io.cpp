#include "lobforge/sample/sample_io.hpp"

#include <cstring>

#include "lobforge/errors.hpp"
#include "lobforge/io/binary.hpp"

namespace lobforge::sampling {

using nlohmann::json;

json embed_config_to_json(const embed::EmbedConfig& cfg) {
  json j;
  j["volume_scaling"] = embed::to_string(cfg.volume_scaling);
  j["feature_set"] = static_cast<int>(cfg.feature_set);
  j["quantize_255"] = cfg.quantize_255;
  j["column_layout_version"] = embed::kColumnLayoutVersion;
  if (cfg.global_stats) {
    j["global_stats"] = {{"min", cfg.global_stats->min_q},
                         {"max", cfg.global_stats->max_q},
                         {"mean", cfg.global_stats->mean_q},
                         {"std", cfg.global_stats->std_q}};
  } else {
    j["global_stats"] = nullptr;
  }
  return j;
}

embed::EmbedConfig embed_config_from_json(const json& j) {
  embed::EmbedConfig cfg;
  cfg.volume_scaling =
      embed::volume_scaling_from_string(j.at("volume_scaling").get<std::string>());
  const int fs = j.at("feature_set").get<int>();
  if (fs != 4 && fs != 8) throw VersionMismatch("feature_set must be 4 or 8");
  cfg.feature_set = static_cast<embed::FeatureSet>(fs);
  cfg.quantize_255 = j.at("quantize_255").get<bool>();
  if (j.contains("global_stats") && !j.at("global_stats").is_null()) {
    const auto& g = j.at("global_stats");
    embed::GlobalStats st;
    st.min_q = g.at("min").get<double>();
    st.max_q = g.at("max").get<double>();
    st.mean_q = g.at("mean").get<double>();
    st.std_q = g.at("std").get<double>();
    cfg.global_stats = st;
  }
  return cfg;
}

json spec_to_json(const SampleSpec& spec) {
  json j;
  j["aggregation"] =
      spec.aggregation == Aggregation::window ? "window" : "interval";
  j["interval_ms"] = spec.interval_ms;
  j["frame_count"] = spec.frame_count;
  j["horizon_ms"] = spec.horizon_ms;
  j["target_kind"] = to_string(spec.target_kind);
  j["anchor"] = spec.anchor == Anchor::last ? "last" : "first";
  j["representation"] = to_string(spec.representation);
  j["embed"] = embed_config_to_json(spec.embed);
  j["max_train_samples"] = spec.max_train_samples;
  return j;
}

SampleSpec spec_from_json(const json& j) {
  SampleSpec spec;
  const std::string agg = j.at("aggregation").get<std::string>();
  if (agg == "window")
    spec.aggregation = Aggregation::window;
  else if (agg == "interval")
    spec.aggregation = Aggregation::interval;
  else
    throw VersionMismatch("unknown aggregation '" + agg + "'");
  spec.interval_ms = j.at("interval_ms").get<std::int64_t>();
  spec.frame_count = j.at("frame_count").get<std::int64_t>();
  spec.horizon_ms = j.at("horizon_ms").get<std::int64_t>();
  spec.target_kind = target_kind_from_string(j.at("target_kind").get<std::string>());
  const std::string anchor = j.at("anchor").get<std::string>();
  spec.anchor = anchor == "first" ? Anchor::first : Anchor::last;
  spec.representation =
      representation_from_string(j.at("representation").get<std::string>());
  spec.embed = embed_config_from_json(j.at("embed"));
  spec.max_train_samples = j.at("max_train_samples").get<std::int64_t>();
  return spec;
}

json scaler_to_json(const TargetScaler& s) {
  return json{{"mean", s.mean}, {"stdev", s.stdev}};
}

TargetScaler scaler_from_json(const json& j) {
  TargetScaler s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.stdev = j.at("stdev").get<std::vector<double>>();
  return s;
}

void save_sample_set(const SampleSet& set, const std::string& path,
                     const json& extra_meta) {
  if (set.samples.empty()) throw EmptySet("refusing to save an empty sample set");
  const std::size_t k = set.target_dim();
  const auto& shape = set.samples.front().input.shape;
  for (const auto& s : set.samples) {
    if (s.input.shape != shape) throw ShapeMismatch("inhomogeneous sample inputs");
    if (s.targets.size() != k || s.anchor_mids.size() != k)
      throw ShapeMismatch("inhomogeneous sample targets");
  }

  json meta;
  meta["spec"] = spec_to_json(set.spec);
  meta["scaler"] = scaler_to_json(set.scaler);
  meta["split"] = set.split;
  meta["symbols"] = set.symbols;
  meta["count"] = set.samples.size();
  meta["target_dim"] = k;
  meta["input_shape"] = shape;
  meta["skipped_empty_buckets"] = set.skipped_empty_buckets;
  if (!extra_meta.is_null() && !extra_meta.empty()) meta["config"] = extra_meta;
  const std::string meta_str = meta.dump();

  io::BinaryWriter w(path);
  w.write_bytes(kSampleMagic, 4);
  w.write_u16(kSampleFormatVersion);
  w.write_string(meta_str);
  w.write_u64(set.samples.size());
  for (const auto& s : set.samples) {
    w.write_f32_array(s.input.ptr(), static_cast<std::size_t>(s.input.numel()));
    for (double a : s.anchor_mids) w.write_f64(a);
    for (double t : s.targets) w.write_f64(t);
    w.write_i64(s.t_anchor_ms);
    w.write_i64(s.t_target_ms);
    w.write_u16(s.symbol_idx);
  }
  w.close();
}

SampleSet load_sample_set(const std::string& path) {
  io::BinaryReader r(path);
  char magic[4];
  r.read_bytes(magic, 4);
  if (std::memcmp(magic, kSampleMagic, 4) != 0)
    throw VersionMismatch(path + " is not a sample-set container");
  const std::uint16_t version = r.read_u16();
  if (version != kSampleFormatVersion)
    throw VersionMismatch("unsupported sample-set version " +
                          std::to_string(version));
  json meta;
  try {
    meta = json::parse(r.read_string());
  } catch (const json::exception& e) {
    throw CorruptChecksum(std::string("bad metadata blob: ") + e.what());
  }

  SampleSet set;
  set.spec = spec_from_json(meta.at("spec"));
  set.scaler = scaler_from_json(meta.at("scaler"));
  set.split = meta.at("split").get<std::string>();
  set.symbols = meta.at("symbols").get<std::vector<std::string>>();
  set.skipped_empty_buckets = meta.value("skipped_empty_buckets", std::int64_t{0});
  const auto k = meta.at("target_dim").get<std::size_t>();
  const auto shape = meta.at("input_shape").get<std::vector<std::int64_t>>();
  const auto count = r.read_u64();

  set.samples.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Sample s;
    s.input = nn::Tensor(shape);
    r.read_f32_array(s.input.ptr(), static_cast<std::size_t>(s.input.numel()));
    s.anchor_mids.resize(k);
    for (auto& a : s.anchor_mids) a = r.read_f64();
    s.targets.resize(k);
    for (auto& t : s.targets) t = r.read_f64();
    s.t_anchor_ms = r.read_i64();
    s.t_target_ms = r.read_i64();
    s.symbol_idx = r.read_u16();
    s.true_future_mids.resize(k);
    for (std::size_t d = 0; d < k; ++d)
      s.true_future_mids[d] =
          decode_prediction(s.targets[d], s.anchor_mids[d], set.spec.target_kind);
    set.samples.push_back(std::move(s));
  }
  return set;
}

}  // namespace lobforge::sampling
