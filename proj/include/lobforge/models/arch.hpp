#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lobforge/sample/sampling.hpp"

namespace lobforge::models {

enum class ArchKind : std::uint8_t {
  simple_cnn,     // stacked input, two conv blocks
  simple_cnn_2d,  // merged input, four conv blocks
  cnn2lstm,       // stacked input, conv encoder -> sequence -> LSTM
  cnn_model_2d,   // merged input, five conv blocks
  persistence,    // no-change baseline, zero parameters
};

ArchKind arch_kind_from_string(const std::string& s);
std::string to_string(ArchKind k);

struct ArchSpec {
  ArchKind kind = ArchKind::simple_cnn;
  std::int64_t frames = 30;   // L
  std::int64_t depth = 50;    // D
  std::int64_t features = 4;  // C
  // 0 derives the default: L for stacked kinds, 1 for merged kinds.
  // One-shot pairs pass 2L here.
  std::int64_t input_channels = 0;
  std::int64_t output_dim = 1;

  // Empty uses the per-kind defaults below.
  std::vector<std::int64_t> conv_channels;
  std::int64_t dense_hidden = 0;
  std::int64_t lstm_hidden = 64;
  std::int64_t embed_width = 64;  // per-step width of the LSTM input sequence

  sampling::Representation representation() const;
  std::int64_t resolved_input_channels() const;
  std::vector<std::int64_t> resolved_conv_channels() const;
  std::int64_t resolved_dense_hidden() const;
  // Length of the CNN2LSTM encoder vector: channels * pooled depth, which
  // is 26 * max(16, 2L) at the reference depth of 50.
  std::int64_t encoder_length() const;
  std::int64_t encoder_channels() const { return std::max<std::int64_t>(16, 2 * frames); }

  void validate() const;
  bool operator==(const ArchSpec&) const = default;
};

}  // namespace lobforge::models
