#include "lobforge/models/arch.hpp"

#include "lobforge/errors.hpp"

namespace lobforge::models {

ArchKind arch_kind_from_string(const std::string& s) {
  if (s == "SimpleCNN" || s == "simple_cnn") return ArchKind::simple_cnn;
  if (s == "SimpleCNN_2D" || s == "simple_cnn_2d") return ArchKind::simple_cnn_2d;
  if (s == "CNN2LSTM" || s == "cnn2lstm") return ArchKind::cnn2lstm;
  if (s == "CNNModel_2D" || s == "cnn_model_2d") return ArchKind::cnn_model_2d;
  if (s == "Persistence" || s == "persistence") return ArchKind::persistence;
  throw ConfigError("unknown architecture '" + s + "'");
}

std::string to_string(ArchKind k) {
  switch (k) {
    case ArchKind::simple_cnn: return "SimpleCNN";
    case ArchKind::simple_cnn_2d: return "SimpleCNN_2D";
    case ArchKind::cnn2lstm: return "CNN2LSTM";
    case ArchKind::cnn_model_2d: return "CNNModel_2D";
    case ArchKind::persistence: return "Persistence";
  }
  return "?";
}

sampling::Representation ArchSpec::representation() const {
  switch (kind) {
    case ArchKind::simple_cnn:
    case ArchKind::cnn2lstm:
      return sampling::Representation::stacked;
    case ArchKind::simple_cnn_2d:
    case ArchKind::cnn_model_2d:
      return sampling::Representation::merged;
    case ArchKind::persistence:
      return sampling::Representation::stacked;  // accepts either at predict
  }
  return sampling::Representation::stacked;
}

std::int64_t ArchSpec::resolved_input_channels() const {
  if (input_channels > 0) return input_channels;
  return representation() == sampling::Representation::stacked ? frames : 1;
}

std::vector<std::int64_t> ArchSpec::resolved_conv_channels() const {
  if (!conv_channels.empty()) return conv_channels;
  switch (kind) {
    case ArchKind::simple_cnn: return {32, 64};
    case ArchKind::simple_cnn_2d: return {16, 32, 64, 64};
    case ArchKind::cnn_model_2d: return {16, 32, 64, 64, 128};
    default: return {};
  }
}

std::int64_t ArchSpec::resolved_dense_hidden() const {
  if (dense_hidden > 0) return dense_hidden;
  return kind == ArchKind::cnn_model_2d ? 256 : 128;
}

std::int64_t ArchSpec::encoder_length() const {
  // conv (3 x C) with pad (2, 0) maps D x C -> (D+2) x 1, then maxpool (2,1)
  // leaves floor(D/2)+1 rows.
  const std::int64_t pooled = (depth + 2 - 2) / 2 + 1;
  return encoder_channels() * pooled;
}

void ArchSpec::validate() const {
  if (frames < 1 || depth < 1) throw InvalidArch("L and D must be >= 1");
  if (features != 4 && features != 8) throw InvalidArch("C must be 4 or 8");
  if (output_dim != 1 && output_dim != 2)
    throw InvalidArch("output_dim must be 1 or 2");
  if (kind == ArchKind::cnn2lstm) {
    if (lstm_hidden < 1 || embed_width < 1)
      throw InvalidArch("cnn2lstm needs positive hidden and embed widths");
    if (depth == 50 && encoder_length() != 26 * encoder_channels())
      throw InvalidArch("encoder length violates the 26*max(16,2L) contract");
  }
}

}  // namespace lobforge::models
