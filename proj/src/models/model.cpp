#include "lobforge/models/model.hpp"

#include "lobforge/errors.hpp"

namespace lobforge::models {

namespace {

using nn::Conv2dT;
using nn::DenseT;
using nn::FlattenT;
using nn::LstmT;
using nn::MaxPool2dT;
using nn::ReluT;
using nn::StackT;

// Shared skeleton of the three pure-CNN architectures: N conv blocks
// (conv 3x3 pad 1 -> relu -> maxpool) followed by dense -> relu -> dense.
// Pool windows clamp to the remaining extent so small frames stay legal.
template <typename T>
class CnnModel final : public ModelT<T> {
 public:
  CnnModel(ArchSpec arch, std::uint64_t seed) : ModelT<T>(std::move(arch)) {
    const ArchSpec& a = this->arch_;
    a.validate();
    Xoshiro256ss rng(seed);

    std::int64_t ch = a.resolved_input_channels();
    std::int64_t h = a.depth;
    std::int64_t w = a.representation() == sampling::Representation::merged
                         ? a.features * a.frames
                         : a.features;
    int block = 0;
    for (std::int64_t out_ch : a.resolved_conv_channels()) {
      const std::string name = "conv" + std::to_string(++block);
      stack_.add(std::make_unique<Conv2dT<T>>(name, ch, out_ch, 3, 3, 1, 1, 1, rng));
      stack_.add(std::make_unique<ReluT<T>>());
      const std::int64_t ph = std::min<std::int64_t>(2, h);
      const std::int64_t pw = std::min<std::int64_t>(2, w);
      stack_.add(std::make_unique<MaxPool2dT<T>>(ph, pw, ph, pw));
      ch = out_ch;
      h = (h - ph) / ph + 1;
      w = (w - pw) / pw + 1;
      if (h < 1 || w < 1) throw InvalidArch("conv stack exhausted the frame");
    }
    stack_.add(std::make_unique<FlattenT<T>>());
    const std::int64_t flat = ch * h * w;
    stack_.add(std::make_unique<DenseT<T>>("fc1", flat, a.resolved_dense_hidden(), rng));
    stack_.add(std::make_unique<ReluT<T>>());
    stack_.add(std::make_unique<DenseT<T>>("head", a.resolved_dense_hidden(),
                                           a.output_dim, rng));
  }

  nn::TensorT<T> forward(const nn::TensorT<T>& input) override {
    this->check_input(input);
    return stack_.forward(input);
  }
  void backward(const nn::TensorT<T>& dpred) override { stack_.backward(dpred); }
  void collect_params(std::vector<nn::ParamT<T>*>& out) override {
    stack_.collect_params(out);
  }

 private:
  StackT<T> stack_;
};

// Conv encoder flattens the stacked window into a vector of length
// channels * (floor(D/2)+1) — 26 * max(16, 2L) at D=50 — which a learned
// projection expands into an L-step sequence for the LSTM.
template <typename T>
class Cnn2LstmModel final : public ModelT<T> {
 public:
  Cnn2LstmModel(ArchSpec arch, std::uint64_t seed) : ModelT<T>(std::move(arch)) {
    const ArchSpec& a = this->arch_;
    a.validate();
    Xoshiro256ss rng(seed);

    encoder_.add(std::make_unique<Conv2dT<T>>(
        "enc", a.resolved_input_channels(), a.encoder_channels(), 3,
        a.features, 1, 2, 0, rng));
    encoder_.add(std::make_unique<ReluT<T>>());
    encoder_.add(std::make_unique<MaxPool2dT<T>>(2, 1, 2, 1));
    encoder_.add(std::make_unique<FlattenT<T>>());

    seq_len_ = a.frames;
    step_width_ = a.embed_width;
    seq_proj_ = std::make_unique<DenseT<T>>("seq_proj", a.encoder_length(),
                                            seq_len_ * step_width_, rng);
    lstm_ = std::make_unique<LstmT<T>>("lstm", step_width_, a.lstm_hidden, rng);
    head_ = std::make_unique<DenseT<T>>("head", a.lstm_hidden, a.output_dim, rng);
  }

  nn::TensorT<T> forward(const nn::TensorT<T>& input) override {
    this->check_input(input);
    const std::int64_t n = input.shape[0];
    nn::TensorT<T> enc = encoder_.forward(input);
    nn::TensorT<T> seq =
        seq_proj_->forward(enc).reshaped({n, seq_len_, step_width_});
    nn::TensorT<T> last_h = lstm_->forward(seq);
    return head_->forward(last_h);
  }

  void backward(const nn::TensorT<T>& dpred) override {
    nn::TensorT<T> d = head_->backward(dpred);
    d = lstm_->backward(d);
    const std::int64_t n = d.shape[0];
    d = seq_proj_->backward(d.reshaped({n, seq_len_ * step_width_}));
    encoder_.backward(d);
  }

  void collect_params(std::vector<nn::ParamT<T>*>& out) override {
    encoder_.collect_params(out);
    seq_proj_->collect_params(out);
    lstm_->collect_params(out);
    head_->collect_params(out);
  }

 private:
  StackT<T> encoder_;
  std::unique_ptr<DenseT<T>> seq_proj_;
  std::unique_ptr<LstmT<T>> lstm_;
  std::unique_ptr<DenseT<T>> head_;
  std::int64_t seq_len_ = 0, step_width_ = 0;
};

// No-change baseline: always predicts zero in target space.
template <typename T>
class PersistenceModel final : public ModelT<T> {
 public:
  explicit PersistenceModel(ArchSpec arch) : ModelT<T>(std::move(arch)) {}

  nn::TensorT<T> forward(const nn::TensorT<T>& input) override {
    this->check_input(input);
    return nn::TensorT<T>({input.shape[0], this->arch_.output_dim});
  }
  void backward(const nn::TensorT<T>&) override {}
};

}  // namespace

template <typename T>
std::unique_ptr<ModelT<T>> build_model(const ArchSpec& arch, std::uint64_t seed) {
  arch.validate();
  switch (arch.kind) {
    case ArchKind::simple_cnn:
    case ArchKind::simple_cnn_2d:
    case ArchKind::cnn_model_2d:
      return std::make_unique<CnnModel<T>>(arch, seed);
    case ArchKind::cnn2lstm:
      return std::make_unique<Cnn2LstmModel<T>>(arch, seed);
    case ArchKind::persistence:
      return std::make_unique<PersistenceModel<T>>(arch);
  }
  throw InvalidArch("unknown architecture kind");
}

template std::unique_ptr<ModelT<float>> build_model<float>(const ArchSpec&, std::uint64_t);
template std::unique_ptr<ModelT<double>> build_model<double>(const ArchSpec&, std::uint64_t);

}  // namespace lobforge::models
