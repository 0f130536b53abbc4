#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "lobforge/nn/param.hpp"
#include "lobforge/nn/tensor.hpp"
#include "lobforge/simd/kernels.hpp"

namespace lobforge::nn {

template <typename T>
struct LayerT {
  virtual ~LayerT() = default;
  virtual TensorT<T> forward(const TensorT<T>& x) = 0;
  virtual TensorT<T> backward(const TensorT<T>& grad_out) = 0;
  virtual void collect_params(std::vector<ParamT<T>*>& out) {}
};

// ---------------------------------------------------------------------------
// Conv2d: cross-correlation over NCHW via im2col, so the inner loops are
// contiguous dot/axpy kernel calls.
// ---------------------------------------------------------------------------
template <typename T>
class Conv2dT final : public LayerT<T> {
 public:
  Conv2dT(std::string name, std::int64_t in_ch, std::int64_t out_ch,
          std::int64_t kh, std::int64_t kw, std::int64_t stride,
          std::int64_t pad_h, std::int64_t pad_w, Xoshiro256ss& rng)
      : in_ch_(in_ch), out_ch_(out_ch), kh_(kh), kw_(kw), stride_(stride),
        pad_h_(pad_h), pad_w_(pad_w) {
    const std::int64_t fan_in = in_ch * kh * kw;
    weight_ = ParamT<T>(name + ".weight",
                        seeded_init<T>({out_ch, in_ch, kh, kw}, fan_in, rng));
    bias_ = ParamT<T>(name + ".bias", seeded_init<T>({out_ch}, fan_in, rng));
  }

  static std::int64_t out_dim(std::int64_t in, std::int64_t k, std::int64_t pad,
                              std::int64_t stride) {
    return (in + 2 * pad - k) / stride + 1;
  }

  TensorT<T> forward(const TensorT<T>& x) override {
    if (x.ndim() != 4 || x.shape[1] != in_ch_)
      throw ShapeMismatch("conv2d input must be NCHW with " +
                          std::to_string(in_ch_) + " channels, got " +
                          shape_string(x.shape));
    n_ = x.shape[0];
    h_ = x.shape[2];
    w_ = x.shape[3];
    oh_ = out_dim(h_, kh_, pad_h_, stride_);
    ow_ = out_dim(w_, kw_, pad_w_, stride_);
    if (oh_ < 1 || ow_ < 1) throw ShapeMismatch("conv2d output would be empty");

    const std::int64_t patch = in_ch_ * kh_ * kw_;
    const std::int64_t positions = oh_ * ow_;
    col_ = TensorT<T>({n_, positions, patch});
    for (std::int64_t n = 0; n < n_; ++n) im2col(x, n);

    TensorT<T> out({n_, out_ch_, oh_, ow_});
    const T* wp = weight_.value.ptr();
    for (std::int64_t n = 0; n < n_; ++n) {
      const T* colp = col_.ptr() + n * positions * patch;
      T* outp = out.ptr() + n * out_ch_ * positions;
      for (std::int64_t co = 0; co < out_ch_; ++co) {
        const T* wrow = wp + co * patch;
        const double b = static_cast<double>(bias_.value[static_cast<std::size_t>(co)]);
        for (std::int64_t p = 0; p < positions; ++p)
          outp[co * positions + p] = static_cast<T>(
              simd::dot(wrow, colp + p * patch, static_cast<std::size_t>(patch)) + b);
      }
    }
    return out;
  }

  TensorT<T> backward(const TensorT<T>& dy) override {
    require_shape(dy, {n_, out_ch_, oh_, ow_}, "conv2d grad");
    const std::int64_t patch = in_ch_ * kh_ * kw_;
    const std::int64_t positions = oh_ * ow_;

    TensorT<T> dcol({n_, positions, patch});
    const T* wp = weight_.value.ptr();
    T* dwp = weight_.grad.ptr();
    for (std::int64_t n = 0; n < n_; ++n) {
      const T* colp = col_.ptr() + n * positions * patch;
      T* dcolp = dcol.ptr() + n * positions * patch;
      const T* dyp = dy.ptr() + n * out_ch_ * positions;
      for (std::int64_t co = 0; co < out_ch_; ++co) {
        const T* wrow = wp + co * patch;
        T* dwrow = dwp + co * patch;
        double db = 0.0;
        for (std::int64_t p = 0; p < positions; ++p) {
          const T g = dyp[co * positions + p];
          if (g == T{0}) continue;
          simd::axpy(g, colp + p * patch, dwrow, static_cast<std::size_t>(patch));
          simd::axpy(g, wrow, dcolp + p * patch, static_cast<std::size_t>(patch));
          db += static_cast<double>(g);
        }
        bias_.grad[static_cast<std::size_t>(co)] += static_cast<T>(db);
      }
    }

    TensorT<T> dx({n_, in_ch_, h_, w_});
    for (std::int64_t n = 0; n < n_; ++n) col2im(dcol, dx, n);
    return dx;
  }

  void collect_params(std::vector<ParamT<T>*>& out) override {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }

  std::int64_t out_channels() const { return out_ch_; }

 private:
  void im2col(const TensorT<T>& x, std::int64_t n) {
    const std::int64_t patch = in_ch_ * kh_ * kw_;
    T* colp = col_.ptr() + n * oh_ * ow_ * patch;
    for (std::int64_t oy = 0; oy < oh_; ++oy) {
      for (std::int64_t ox = 0; ox < ow_; ++ox) {
        T* dst = colp + (oy * ow_ + ox) * patch;
        for (std::int64_t ci = 0; ci < in_ch_; ++ci) {
          for (std::int64_t ky = 0; ky < kh_; ++ky) {
            const std::int64_t iy = oy * stride_ - pad_h_ + ky;
            for (std::int64_t kx = 0; kx < kw_; ++kx) {
              const std::int64_t ix = ox * stride_ - pad_w_ + kx;
              *dst++ = (iy >= 0 && iy < h_ && ix >= 0 && ix < w_)
                           ? x.at4(n, ci, iy, ix)
                           : T{0};
            }
          }
        }
      }
    }
  }

  void col2im(const TensorT<T>& dcol, TensorT<T>& dx, std::int64_t n) {
    const std::int64_t patch = in_ch_ * kh_ * kw_;
    const T* colp = dcol.ptr() + n * oh_ * ow_ * patch;
    for (std::int64_t oy = 0; oy < oh_; ++oy) {
      for (std::int64_t ox = 0; ox < ow_; ++ox) {
        const T* src = colp + (oy * ow_ + ox) * patch;
        for (std::int64_t ci = 0; ci < in_ch_; ++ci) {
          for (std::int64_t ky = 0; ky < kh_; ++ky) {
            const std::int64_t iy = oy * stride_ - pad_h_ + ky;
            for (std::int64_t kx = 0; kx < kw_; ++kx) {
              const std::int64_t ix = ox * stride_ - pad_w_ + kx;
              if (iy >= 0 && iy < h_ && ix >= 0 && ix < w_)
                dx.at4(n, ci, iy, ix) += *src;
              ++src;
            }
          }
        }
      }
    }
  }

  std::int64_t in_ch_, out_ch_, kh_, kw_, stride_, pad_h_, pad_w_;
  std::int64_t n_ = 0, h_ = 0, w_ = 0, oh_ = 0, ow_ = 0;
  ParamT<T> weight_, bias_;
  TensorT<T> col_;
};

// ---------------------------------------------------------------------------
// MaxPool2d. Ties route the gradient to the first maximizer in row-major
// order, which matters for [0,255]-quantized inputs.
// ---------------------------------------------------------------------------
template <typename T>
class MaxPool2dT final : public LayerT<T> {
 public:
  MaxPool2dT(std::int64_t kh, std::int64_t kw, std::int64_t sh, std::int64_t sw)
      : kh_(kh), kw_(kw), sh_(sh), sw_(sw) {}

  TensorT<T> forward(const TensorT<T>& x) override {
    if (x.ndim() != 4) throw ShapeMismatch("maxpool2d input must be NCHW");
    in_shape_ = x.shape;
    const std::int64_t n = x.shape[0], c = x.shape[1], h = x.shape[2], w = x.shape[3];
    if (kh_ > h || kw_ > w) throw ShapeMismatch("pool window does not fit");
    const std::int64_t oh = (h - kh_) / sh_ + 1;
    const std::int64_t ow = (w - kw_) / sw_ + 1;
    TensorT<T> out({n, c, oh, ow});
    argmax_.assign(static_cast<std::size_t>(out.numel()), 0);

    std::size_t oi = 0;
    for (std::int64_t ni = 0; ni < n; ++ni)
      for (std::int64_t ci = 0; ci < c; ++ci)
        for (std::int64_t oy = 0; oy < oh; ++oy)
          for (std::int64_t ox = 0; ox < ow; ++ox) {
            T best{};
            std::int64_t best_idx = -1;
            for (std::int64_t ky = 0; ky < kh_; ++ky)
              for (std::int64_t kx = 0; kx < kw_; ++kx) {
                const std::int64_t iy = oy * sh_ + ky;
                const std::int64_t ix = ox * sw_ + kx;
                const T v = x.at4(ni, ci, iy, ix);
                if (best_idx < 0 || v > best) {  // strict: first max wins
                  best = v;
                  best_idx = ((ni * c + ci) * h + iy) * w + ix;
                }
              }
            out[oi] = best;
            argmax_[oi] = static_cast<std::size_t>(best_idx);
            ++oi;
          }
    out_shape_ = out.shape;
    return out;
  }

  TensorT<T> backward(const TensorT<T>& dy) override {
    require_shape(dy, out_shape_, "maxpool2d grad");
    TensorT<T> dx(in_shape_);
    for (std::size_t i = 0; i < argmax_.size(); ++i) dx[argmax_[i]] += dy[i];
    return dx;
  }

 private:
  std::int64_t kh_, kw_, sh_, sw_;
  std::vector<std::int64_t> in_shape_, out_shape_;
  std::vector<std::size_t> argmax_;
};

// ---------------------------------------------------------------------------
// Dense: y = x W^T + b over N x Fin batches.
// ---------------------------------------------------------------------------
template <typename T>
class DenseT final : public LayerT<T> {
 public:
  DenseT(std::string name, std::int64_t in_f, std::int64_t out_f,
         Xoshiro256ss& rng)
      : in_f_(in_f), out_f_(out_f) {
    weight_ = ParamT<T>(name + ".weight", seeded_init<T>({out_f, in_f}, in_f, rng));
    bias_ = ParamT<T>(name + ".bias", seeded_init<T>({out_f}, in_f, rng));
  }

  TensorT<T> forward(const TensorT<T>& x) override {
    if (x.ndim() != 2 || x.shape[1] != in_f_)
      throw ShapeMismatch("dense input must be Nx" + std::to_string(in_f_) +
                          ", got " + shape_string(x.shape));
    input_ = x;
    const std::int64_t n = x.shape[0];
    TensorT<T> out({n, out_f_});
    const T* wp = weight_.value.ptr();
    for (std::int64_t i = 0; i < n; ++i) {
      const T* row = x.ptr() + i * in_f_;
      for (std::int64_t o = 0; o < out_f_; ++o)
        out[static_cast<std::size_t>(i * out_f_ + o)] = static_cast<T>(
            simd::dot(wp + o * in_f_, row, static_cast<std::size_t>(in_f_)) +
            static_cast<double>(bias_.value[static_cast<std::size_t>(o)]));
    }
    return out;
  }

  TensorT<T> backward(const TensorT<T>& dy) override {
    const std::int64_t n = input_.shape[0];
    require_shape(dy, {n, out_f_}, "dense grad");
    TensorT<T> dx({n, in_f_});
    const T* wp = weight_.value.ptr();
    T* dwp = weight_.grad.ptr();
    for (std::int64_t i = 0; i < n; ++i) {
      const T* xrow = input_.ptr() + i * in_f_;
      T* dxrow = dx.ptr() + i * in_f_;
      for (std::int64_t o = 0; o < out_f_; ++o) {
        const T g = dy[static_cast<std::size_t>(i * out_f_ + o)];
        if (g == T{0}) continue;
        simd::axpy(g, wp + o * in_f_, dxrow, static_cast<std::size_t>(in_f_));
        simd::axpy(g, xrow, dwp + o * in_f_, static_cast<std::size_t>(in_f_));
        bias_.grad[static_cast<std::size_t>(o)] += g;
      }
    }
    return dx;
  }

  void collect_params(std::vector<ParamT<T>*>& out) override {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }

 private:
  std::int64_t in_f_, out_f_;
  ParamT<T> weight_, bias_;
  TensorT<T> input_;
};

// ---------------------------------------------------------------------------
// Elementwise activations.
// ---------------------------------------------------------------------------
template <typename T>
inline T sigmoid_scalar(T x) {
  return static_cast<T>(1.0 / (1.0 + std::exp(-static_cast<double>(x))));
}

template <typename T>
class ReluT final : public LayerT<T> {
 public:
  TensorT<T> forward(const TensorT<T>& x) override {
    input_ = x;
    TensorT<T> out = x;
    for (auto& v : out.data) v = v > T{0} ? v : T{0};
    return out;
  }
  TensorT<T> backward(const TensorT<T>& dy) override {
    require_shape(dy, input_.shape, "relu grad");
    TensorT<T> dx = dy;
    for (std::size_t i = 0; i < dx.data.size(); ++i)
      if (!(input_[i] > T{0})) dx[i] = T{0};
    return dx;
  }

 private:
  TensorT<T> input_;
};

template <typename T>
class SigmoidT final : public LayerT<T> {
 public:
  TensorT<T> forward(const TensorT<T>& x) override {
    out_ = x;
    for (auto& v : out_.data) v = sigmoid_scalar(v);
    return out_;
  }
  TensorT<T> backward(const TensorT<T>& dy) override {
    require_shape(dy, out_.shape, "sigmoid grad");
    TensorT<T> dx = dy;
    for (std::size_t i = 0; i < dx.data.size(); ++i)
      dx[i] *= out_[i] * (T{1} - out_[i]);
    return dx;
  }

 private:
  TensorT<T> out_;
};

template <typename T>
class TanhT final : public LayerT<T> {
 public:
  TensorT<T> forward(const TensorT<T>& x) override {
    out_ = x;
    for (auto& v : out_.data) v = static_cast<T>(std::tanh(static_cast<double>(v)));
    return out_;
  }
  TensorT<T> backward(const TensorT<T>& dy) override {
    require_shape(dy, out_.shape, "tanh grad");
    TensorT<T> dx = dy;
    for (std::size_t i = 0; i < dx.data.size(); ++i)
      dx[i] *= T{1} - out_[i] * out_[i];
    return dx;
  }

 private:
  TensorT<T> out_;
};

template <typename T>
class FlattenT final : public LayerT<T> {
 public:
  TensorT<T> forward(const TensorT<T>& x) override {
    in_shape_ = x.shape;
    return x.reshaped({x.shape[0], x.numel() / x.shape[0]});
  }
  TensorT<T> backward(const TensorT<T>& dy) override {
    return dy.reshaped(in_shape_);
  }

 private:
  std::vector<std::int64_t> in_shape_;
};

// ---------------------------------------------------------------------------
// LSTM over a N x L x E sequence, returning the last hidden state N x H.
// Gate layout in the stacked weights: [input, forget, candidate, output].
// ---------------------------------------------------------------------------
template <typename T>
struct LstmGates {
  TensorT<T> i, f, g, o;  // each N x H, post-activation
};

// Single cell step on raw pointers; shared by the layer and the public
// one-step surface.  z = W x + U h + b with W: 4H x E, U: 4H x H, b: 4H.
template <typename T>
void lstm_cell_forward(const T* x, const T* h_prev, const T* c_prev,
                       const TensorT<T>& w, const TensorT<T>& u,
                       const TensorT<T>& b, std::int64_t e, std::int64_t hid,
                       T* i_out, T* f_out, T* g_out, T* o_out, T* c_out,
                       T* h_out) {
  for (std::int64_t j = 0; j < 4 * hid; ++j) {
    const double z =
        simd::dot(w.ptr() + j * e, x, static_cast<std::size_t>(e)) +
        simd::dot(u.ptr() + j * hid, h_prev, static_cast<std::size_t>(hid)) +
        static_cast<double>(b[static_cast<std::size_t>(j)]);
    const std::int64_t gate = j / hid;
    const std::int64_t k = j % hid;
    const T zt = static_cast<T>(z);
    switch (gate) {
      case 0: i_out[k] = sigmoid_scalar(zt); break;
      case 1: f_out[k] = sigmoid_scalar(zt); break;
      case 2: g_out[k] = static_cast<T>(std::tanh(static_cast<double>(zt))); break;
      case 3: o_out[k] = sigmoid_scalar(zt); break;
    }
  }
  for (std::int64_t k = 0; k < hid; ++k) {
    c_out[k] = f_out[k] * c_prev[k] + i_out[k] * g_out[k];
    h_out[k] = o_out[k] * static_cast<T>(std::tanh(static_cast<double>(c_out[k])));
  }
}

template <typename T>
class LstmT final : public LayerT<T> {
 public:
  LstmT(std::string name, std::int64_t input_size, std::int64_t hidden,
        Xoshiro256ss& rng)
      : e_(input_size), h_(hidden) {
    const std::int64_t fan_in = input_size + hidden;
    w_ = ParamT<T>(name + ".w", seeded_init<T>({4 * hidden, input_size}, fan_in, rng));
    u_ = ParamT<T>(name + ".u", seeded_init<T>({4 * hidden, hidden}, fan_in, rng));
    b_ = ParamT<T>(name + ".b", seeded_init<T>({4 * hidden}, fan_in, rng));
  }

  TensorT<T> forward(const TensorT<T>& x) override {
    if (x.ndim() != 3 || x.shape[2] != e_)
      throw ShapeMismatch("lstm input must be NxLx" + std::to_string(e_) +
                          ", got " + shape_string(x.shape));
    input_ = x;
    n_ = x.shape[0];
    l_ = x.shape[1];
    gates_.assign(static_cast<std::size_t>(l_), LstmGates<T>{});
    h_states_ = TensorT<T>({l_ + 1, n_, h_});
    c_states_ = TensorT<T>({l_ + 1, n_, h_});

    for (std::int64_t t = 0; t < l_; ++t) {
      auto& g = gates_[static_cast<std::size_t>(t)];
      g.i = TensorT<T>({n_, h_});
      g.f = TensorT<T>({n_, h_});
      g.g = TensorT<T>({n_, h_});
      g.o = TensorT<T>({n_, h_});
      for (std::int64_t n = 0; n < n_; ++n) {
        lstm_cell_forward(x.ptr() + (n * l_ + t) * e_,
                          h_states_.ptr() + (t * n_ + n) * h_,
                          c_states_.ptr() + (t * n_ + n) * h_, w_.value,
                          u_.value, b_.value, e_, h_,
                          g.i.ptr() + n * h_, g.f.ptr() + n * h_,
                          g.g.ptr() + n * h_, g.o.ptr() + n * h_,
                          c_states_.ptr() + ((t + 1) * n_ + n) * h_,
                          h_states_.ptr() + ((t + 1) * n_ + n) * h_);
      }
    }
    TensorT<T> out({n_, h_});
    std::copy(h_states_.ptr() + l_ * n_ * h_,
              h_states_.ptr() + (l_ + 1) * n_ * h_, out.ptr());
    return out;
  }

  TensorT<T> backward(const TensorT<T>& dy) override {
    require_shape(dy, {n_, h_}, "lstm grad");
    TensorT<T> dx({n_, l_, e_});
    TensorT<T> dh = dy;
    TensorT<T> dc({n_, h_});
    TensorT<T> dz({4 * h_});

    for (std::int64_t t = l_ - 1; t >= 0; --t) {
      const auto& g = gates_[static_cast<std::size_t>(t)];
      TensorT<T> dh_prev({n_, h_});
      TensorT<T> dc_prev({n_, h_});
      for (std::int64_t n = 0; n < n_; ++n) {
        const T* c_new = c_states_.ptr() + ((t + 1) * n_ + n) * h_;
        const T* c_prev = c_states_.ptr() + (t * n_ + n) * h_;
        const T* h_prev = h_states_.ptr() + (t * n_ + n) * h_;
        const T* xrow = input_.ptr() + (n * l_ + t) * e_;
        for (std::int64_t k = 0; k < h_; ++k) {
          const std::size_t nk = static_cast<std::size_t>(n * h_ + k);
          const T tc = static_cast<T>(std::tanh(static_cast<double>(c_new[k])));
          const T do_ = dh[nk] * tc;
          const T dct = dc[nk] + dh[nk] * g.o[nk] * (T{1} - tc * tc);
          const T di = dct * g.g[nk];
          const T df = dct * c_prev[k];
          const T dg = dct * g.i[nk];
          dc_prev[nk] = dct * g.f[nk];
          dz[static_cast<std::size_t>(0 * h_ + k)] = di * g.i[nk] * (T{1} - g.i[nk]);
          dz[static_cast<std::size_t>(1 * h_ + k)] = df * g.f[nk] * (T{1} - g.f[nk]);
          dz[static_cast<std::size_t>(2 * h_ + k)] = dg * (T{1} - g.g[nk] * g.g[nk]);
          dz[static_cast<std::size_t>(3 * h_ + k)] = do_ * g.o[nk] * (T{1} - g.o[nk]);
        }
        T* dxrow = dx.ptr() + (n * l_ + t) * e_;
        T* dhp = dh_prev.ptr() + n * h_;
        for (std::int64_t j = 0; j < 4 * h_; ++j) {
          const T gz = dz[static_cast<std::size_t>(j)];
          if (gz == T{0}) continue;
          simd::axpy(gz, w_.value.ptr() + j * e_, dxrow, static_cast<std::size_t>(e_));
          simd::axpy(gz, u_.value.ptr() + j * h_, dhp, static_cast<std::size_t>(h_));
          simd::axpy(gz, xrow, w_.grad.ptr() + j * e_, static_cast<std::size_t>(e_));
          simd::axpy(gz, h_prev, u_.grad.ptr() + j * h_, static_cast<std::size_t>(h_));
          b_.grad[static_cast<std::size_t>(j)] += gz;
        }
      }
      dh = std::move(dh_prev);
      dc = std::move(dc_prev);
    }
    return dx;
  }

  void collect_params(std::vector<ParamT<T>*>& out) override {
    out.push_back(&w_);
    out.push_back(&u_);
    out.push_back(&b_);
  }

 private:
  std::int64_t e_, h_;
  std::int64_t n_ = 0, l_ = 0;
  ParamT<T> w_, u_, b_;
  TensorT<T> input_, h_states_, c_states_;
  std::vector<LstmGates<T>> gates_;
};

// Public single-step surface: x is E-vector, h/c are H-vectors.
template <typename T>
void lstm_step(const TensorT<T>& x, const TensorT<T>& h, const TensorT<T>& c,
               const TensorT<T>& w, const TensorT<T>& u, const TensorT<T>& b,
               TensorT<T>& h_next, TensorT<T>& c_next) {
  const std::int64_t e = x.numel();
  const std::int64_t hid = h.numel();
  if (c.numel() != hid || w.shape != std::vector<std::int64_t>{4 * hid, e} ||
      u.shape != std::vector<std::int64_t>{4 * hid, hid} || b.numel() != 4 * hid)
    throw ShapeMismatch("lstm_step parameter shapes do not conform");
  h_next = TensorT<T>({hid});
  c_next = TensorT<T>({hid});
  TensorT<T> i({hid}), f({hid}), g({hid}), o({hid});
  lstm_cell_forward(x.ptr(), h.ptr(), c.ptr(), w, u, b, e, hid, i.ptr(),
                    f.ptr(), g.ptr(), o.ptr(), c_next.ptr(), h_next.ptr());
}

// Sequential container used by the CNN architectures.
template <typename T>
class StackT final : public LayerT<T> {
 public:
  void add(std::unique_ptr<LayerT<T>> layer) { layers_.push_back(std::move(layer)); }

  TensorT<T> forward(const TensorT<T>& x) override {
    TensorT<T> cur = x;
    for (auto& l : layers_) cur = l->forward(cur);
    return cur;
  }
  TensorT<T> backward(const TensorT<T>& dy) override {
    TensorT<T> cur = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
      cur = (*it)->backward(cur);
    return cur;
  }
  void collect_params(std::vector<ParamT<T>*>& out) override {
    for (auto& l : layers_) l->collect_params(out);
  }

 private:
  std::vector<std::unique_ptr<LayerT<T>>> layers_;
};

}  // namespace lobforge::nn
