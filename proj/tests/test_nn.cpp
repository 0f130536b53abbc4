#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "lobforge/nn/gradcheck.hpp"
#include "lobforge/nn/layers.hpp"
#include "lobforge/nn/loss.hpp"
#include "lobforge/nn/optim.hpp"
#include "lobforge/rng.hpp"

using namespace lobforge;
using nn::Tensor64;

namespace {

Tensor64 random_tensor(std::vector<std::int64_t> shape, Xoshiro256ss& rng,
                       double lo = -1.0, double hi = 1.0) {
  Tensor64 t(std::move(shape));
  for (auto& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

// Forward + mse + backward on an f64 layer, then compare every analytic
// gradient (params and input) against central differences.
nn::GradCheckReport check_layer(nn::LayerT<double>& layer, Tensor64 x,
                                std::uint64_t seed,
                                nn::GradCheckConfig cfg = {}) {
  Xoshiro256ss rng(seed * 977 + 13);
  Tensor64 out = layer.forward(x);
  const Tensor64 target = random_tensor(out.shape, rng);

  std::vector<nn::ParamT<double>*> params;
  layer.collect_params(params);
  for (auto* p : params) p->zero_grad();
  auto mse = nn::mse_loss(layer.forward(x), target);
  const Tensor64 dx = layer.backward(mse.grad);

  std::vector<nn::CheckedTensor> tensors;
  tensors.push_back({"input", &x, &dx});
  for (auto* p : params) tensors.push_back({p->name, &p->value, &p->grad});

  auto loss = [&]() { return nn::mse_loss(layer.forward(x), target).loss; };
  return nn::grad_check(loss, tensors, cfg);
}

}  // namespace

TEST_CASE("conv2d forward hand cases") {
  Xoshiro256ss rng(1);
  SUBCASE("all-ones 3x3 kernel sums the window") {
    nn::Conv2dT<double> conv("c", 1, 1, 3, 3, 1, 0, 0, rng);
    std::vector<nn::ParamT<double>*> ps;
    conv.collect_params(ps);
    ps[0]->value.fill(1.0);
    ps[1]->value.fill(0.0);
    Tensor64 x({1, 1, 3, 3});
    x.fill(1.0);
    const auto y = conv.forward(x);
    CHECK(y.shape == std::vector<std::int64_t>{1, 1, 1, 1});
    CHECK(y[0] == doctest::Approx(9.0));
  }
  SUBCASE("identity kernel with pad 1 reproduces the input") {
    nn::Conv2dT<double> conv("c", 1, 1, 3, 3, 1, 1, 1, rng);
    std::vector<nn::ParamT<double>*> ps;
    conv.collect_params(ps);
    ps[0]->value.fill(0.0);
    ps[0]->value.data[4] = 1.0;  // center tap
    ps[1]->value.fill(0.0);
    const Tensor64 x = random_tensor({2, 1, 5, 4}, rng);
    const auto y = conv.forward(x);
    REQUIRE(y.shape == x.shape);
    for (std::size_t i = 0; i < x.data.size(); ++i)
      CHECK(y[i] == doctest::Approx(x[i]));
  }
  SUBCASE("shape mismatch is rejected") {
    nn::Conv2dT<double> conv("c", 3, 4, 3, 3, 1, 1, 1, rng);
    Tensor64 x({1, 2, 8, 8});
    CHECK_THROWS_AS(conv.forward(x), ShapeMismatch);
  }
}

TEST_CASE("conv2d gradients match finite differences over 20 seeds") {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Xoshiro256ss rng(seed);
    nn::Conv2dT<double> conv("c", 3, 4, 3, 3, 1, 1, 1, rng);
    const auto rep = check_layer(conv, random_tensor({2, 3, 8, 6}, rng), seed);
    worst = std::max(worst, rep.max_rel_error);
    CHECK_MESSAGE(rep.passed, "seed ", seed, " worst ", rep.max_rel_error, " at ",
                  rep.worst_tensor, "[", rep.worst_index, "]");
  }
  MESSAGE("conv2d worst rel error over 20 seeds: ", worst);
}

TEST_CASE("conv2d strided gradients") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Xoshiro256ss rng(seed + 100);
    nn::Conv2dT<double> conv("c", 2, 3, 3, 2, 2, 1, 0, rng);
    const auto rep = check_layer(conv, random_tensor({2, 2, 9, 6}, rng), seed);
    CHECK_MESSAGE(rep.passed, "worst ", rep.max_rel_error);
  }
}

TEST_CASE("maxpool2d forward and tie routing") {
  nn::MaxPool2dT<double> pool(2, 2, 2, 2);
  Tensor64 x({1, 1, 2, 2});
  x.data = {1, 2, 3, 4};
  const auto y = pool.forward(x);
  CHECK(y.numel() == 1);
  CHECK(y[0] == 4.0);

  SUBCASE("constant input routes gradient to the first element per window") {
    Tensor64 flat({1, 1, 4, 4});
    flat.fill(7.0);
    const auto out = pool.forward(flat);
    CHECK(out.numel() == 4);
    Tensor64 dy(out.shape);
    dy.fill(1.0);
    const auto dx = pool.backward(dy);
    for (std::int64_t r = 0; r < 4; ++r)
      for (std::int64_t c = 0; c < 4; ++c)
        CHECK(dx.at4(0, 0, r, c) == ((r % 2 == 0 && c % 2 == 0) ? 1.0 : 0.0));
  }
  SUBCASE("window that does not fit is rejected") {
    Tensor64 tiny({1, 1, 1, 1});
    CHECK_THROWS_AS(pool.forward(tiny), ShapeMismatch);
  }
}

TEST_CASE("maxpool2d gradients away from ties") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Xoshiro256ss rng(seed + 17);
    nn::MaxPool2dT<double> pool(2, 2, 2, 2);
    // continuous uniforms: exact ties have measure zero, but keep eps small
    // relative to typical gaps anyway
    nn::GradCheckConfig cfg;
    cfg.eps = 1e-5;
    cfg.tolerance = 1e-4;
    const auto rep = check_layer(pool, random_tensor({2, 2, 6, 4}, rng), seed, cfg);
    CHECK_MESSAGE(rep.passed, "seed ", seed, " worst ", rep.max_rel_error);
  }
}

TEST_CASE("dense forward identity and gradients") {
  Xoshiro256ss rng(3);
  SUBCASE("identity weight, zero bias") {
    nn::DenseT<double> dense("d", 4, 4, rng);
    std::vector<nn::ParamT<double>*> ps;
    dense.collect_params(ps);
    ps[0]->value.fill(0.0);
    for (int i = 0; i < 4; ++i) ps[0]->value.data[i * 4 + i] = 1.0;
    ps[1]->value.fill(0.0);
    const Tensor64 x = random_tensor({3, 4}, rng);
    const auto y = dense.forward(x);
    for (std::size_t i = 0; i < x.data.size(); ++i)
      CHECK(y[i] == doctest::Approx(x[i]));
  }
  SUBCASE("gradcheck over 20 seeds") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Xoshiro256ss lrng(seed + 31);
      nn::DenseT<double> dense("d", 7, 5, lrng);
      const auto rep = check_layer(dense, random_tensor({4, 7}, lrng), seed);
      CHECK_MESSAGE(rep.passed, "seed ", seed, " worst ", rep.max_rel_error);
    }
  }
}

TEST_CASE("activation analytic points and bounds") {
  nn::SigmoidT<double> sig;
  nn::TanhT<double> tanh_l;
  nn::ReluT<double> relu;
  Tensor64 x({1, 3});
  x.data = {0.0, -1.0, 2.5};
  const auto s = sig.forward(x);
  CHECK(s[0] == doctest::Approx(0.5));
  const auto t = tanh_l.forward(x);
  CHECK(t[0] == doctest::Approx(0.0));
  const auto r = relu.forward(x);
  CHECK(r[1] == 0.0);
  CHECK(r[2] == doctest::Approx(2.5));

  Xoshiro256ss rng(4);
  const Tensor64 wide = random_tensor({1, 200}, rng, -12.0, 12.0);
  for (double v : sig.forward(wide).data) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  for (double v : tanh_l.forward(wide).data) {
    CHECK(v > -1.0);
    CHECK(v < 1.0);
  }
  for (double v : relu.forward(wide).data) CHECK(v >= 0.0);
}

TEST_CASE("dense+relu stack gradients") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Xoshiro256ss rng(seed + 57);
    nn::StackT<double> stack;
    stack.add(std::make_unique<nn::DenseT<double>>("d1", 6, 8, rng));
    stack.add(std::make_unique<nn::ReluT<double>>());
    stack.add(std::make_unique<nn::DenseT<double>>("d2", 8, 3, rng));
    nn::GradCheckConfig cfg;
    cfg.eps = 1e-6;  // f64 shadow: tiny eps keeps relu units on one side
    const auto rep = check_layer(stack, random_tensor({5, 6}, rng), seed, cfg);
    CHECK_MESSAGE(rep.passed, "seed ", seed, " worst ", rep.max_rel_error);
  }
}

TEST_CASE("conv-pool-dense stack gradients") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Xoshiro256ss rng(seed + 71);
    nn::StackT<double> stack;
    stack.add(std::make_unique<nn::Conv2dT<double>>("c", 2, 4, 3, 3, 1, 1, 1, rng));
    stack.add(std::make_unique<nn::ReluT<double>>());
    stack.add(std::make_unique<nn::MaxPool2dT<double>>(2, 2, 2, 2));
    stack.add(std::make_unique<nn::FlattenT<double>>());
    stack.add(std::make_unique<nn::DenseT<double>>("d", 4 * 3 * 2, 2, rng));
    nn::GradCheckConfig cfg;
    cfg.eps = 1e-6;  // keep pool/relu switches on one side
    const auto rep = check_layer(stack, random_tensor({2, 2, 6, 4}, rng), seed, cfg);
    CHECK_MESSAGE(rep.passed, "seed ", seed, " worst ", rep.max_rel_error);
  }
}

TEST_CASE("lstm_step hand cases") {
  const std::int64_t e = 3, h = 2;
  Tensor64 w({4 * h, e}), u({4 * h, h}), b({4 * h});
  Tensor64 x({e}), h0({h}), c0({h}), h1, c1;

  SUBCASE("zero everything gives zero next state") {
    nn::lstm_step(x, h0, c0, w, u, b, h1, c1);
    for (double v : h1.data) CHECK(v == doctest::Approx(0.0));
    for (double v : c1.data) CHECK(v == doctest::Approx(0.0));
  }
  SUBCASE("saturated forget gate carries the cell state") {
    c0.data = {0.7, -0.4};
    for (std::int64_t k = 0; k < h; ++k) b.data[h + k] = 20.0;  // forget block
    nn::lstm_step(x, h0, c0, w, u, b, h1, c1);
    // i = 0.5, g = tanh(0) = 0 -> c' = f*c + 0
    CHECK(c1[0] == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(c1[1] == doctest::Approx(-0.4).epsilon(1e-8));
  }
  SUBCASE("conforming shapes enforced") {
    Tensor64 bad_w({4 * h, e + 1});
    CHECK_THROWS_AS(nn::lstm_step(x, h0, c0, bad_w, u, b, h1, c1), ShapeMismatch);
  }
}

TEST_CASE("lstm hidden state is bounded by 1 elementwise") {
  Xoshiro256ss rng(6);
  nn::LstmT<double> lstm("l", 4, 5, rng);
  const auto out = lstm.forward(random_tensor({3, 7, 4}, rng, -10.0, 10.0));
  for (double v : out.data) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("lstm gradients through time over 20 seeds") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Xoshiro256ss rng(seed + 91);
    nn::LstmT<double> lstm("l", 3, 4, rng);
    const auto rep = check_layer(lstm, random_tensor({2, 5, 3}, rng), seed);
    CHECK_MESSAGE(rep.passed, "seed ", seed, " worst ", rep.max_rel_error, " at ",
                  rep.worst_tensor);
  }
}

TEST_CASE("mse loss values and gradient") {
  Tensor64 a({2, 2}), b({2, 2});
  a.data = {1, 2, 3, 4};
  b.data = {1, 2, 3, 4};
  CHECK(nn::mse_loss(a, b).loss == 0.0);
  for (auto& v : b.data) v -= 1.0;
  const auto r = nn::mse_loss(a, b);
  CHECK(r.loss == doctest::Approx(1.0));
  for (double g : r.grad.data) CHECK(g == doctest::Approx(2.0 / 4.0));

  SUBCASE("matches finite differences") {
    Xoshiro256ss rng(7);
    Tensor64 pred = random_tensor({3, 2}, rng);
    const Tensor64 target = random_tensor({3, 2}, rng);
    auto res = nn::mse_loss(pred, target);
    std::vector<nn::CheckedTensor> tensors{{"pred", &pred, &res.grad}};
    const auto rep = nn::grad_check(
        [&]() { return nn::mse_loss(pred, target).loss; }, tensors);
    CHECK(rep.passed);
  }
  SUBCASE("shape mismatch") {
    Tensor64 c({2, 3});
    CHECK_THROWS_AS(nn::mse_loss(a, c), ShapeMismatch);
  }
  SUBCASE("loss >= 0, zero iff equal") {
    Xoshiro256ss rng(8);
    for (int i = 0; i < 50; ++i) {
      const Tensor64 p = random_tensor({2, 3}, rng);
      const Tensor64 q = random_tensor({2, 3}, rng);
      CHECK(nn::mse_loss(p, q).loss >= 0.0);
    }
  }
}

TEST_CASE("grad_check flags a corrupted backward pass") {
  Xoshiro256ss rng(9);
  nn::DenseT<double> dense("d", 4, 3, rng);
  Tensor64 x = random_tensor({2, 4}, rng);
  const auto out = dense.forward(x);
  const Tensor64 target = random_tensor(out.shape, rng);
  std::vector<nn::ParamT<double>*> ps;
  dense.collect_params(ps);
  for (auto* p : ps) p->zero_grad();
  auto mse = nn::mse_loss(dense.forward(x), target);
  dense.backward(mse.grad);

  Tensor64 corrupted = ps[0]->grad;
  corrupted.data[0] = corrupted.data[0] * 2.0 + 0.5;
  std::vector<nn::CheckedTensor> tensors{{"w", &ps[0]->value, &corrupted}};
  const auto rep = nn::grad_check(
      [&]() { return nn::mse_loss(dense.forward(x), target).loss; }, tensors);
  CHECK(!rep.passed);
}

TEST_CASE("adam behavior") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    Xoshiro256ss rng(10);
    nn::ParamT<float> p("p", nn::seeded_init<float>({4}, 4, rng));
    const auto before = p.value.data;
    p.zero_grad();
    std::vector<nn::ParamT<float>*> ps{&p};
    nn::adam_update(ps, {});
    CHECK(p.value.data == before);
  }
  SUBCASE("one step on f(x)=x^2 from x=1 decreases x") {
    nn::ParamT<float> p("x", nn::Tensor({1}));
    p.value[0] = 1.0f;
    p.grad[0] = 2.0f;  // d/dx x^2 at 1
    std::vector<nn::ParamT<float>*> ps{&p};
    nn::AdamConfig cfg;
    cfg.lr = 0.1;
    nn::adam_update(ps, cfg);
    CHECK(p.value[0] < 1.0f);
    CHECK(p.value[0] > 0.5f);
  }
}

TEST_CASE("seeded init is deterministic and respects the fan-in bound") {
  Xoshiro256ss a(123), b(123), c(124);
  const auto t1 = nn::seeded_init<float>({64}, 16, a);
  const auto t2 = nn::seeded_init<float>({64}, 16, b);
  const auto t3 = nn::seeded_init<float>({64}, 16, c);
  CHECK(t1.data == t2.data);  // bit-identical
  CHECK(t1.data != t3.data);
  for (float v : t1.data) CHECK(std::abs(v) <= 0.25f);  // 1/sqrt(16)
}

TEST_CASE("forward passes are deterministic") {
  Xoshiro256ss r1(55), r2(55);
  nn::DenseT<float> d1("d", 6, 4, r1);
  nn::DenseT<float> d2("d", 6, 4, r2);
  nn::Tensor x({2, 6});
  Xoshiro256ss xr(56);
  for (auto& v : x.data) v = static_cast<float>(xr.uniform(-1, 1));
  const auto y1 = d1.forward(x);
  const auto y2 = d2.forward(x);
  CHECK(y1.data == y2.data);
}
