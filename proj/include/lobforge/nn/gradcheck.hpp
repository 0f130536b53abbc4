#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lobforge/nn/tensor.hpp"
#include "lobforge/rng.hpp"

namespace lobforge::nn {

// Central finite-difference comparison on an f64 shadow of the network.
// The caller runs the analytic backward once, then hands over (value,
// analytic-grad) tensor pairs plus a loss closure that re-runs the forward
// pass with the current values.

struct GradCheckConfig {
  double eps = 1e-3;
  double tolerance = 1e-4;
  // 0 checks every coordinate; otherwise a seeded random subset per tensor.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 7;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_fd = 0.0;
  std::size_t coords_checked = 0;
  bool passed = false;
};

struct CheckedTensor {
  std::string name;
  Tensor64* value;              // perturbed in place, restored after
  const Tensor64* analytic_grad;
};

inline GradCheckReport grad_check(const std::function<double()>& loss_fn,
                                  const std::vector<CheckedTensor>& tensors,
                                  const GradCheckConfig& cfg = {}) {
  GradCheckReport rep;
  Xoshiro256ss rng(cfg.seed);
  for (const auto& ct : tensors) {
    const std::size_t n = ct.value->data.size();
    std::vector<std::size_t> coords;
    if (cfg.max_coords_per_tensor == 0 || n <= cfg.max_coords_per_tensor) {
      coords.resize(n);
      for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      for (std::size_t i = 0; i < cfg.max_coords_per_tensor; ++i)
        coords.push_back(static_cast<std::size_t>(rng.below(n)));
    }
    for (std::size_t idx : coords) {
      double& v = ct.value->data[idx];
      const double saved = v;
      v = saved + cfg.eps;
      const double lp = loss_fn();
      v = saved - cfg.eps;
      const double lm = loss_fn();
      v = saved;
      const double fd = (lp - lm) / (2.0 * cfg.eps);
      const double analytic = ct.analytic_grad->data[idx];
      const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-6});
      const double rel = std::abs(fd - analytic) / denom;
      ++rep.coords_checked;
      if (rel > rep.max_rel_error) {
        rep.max_rel_error = rel;
        rep.worst_tensor = ct.name;
        rep.worst_index = idx;
        rep.worst_analytic = analytic;
        rep.worst_fd = fd;
      }
    }
  }
  rep.passed = rep.max_rel_error < cfg.tolerance;
  return rep;
}

}  // namespace lobforge::nn
