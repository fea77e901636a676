#pragma once

#include <string>
#include <unordered_map>

#include "dtar/nn/layers.hpp"

namespace dtar::nn {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moment state is keyed by parameter name.
class Adam {
 public:
  struct Moments {
    Matrix m;
    Matrix v;
  };

  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  /// One update from the accumulated gradients; parameters without a
  /// gradient are treated as having a zero gradient.
  void step(ParameterList& params);

  const AdamConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }
  long long steps() const { return t_; }
  void set_steps(long long t) { t_ = t; }
  std::unordered_map<std::string, Moments>& state() { return state_; }
  const std::unordered_map<std::string, Moments>& state() const { return state_; }

 private:
  AdamConfig cfg_;
  long long t_ = 0;
  std::unordered_map<std::string, Moments> state_;
};

/// Scales all gradients so their joint L2 norm is at most max_norm.
/// Returns the norm before clipping.
double clip_grad_norm(ParameterList& params, double max_norm);

}  // namespace dtar::nn
