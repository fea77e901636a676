#pragma once

#include <string>
#include <vector>

#include "dtar/nn/ops.hpp"
#include "dtar/rng.hpp"

namespace dtar::nn {

struct NamedParameter {
  std::string name;
  Tensor tensor;
};
using ParameterList = std::vector<NamedParameter>;

void zero_grads(ParameterList& params);
std::size_t parameter_count(const ParameterList& params);

/// Uniform in +-sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(int fan_in, int fan_out, Rng& rng);

enum class Activation { kNone, kTanh, kElu };

Tensor activate(const Tensor& x, Activation act);

/// y = x W + b, with W: in x out.
class Linear {
 public:
  Linear() = default;
  Linear(int in_dim, int out_dim, Rng& rng, bool bias = true);

  Tensor forward(const Tensor& x) const;
  void parameters(ParameterList& out, const std::string& prefix) const;

  int in_dim() const { return static_cast<int>(weight_.rows()); }
  int out_dim() const { return static_cast<int>(weight_.cols()); }
  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }

 private:
  Tensor weight_;
  Tensor bias_;  // undefined when disabled
};

/// Stack of Linear layers; the activation follows every layer but the last.
class Mlp {
 public:
  Mlp() = default;
  Mlp(const std::vector<int>& sizes, Activation hidden, Rng& rng, Activation output = Activation::kNone);

  Tensor forward(const Tensor& x) const;
  void parameters(ParameterList& out, const std::string& prefix) const;

  std::vector<Linear>& layers() { return layers_; }
  int in_dim() const { return layers_.front().in_dim(); }
  int out_dim() const { return layers_.back().out_dim(); }

 private:
  std::vector<Linear> layers_;
  Activation hidden_ = Activation::kTanh;
  Activation output_ = Activation::kNone;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  explicit LayerNorm(int dim, double eps = 1e-5);

  Tensor forward(const Tensor& x) const;
  void parameters(ParameterList& out, const std::string& prefix) const;

  Tensor& gamma() { return gamma_; }
  Tensor& beta() { return beta_; }

 private:
  Tensor gamma_;
  Tensor beta_;
  double eps_ = 1e-5;
};

}  // namespace dtar::nn
