#include "dtar/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace dtar::nn {

void zero_grads(ParameterList& params) {
  for (auto& p : params) p.tensor.zero_grad();
}

std::size_t parameter_count(const ParameterList& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += static_cast<std::size_t>(p.tensor.value().size());
  return n;
}

Matrix glorot_uniform(int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = (2.0 * uniform01(rng) - 1.0) * limit;
  return m;
}

Tensor activate(const Tensor& x, Activation act) {
  switch (act) {
    case Activation::kTanh:
      return tanh(x);
    case Activation::kElu:
      return elu(x);
    case Activation::kNone:
      break;
  }
  return x;
}

Linear::Linear(int in_dim, int out_dim, Rng& rng, bool bias) {
  if (in_dim < 1 || out_dim < 1) throw std::invalid_argument("Linear: dimensions must be positive");
  weight_ = Tensor::parameter(glorot_uniform(in_dim, out_dim, rng));
  if (bias) bias_ = Tensor::parameter(Matrix::Zero(1, out_dim));
}

Tensor Linear::forward(const Tensor& x) const {
  Tensor y = matmul(x, weight_);
  return bias_.defined() ? add_row(y, bias_) : y;
}

void Linear::parameters(ParameterList& out, const std::string& prefix) const {
  out.push_back({prefix + ".weight", weight_});
  if (bias_.defined()) out.push_back({prefix + ".bias", bias_});
}

Mlp::Mlp(const std::vector<int>& sizes, Activation hidden, Rng& rng, Activation output)
    : hidden_(hidden), output_(output) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) layers_.emplace_back(sizes[i], sizes[i + 1], rng);
}

Tensor Mlp::forward(const Tensor& x) const {
  Tensor h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].forward(h);
    h = activate(h, i + 1 < layers_.size() ? hidden_ : output_);
  }
  return h;
}

void Mlp::parameters(ParameterList& out, const std::string& prefix) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i].parameters(out, prefix + "." + std::to_string(i));
}

LayerNorm::LayerNorm(int dim, double eps)
    : gamma_(Tensor::parameter(Matrix::Ones(1, dim))), beta_(Tensor::parameter(Matrix::Zero(1, dim))), eps_(eps) {}

Tensor LayerNorm::forward(const Tensor& x) const { return layer_norm(x, gamma_, beta_, eps_); }

void LayerNorm::parameters(ParameterList& out, const std::string& prefix) const {
  out.push_back({prefix + ".gamma", gamma_});
  out.push_back({prefix + ".beta", beta_});
}

}  // namespace dtar::nn
