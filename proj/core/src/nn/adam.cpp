#include "dtar/nn/adam.hpp"

#include <cmath>

namespace dtar::nn {

void Adam::step(ParameterList& params) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (auto& p : params) {
    Matrix& w = p.tensor.mutable_value();
    Matrix g = p.tensor.grad();
    auto [it, inserted] = state_.try_emplace(p.name);
    Moments& s = it->second;
    if (inserted || s.m.rows() != w.rows() || s.m.cols() != w.cols()) {
      s.m = Matrix::Zero(w.rows(), w.cols());
      s.v = Matrix::Zero(w.rows(), w.cols());
    }
    s.m = cfg_.beta1 * s.m + (1.0 - cfg_.beta1) * g;
    s.v = cfg_.beta2 * s.v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    w.array() -= cfg_.lr * (s.m.array() / bc1) / ((s.v.array() / bc2).sqrt() + cfg_.eps);
  }
}

double clip_grad_norm(ParameterList& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params)
    if (p.tensor.has_grad()) sq += p.tensor.node()->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (auto& p : params)
      if (p.tensor.has_grad()) p.tensor.node()->grad *= s;
  }
  return norm;
}

}  // namespace dtar::nn
