#include "dtar/nn/distributions.hpp"

#include <algorithm>
#include <cmath>

#include "dtar/nn/ops.hpp"

namespace dtar::nn {

MaskedCategorical::MaskedCategorical(const RowVector& logits, const std::vector<bool>& mask) : mask_(mask) {
  const auto k = static_cast<std::size_t>(logits.size());
  if (mask.size() != k) throw std::invalid_argument("MaskedCategorical: mask length differs from logits");
  std::vector<double> z(k);
  for (std::size_t i = 0; i < k; ++i) {
    z[i] = mask[i] ? logits(static_cast<Eigen::Index>(i)) : kMaskedLogit;
    admitted_ += mask[i] ? 1 : 0;
  }
  log_probs_.resize(k);
  probs_.resize(k);
  if (k == 0) return;
  const double mx = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - mx);
  const double lse = mx + std::log(total);
  for (std::size_t i = 0; i < k; ++i) {
    log_probs_[i] = z[i] - lse;
    probs_[i] = std::exp(log_probs_[i]);
  }
}

int MaskedCategorical::sample(Rng& rng) const {
  if (empty()) throw EmptyMaskError();
  double admitted_mass = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i)
    if (mask_[i]) admitted_mass += probs_[i];
  const double u = uniform01(rng) * admitted_mass;
  double acc = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!mask_[i]) continue;
    acc += probs_[i];
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last;
}

int MaskedCategorical::argmax() const {
  if (empty()) throw EmptyMaskError();
  int best = -1;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (mask_[i] && (best < 0 || log_probs_[i] > log_probs_[static_cast<std::size_t>(best)])) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

double MaskedCategorical::log_prob(int action) const {
  if (action < 0 || action >= size()) throw std::out_of_range("MaskedCategorical::log_prob");
  return log_probs_[static_cast<std::size_t>(action)];
}

double MaskedCategorical::entropy() const {
  double h = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i)
    if (mask_[i] && probs_[i] > 0.0) h -= probs_[i] * log_probs_[i];
  return h;
}

Matrix mask_row(const std::vector<bool>& mask) {
  Matrix m(1, static_cast<Eigen::Index>(mask.size()));
  for (std::size_t i = 0; i < mask.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = mask[i] ? 1.0 : 0.0;
  return m;
}

}  // namespace dtar::nn
