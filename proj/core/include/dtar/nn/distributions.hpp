#pragma once

#include <stdexcept>
#include <vector>

#include "dtar/nn/matrix.hpp"
#include "dtar/rng.hpp"

namespace dtar::nn {

/// Raised when a mask admits no action.
class EmptyMaskError : public std::runtime_error {
 public:
  EmptyMaskError() : std::runtime_error("mask admits no action") {}
};

/// Categorical over K actions with disallowed logits pushed to kMaskedLogit.
class MaskedCategorical {
 public:
  MaskedCategorical(const RowVector& logits, const std::vector<bool>& mask);

  bool empty() const { return admitted_ == 0; }
  int admitted() const { return admitted_; }
  int size() const { return static_cast<int>(probs_.size()); }
  const std::vector<double>& probs() const { return probs_; }

  /// Inverse-CDF draw over admitted actions; throws EmptyMaskError when empty.
  int sample(Rng& rng) const;
  /// Most probable admitted action, lowest index on ties.
  int argmax() const;
  double log_prob(int action) const;
  /// Entropy over the admitted support.
  double entropy() const;

 private:
  std::vector<double> log_probs_;
  std::vector<double> probs_;
  std::vector<bool> mask_;
  int admitted_ = 0;
};

/// Mask as a 1 x K matrix of 0/1 entries.
Matrix mask_row(const std::vector<bool>& mask);

}  // namespace dtar::nn
