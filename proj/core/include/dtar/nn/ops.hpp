#pragma once

#include <span>
#include <vector>

#include "dtar/nn/tensor.hpp"

namespace dtar::nn {

/// Logit assigned to disallowed actions.
inline constexpr double kMaskedLogit = -1e9;

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
/// Elementwise product.
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
/// a (R x C) plus a 1 x C row broadcast over rows.
Tensor add_row(const Tensor& a, const Tensor& row);

Tensor elu(const Tensor& a, double alpha = 1.0);
Tensor leaky_relu(const Tensor& a, double slope = 0.2);
Tensor tanh(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor square(const Tensor& a);
/// Gradient passes where lo <= a <= hi.
Tensor clamp(const Tensor& a, double lo, double hi);
/// Elementwise minimum; ties route the gradient to a.
Tensor minimum(const Tensor& a, const Tensor& b);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
/// R x C -> R x 1.
Tensor row_sum(const Tensor& a);

/// out[i] = a[idx[i]].
Tensor gather_rows(const Tensor& a, std::span<const int> idx);
/// out[idx[i]] += a[i], with out_rows rows.
Tensor scatter_add_rows(const Tensor& a, std::span<const int> idx, int out_rows);
/// out[r] = a[r, idx[r]], giving R x 1.
Tensor pick(const Tensor& a, std::span<const int> idx);
Tensor concat_cols(const std::vector<Tensor>& parts);

/// z: R x (H d), att: H x d. out[r, h] = sum_k z[r, h d + k] att[h, k].
Tensor head_dot(const Tensor& z, const Tensor& att);
/// m: R x (H d), alpha: R x H. out[r, h d + k] = m[r, h d + k] alpha[r, h].
Tensor head_scale(const Tensor& m, const Tensor& alpha);
/// Softmax of each column of scores within each segment; segment[i] names
/// the group of row i. Throws when a segment id is out of range.
Tensor segment_softmax(const Tensor& scores, std::span<const int> segment, int num_segments);

/// Row-wise normalisation with learnable 1 x C scale and shift.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);

/// Row-wise log-softmax after replacing disallowed logits with kMaskedLogit.
/// mask is R x C with entries 0 or 1.
Tensor masked_log_softmax(const Tensor& logits, const Matrix& mask);
Tensor log_softmax(const Tensor& logits);

}  // namespace dtar::nn
