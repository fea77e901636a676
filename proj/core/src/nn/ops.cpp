#include "dtar/nn/ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dtar::nn {

namespace {

Node& parent(Node& self, std::size_t i) { return *self.parents[i]; }

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

std::vector<int> copy_indices(std::span<const int> idx, Eigen::Index bound, const char* op) {
  for (int i : idx) {
    if (i < 0 || i >= bound) throw std::out_of_range(std::string(op) + ": index out of range");
  }
  return {idx.begin(), idx.end()};
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  return make_op("matmul", a.value() * b.value(), {a, b}, [](Node& self) {
    Node& A = parent(self, 0);
    Node& B = parent(self, 1);
    if (A.requires_grad) A.accumulate(self.grad * B.value.transpose());
    if (B.requires_grad) B.accumulate(A.value.transpose() * self.grad);
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  return make_op("add", a.value() + b.value(), {a, b}, [](Node& self) {
    for (std::size_t i = 0; i < 2; ++i) {
      if (parent(self, i).requires_grad) parent(self, i).accumulate(self.grad);
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  return make_op("sub", a.value() - b.value(), {a, b}, [](Node& self) {
    if (parent(self, 0).requires_grad) parent(self, 0).accumulate(self.grad);
    if (parent(self, 1).requires_grad) parent(self, 1).accumulate(-self.grad);
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  return make_op("mul", a.value().cwiseProduct(b.value()), {a, b}, [](Node& self) {
    Node& A = parent(self, 0);
    Node& B = parent(self, 1);
    if (A.requires_grad) A.accumulate(self.grad.cwiseProduct(B.value));
    if (B.requires_grad) B.accumulate(self.grad.cwiseProduct(A.value));
  });
}

Tensor scale(const Tensor& a, double s) {
  return make_op("scale", a.value() * s, {a}, [s](Node& self) { parent(self, 0).accumulate(self.grad * s); });
}

Tensor add_scalar(const Tensor& a, double s) {
  Matrix v = a.value().array() + s;
  return make_op("add_scalar", std::move(v), {a}, [](Node& self) { parent(self, 0).accumulate(self.grad); });
}

Tensor add_row(const Tensor& a, const Tensor& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) throw std::invalid_argument("add_row: bad row shape");
  Matrix v = a.value().rowwise() + row.value().row(0);
  return make_op("add_row", std::move(v), {a, row}, [](Node& self) {
    if (parent(self, 0).requires_grad) parent(self, 0).accumulate(self.grad);
    if (parent(self, 1).requires_grad) parent(self, 1).accumulate(self.grad.colwise().sum());
  });
}

Tensor elu(const Tensor& a, double alpha) {
  Matrix v = a.value().unaryExpr([alpha](double x) { return x > 0.0 ? x : alpha * std::expm1(x); });
  return make_op("elu", std::move(v), {a}, [alpha](Node& self) {
    Node& A = parent(self, 0);
    Matrix d = A.value.unaryExpr([alpha](double x) { return x > 0.0 ? 1.0 : alpha * std::exp(x); });
    A.accumulate(self.grad.cwiseProduct(d));
  });
}

Tensor leaky_relu(const Tensor& a, double slope) {
  Matrix v = a.value().unaryExpr([slope](double x) { return x > 0.0 ? x : slope * x; });
  return make_op("leaky_relu", std::move(v), {a}, [slope](Node& self) {
    Node& A = parent(self, 0);
    Matrix d = A.value.unaryExpr([slope](double x) { return x > 0.0 ? 1.0 : slope; });
    A.accumulate(self.grad.cwiseProduct(d));
  });
}

Tensor tanh(const Tensor& a) {
  Matrix v = a.value().array().tanh();
  return make_op("tanh", std::move(v), {a}, [](Node& self) {
    Matrix d = 1.0 - self.value.array().square();
    parent(self, 0).accumulate(self.grad.cwiseProduct(d));
  });
}

Tensor exp(const Tensor& a) {
  Matrix v = a.value().array().exp();
  return make_op("exp", std::move(v), {a},
                 [](Node& self) { parent(self, 0).accumulate(self.grad.cwiseProduct(self.value)); });
}

Tensor log(const Tensor& a) {
  Matrix v = a.value().array().log();
  return make_op("log", std::move(v), {a}, [](Node& self) {
    Node& A = parent(self, 0);
    A.accumulate(self.grad.cwiseQuotient(A.value));
  });
}

Tensor square(const Tensor& a) {
  Matrix v = a.value().array().square();
  return make_op("square", std::move(v), {a}, [](Node& self) {
    Node& A = parent(self, 0);
    A.accumulate(2.0 * self.grad.cwiseProduct(A.value));
  });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("clamp: lo > hi");
  Matrix v = a.value().cwiseMax(lo).cwiseMin(hi);
  return make_op("clamp", std::move(v), {a}, [lo, hi](Node& self) {
    Node& A = parent(self, 0);
    Matrix d = A.value.unaryExpr([lo, hi](double x) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
    A.accumulate(self.grad.cwiseProduct(d));
  });
}

Tensor minimum(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "minimum");
  Matrix v = a.value().cwiseMin(b.value());
  return make_op("minimum", std::move(v), {a, b}, [](Node& self) {
    Node& A = parent(self, 0);
    Node& B = parent(self, 1);
    Matrix take_a = (A.value.array() <= B.value.array()).cast<double>();
    if (A.requires_grad) A.accumulate(self.grad.cwiseProduct(take_a));
    if (B.requires_grad) B.accumulate(self.grad.cwiseProduct((1.0 - take_a.array()).matrix()));
  });
}

Tensor sum(const Tensor& a) {
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  return make_op("sum", std::move(v), {a}, [](Node& self) {
    Node& A = parent(self, 0);
    A.accumulate(Matrix::Constant(A.value.rows(), A.value.cols(), self.grad(0, 0)));
  });
}

Tensor mean(const Tensor& a) {
  if (a.value().size() == 0) throw std::invalid_argument("mean: empty tensor");
  Matrix v(1, 1);
  v(0, 0) = a.value().mean();
  const double n = static_cast<double>(a.value().size());
  return make_op("mean", std::move(v), {a}, [n](Node& self) {
    Node& A = parent(self, 0);
    A.accumulate(Matrix::Constant(A.value.rows(), A.value.cols(), self.grad(0, 0) / n));
  });
}

Tensor row_sum(const Tensor& a) {
  Matrix v = a.value().rowwise().sum();
  return make_op("row_sum", std::move(v), {a}, [](Node& self) {
    Node& A = parent(self, 0);
    Matrix g = self.grad.replicate(1, A.value.cols());
    A.accumulate(g);
  });
}

Tensor gather_rows(const Tensor& a, std::span<const int> idx) {
  auto ids = copy_indices(idx, a.rows(), "gather_rows");
  Matrix v(static_cast<Eigen::Index>(ids.size()), a.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) v.row(static_cast<Eigen::Index>(i)) = a.value().row(ids[i]);
  return make_op("gather_rows", std::move(v), {a}, [ids = std::move(ids)](Node& self) {
    Node& A = parent(self, 0);
    Matrix g = Matrix::Zero(A.value.rows(), A.value.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) g.row(ids[i]) += self.grad.row(static_cast<Eigen::Index>(i));
    A.accumulate(g);
  });
}

Tensor scatter_add_rows(const Tensor& a, std::span<const int> idx, int out_rows) {
  if (static_cast<Eigen::Index>(idx.size()) != a.rows()) throw std::invalid_argument("scatter_add_rows: size");
  auto ids = copy_indices(idx, out_rows, "scatter_add_rows");
  Matrix v = Matrix::Zero(out_rows, a.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) v.row(ids[i]) += a.value().row(static_cast<Eigen::Index>(i));
  return make_op("scatter_add_rows", std::move(v), {a}, [ids = std::move(ids)](Node& self) {
    Node& A = parent(self, 0);
    Matrix g(A.value.rows(), A.value.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) g.row(static_cast<Eigen::Index>(i)) = self.grad.row(ids[i]);
    A.accumulate(g);
  });
}

Tensor pick(const Tensor& a, std::span<const int> idx) {
  if (static_cast<Eigen::Index>(idx.size()) != a.rows()) throw std::invalid_argument("pick: size");
  auto ids = copy_indices(idx, a.cols(), "pick");
  Matrix v(a.rows(), 1);
  for (Eigen::Index r = 0; r < a.rows(); ++r) v(r, 0) = a.value()(r, ids[static_cast<std::size_t>(r)]);
  return make_op("pick", std::move(v), {a}, [ids = std::move(ids)](Node& self) {
    Node& A = parent(self, 0);
    Matrix g = Matrix::Zero(A.value.rows(), A.value.cols());
    for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, ids[static_cast<std::size_t>(r)]) = self.grad(r, 0);
    A.accumulate(g);
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw std::invalid_argument("concat_cols: row mismatch");
    cols += p.cols();
  }
  Matrix v(rows, cols);
  std::vector<Eigen::Index> offsets;
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    offsets.push_back(off);
    v.middleCols(off, p.cols()) = p.value();
    off += p.cols();
  }
  return make_op("concat_cols", std::move(v), parts, [offsets = std::move(offsets)](Node& self) {
    for (std::size_t i = 0; i < self.parents.size(); ++i) {
      Node& P = *self.parents[i];
      if (P.requires_grad) P.accumulate(self.grad.middleCols(offsets[i], P.value.cols()));
    }
  });
}

Tensor head_dot(const Tensor& z, const Tensor& att) {
  const Eigen::Index heads = att.rows();
  const Eigen::Index d = att.cols();
  if (z.cols() != heads * d) throw std::invalid_argument("head_dot: width must equal heads * head_dim");
  Matrix v(z.rows(), heads);
  for (Eigen::Index h = 0; h < heads; ++h) {
    v.col(h) = z.value().middleCols(h * d, d) * att.value().row(h).transpose();
  }
  return make_op("head_dot", std::move(v), {z, att}, [heads, d](Node& self) {
    Node& Z = parent(self, 0);
    Node& A = parent(self, 1);
    if (Z.requires_grad) {
      Matrix g(Z.value.rows(), Z.value.cols());
      for (Eigen::Index h = 0; h < heads; ++h) g.middleCols(h * d, d) = self.grad.col(h) * A.value.row(h);
      Z.accumulate(g);
    }
    if (A.requires_grad) {
      Matrix g(heads, d);
      for (Eigen::Index h = 0; h < heads; ++h) {
        g.row(h) = self.grad.col(h).transpose() * Z.value.middleCols(h * d, d);
      }
      A.accumulate(g);
    }
  });
}

Tensor head_scale(const Tensor& m, const Tensor& alpha) {
  const Eigen::Index heads = alpha.cols();
  if (alpha.rows() != m.rows() || heads == 0 || m.cols() % heads != 0) {
    throw std::invalid_argument("head_scale: shape mismatch");
  }
  const Eigen::Index d = m.cols() / heads;
  Matrix v(m.rows(), m.cols());
  for (Eigen::Index h = 0; h < heads; ++h) {
    v.middleCols(h * d, d) = m.value().middleCols(h * d, d).array().colwise() * alpha.value().col(h).array();
  }
  return make_op("head_scale", std::move(v), {m, alpha}, [heads, d](Node& self) {
    Node& M = parent(self, 0);
    Node& A = parent(self, 1);
    if (M.requires_grad) {
      Matrix g(M.value.rows(), M.value.cols());
      for (Eigen::Index h = 0; h < heads; ++h) {
        g.middleCols(h * d, d) = self.grad.middleCols(h * d, d).array().colwise() * A.value.col(h).array();
      }
      M.accumulate(g);
    }
    if (A.requires_grad) {
      Matrix g(A.value.rows(), heads);
      for (Eigen::Index h = 0; h < heads; ++h) {
        g.col(h) = self.grad.middleCols(h * d, d).cwiseProduct(M.value.middleCols(h * d, d)).rowwise().sum();
      }
      A.accumulate(g);
    }
  });
}

Tensor segment_softmax(const Tensor& scores, std::span<const int> segment, int num_segments) {
  if (static_cast<Eigen::Index>(segment.size()) != scores.rows()) {
    throw std::invalid_argument("segment_softmax: one segment id per row required");
  }
  auto seg = copy_indices(segment, num_segments, "segment_softmax");
  const Eigen::Index cols = scores.cols();
  Matrix mx = Matrix::Constant(num_segments, cols, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < seg.size(); ++i) {
    mx.row(seg[i]) = mx.row(seg[i]).cwiseMax(scores.value().row(static_cast<Eigen::Index>(i)));
  }
  Matrix v(scores.rows(), cols);
  Matrix denom = Matrix::Zero(num_segments, cols);
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    v.row(r) = (scores.value().row(r) - mx.row(seg[i])).array().exp();
    denom.row(seg[i]) += v.row(r);
  }
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    v.row(r) = v.row(r).cwiseQuotient(denom.row(seg[i]));
  }
  return make_op("segment_softmax", std::move(v), {scores},
                 [seg = std::move(seg), num_segments](Node& self) {
                   // ds_i = a_i (g_i - sum_{j in seg(i)} a_j g_j)
                   Matrix dot = Matrix::Zero(num_segments, self.value.cols());
                   Matrix ag = self.value.cwiseProduct(self.grad);
                   for (std::size_t i = 0; i < seg.size(); ++i) dot.row(seg[i]) += ag.row(static_cast<Eigen::Index>(i));
                   Matrix g(self.value.rows(), self.value.cols());
                   for (std::size_t i = 0; i < seg.size(); ++i) {
                     const auto r = static_cast<Eigen::Index>(i);
                     g.row(r) = self.value.row(r).cwiseProduct(self.grad.row(r) - dot.row(seg[i]));
                   }
                   parent(self, 0).accumulate(g);
                 });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  const Eigen::Index c = x.cols();
  if (gamma.rows() != 1 || gamma.cols() != c || beta.rows() != 1 || beta.cols() != c) {
    throw std::invalid_argument("layer_norm: scale/shift must be 1 x C");
  }
  Eigen::VectorXd mu = x.value().rowwise().mean();
  Matrix centered = x.value().colwise() - mu;
  Eigen::VectorXd inv_std =
      ((centered.array().square().rowwise().sum() / static_cast<double>(c)) + eps).sqrt().inverse();
  Matrix xhat = centered.array().colwise() * inv_std.array();
  Matrix v = (xhat.array().rowwise() * gamma.value().row(0).array()).rowwise() + beta.value().row(0).array();
  return make_op("layer_norm", std::move(v), {x, gamma, beta},
                 [xhat = std::move(xhat), inv_std = std::move(inv_std), c](Node& self) {
                   Node& X = parent(self, 0);
                   Node& G = parent(self, 1);
                   Node& B = parent(self, 2);
                   if (G.requires_grad) G.accumulate(self.grad.cwiseProduct(xhat).colwise().sum());
                   if (B.requires_grad) B.accumulate(self.grad.colwise().sum());
                   if (X.requires_grad) {
                     Matrix dxhat = self.grad.array().rowwise() * G.value.row(0).array();
                     const double n = static_cast<double>(c);
                     Eigen::VectorXd m1 = dxhat.rowwise().sum() / n;
                     Eigen::VectorXd m2 = dxhat.cwiseProduct(xhat).rowwise().sum() / n;
                     Matrix dx = dxhat.colwise() - m1;
                     dx -= (xhat.array().colwise() * m2.array()).matrix();
                     dx = dx.array().colwise() * inv_std.array();
                     X.accumulate(dx);
                   }
                 });
}

namespace {

Tensor log_softmax_impl(const Tensor& logits, const Matrix* mask, const char* op) {
  Matrix z = logits.value();
  if (mask != nullptr) {
    if (mask->rows() != z.rows() || mask->cols() != z.cols()) {
      throw std::invalid_argument("masked_log_softmax: mask shape mismatch");
    }
    z = (mask->array() > 0.5).select(z, kMaskedLogit);
  }
  Eigen::VectorXd mx = z.rowwise().maxCoeff();
  Matrix shifted = z.colwise() - mx;
  Eigen::VectorXd lse = shifted.array().exp().rowwise().sum().log();
  Matrix v = shifted.colwise() - lse;
  Matrix keep = mask != nullptr ? Matrix((mask->array() > 0.5).cast<double>()) : Matrix();
  return make_op(op, std::move(v), {logits}, [keep = std::move(keep)](Node& self) {
    Matrix p = self.value.array().exp();
    Eigen::VectorXd gs = self.grad.rowwise().sum();
    Matrix dz = self.grad - Matrix(p.array().colwise() * gs.array());
    if (keep.size() != 0) dz = dz.cwiseProduct(keep);
    parent(self, 0).accumulate(dz);
  });
}

}  // namespace

Tensor masked_log_softmax(const Tensor& logits, const Matrix& mask) {
  return log_softmax_impl(logits, &mask, "masked_log_softmax");
}

Tensor log_softmax(const Tensor& logits) { return log_softmax_impl(logits, nullptr, "log_softmax"); }

}  // namespace dtar::nn
