#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtar/nn/matrix.hpp"

namespace dtar::nn {

/// Non-finite value reached the backward pass.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Node {
  Matrix value;
  Matrix grad;  // empty until something flows back
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  template <class Derived>
  void accumulate(const Eigen::MatrixBase<Derived>& g) {
    if (grad.size() == 0) {
      grad = g;
    } else {
      grad += g;
    }
  }
};

/// Handle to a node of the autodiff graph. Copies share the node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Matrix value, bool requires_grad = false);
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor parameter(Matrix value) { return Tensor(std::move(value), true); }
  static Tensor constant(Matrix value) { return Tensor(std::move(value), false); }
  static Tensor scalar(double v);

  bool defined() const { return static_cast<bool>(node_); }
  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  /// Zero matrix of the value's shape when no gradient has arrived.
  Matrix grad() const;
  bool has_grad() const { return node_->grad.size() != 0; }
  void zero_grad() { node_->grad.resize(0, 0); }
  bool requires_grad() const { return node_->requires_grad; }

  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  /// Value of a 1 x 1 tensor.
  double item() const;

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

/// Reverse-mode sweep from a scalar loss; gradients accumulate into every
/// reachable node that requires them. Throws NumericError when any value on
/// the graph is non-finite.
void backward(const Tensor& loss);

/// Disables graph recording on this thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

/// Builds an op node. Parents are recorded only when recording is enabled
/// and at least one parent requires a gradient.
Tensor make_op(const char* op, Matrix value, std::vector<Tensor> parents, std::function<void(Node&)> backward_fn);

}  // namespace dtar::nn
