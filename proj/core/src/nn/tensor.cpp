#include "dtar/nn/tensor.hpp"

#include <string>
#include <unordered_set>
#include <utility>

namespace dtar::nn {

namespace {
thread_local bool g_grad_enabled = true;
}

Tensor::Tensor(Matrix value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::scalar(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return Tensor(std::move(m));
}

Matrix Tensor::grad() const {
  if (node_->grad.size() == 0) return Matrix::Zero(rows(), cols());
  return node_->grad;
}

double Tensor::item() const {
  if (rows() != 1 || cols() != 1) throw std::logic_error("Tensor::item on non-scalar");
  return node_->value(0, 0);
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool grad_enabled() { return g_grad_enabled; }

Tensor make_op(const char* op, Matrix value, std::vector<Tensor> parents, std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->op = op;
  bool needs = false;
  if (g_grad_enabled) {
    for (const auto& p : parents) needs = needs || p.requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (auto& p : parents) node->parents.push_back(p.node());
    node->backward_fn = std::move(backward_fn);
  }
  return Tensor(std::move(node));
}

void backward(const Tensor& loss) {
  if (!loss.defined()) throw std::logic_error("backward: undefined loss");
  if (loss.rows() != 1 || loss.cols() != 1) throw std::logic_error("backward: loss must be a scalar");

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* n : order) {
    if (!n->value.allFinite()) {
      throw NumericError(std::string("non-finite value produced by op '") + n->op + "'");
    }
  }

  Node& root = *loss.node();
  if (!root.requires_grad) return;
  root.accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (!n->backward_fn || n->grad.size() == 0) continue;
    n->backward_fn(*n);
  }
}

}  // namespace dtar::nn
