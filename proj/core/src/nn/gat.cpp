#include "dtar/nn/gat.hpp"

#include <cmath>
#include <stdexcept>

namespace dtar::nn {

void GraphBatch::validate() const {
  if (src.size() != dst.size() || static_cast<Eigen::Index>(src.size()) != edge_features.rows()) {
    throw std::invalid_argument("GraphBatch: src, dst and edge_features must have one entry per edge");
  }
  std::vector<char> has_in(static_cast<std::size_t>(num_nodes), 0);
  for (std::size_t e = 0; e < src.size(); ++e) {
    if (src[e] < 0 || src[e] >= num_nodes || dst[e] < 0 || dst[e] >= num_nodes) {
      throw std::invalid_argument("GraphBatch: edge endpoint out of range");
    }
    has_in[static_cast<std::size_t>(dst[e])] = 1;
  }
  for (int v = 0; v < num_nodes; ++v) {
    if (!has_in[static_cast<std::size_t>(v)]) {
      throw std::invalid_argument("GraphBatch: node " + std::to_string(v) + " has no incoming edge");
    }
  }
}

GraphBatch build_graph(int num_nodes, std::span<const std::pair<int, int>> edges, const Matrix& edge_features,
                       bool self_loops) {
  if (static_cast<Eigen::Index>(edges.size()) != edge_features.rows()) {
    throw std::invalid_argument("build_graph: one feature row per edge required");
  }
  const Eigen::Index fdim = edge_features.cols();
  const std::size_t total = 2 * edges.size() + (self_loops ? static_cast<std::size_t>(num_nodes) : 0);
  GraphBatch g;
  g.num_nodes = num_nodes;
  g.src.reserve(total);
  g.dst.reserve(total);
  g.edge_features.resize(static_cast<Eigen::Index>(total), fdim);
  Eigen::Index row = 0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    g.src.push_back(a);
    g.dst.push_back(b);
    g.edge_features.row(row++) = edge_features.row(static_cast<Eigen::Index>(e));
    g.src.push_back(b);
    g.dst.push_back(a);
    g.edge_features.row(row++) = edge_features.row(static_cast<Eigen::Index>(e));
  }
  if (self_loops) {
    for (int v = 0; v < num_nodes; ++v) {
      g.src.push_back(v);
      g.dst.push_back(v);
      g.edge_features.row(row).setZero();
      if (fdim > 0) g.edge_features(row, 0) = 1.0;
      ++row;
    }
  }
  return g;
}

GraphBatch stack_graphs(std::span<const GraphBatch* const> graphs) {
  GraphBatch out;
  Eigen::Index edges = 0;
  Eigen::Index fdim = 0;
  for (const GraphBatch* g : graphs) {
    edges += g->num_edges();
    fdim = g->edge_features.cols();
  }
  out.src.reserve(static_cast<std::size_t>(edges));
  out.dst.reserve(static_cast<std::size_t>(edges));
  out.edge_features.resize(edges, fdim);
  Eigen::Index row = 0;
  for (const GraphBatch* g : graphs) {
    if (g->edge_features.cols() != fdim) throw std::invalid_argument("stack_graphs: edge feature width differs");
    for (std::size_t e = 0; e < g->src.size(); ++e) {
      out.src.push_back(g->src[e] + out.num_nodes);
      out.dst.push_back(g->dst[e] + out.num_nodes);
    }
    out.edge_features.middleRows(row, g->num_edges()) = g->edge_features;
    row += g->num_edges();
    out.num_nodes += g->num_nodes;
  }
  return out;
}

namespace {

Matrix uniform_limit(Eigen::Index rows, Eigen::Index cols, double limit, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = (2.0 * uniform01(rng) - 1.0) * limit;
  return m;
}

}  // namespace

GatLayer::GatLayer(int in_dim, int heads, int head_dim, int edge_dim, Rng& rng, bool use_layer_norm)
    : in_dim_(in_dim), heads_(heads), head_dim_(head_dim) {
  if (heads < 1 || head_dim < 1 || in_dim < 1 || edge_dim < 1) {
    throw std::invalid_argument("GatLayer: dimensions and head count must be positive");
  }
  const int out = heads * head_dim;
  w_node_ = Tensor::parameter(glorot_uniform(in_dim, out, rng));
  w_edge_ = Tensor::parameter(glorot_uniform(edge_dim, out, rng));
  // w_a has fan_in 3 d and a single output per head.
  const double att_limit = std::sqrt(6.0 / (3.0 * head_dim + 1.0));
  att_dst_ = Tensor::parameter(uniform_limit(heads, head_dim, att_limit, rng));
  att_src_ = Tensor::parameter(uniform_limit(heads, head_dim, att_limit, rng));
  att_edge_ = Tensor::parameter(uniform_limit(heads, head_dim, att_limit, rng));
  if (in_dim != out) residual_.emplace(in_dim, out, rng, false);
  if (use_layer_norm) norm_.emplace(out);
}

Tensor GatLayer::forward(const Tensor& x, const GraphBatch& g, Matrix* attention) const {
  if (x.rows() != g.num_nodes || x.cols() != in_dim_) throw std::invalid_argument("GatLayer: input shape mismatch");
  g.validate();
  Tensor z = matmul(x, w_node_);
  Tensor ze = matmul(Tensor::constant(g.edge_features), w_edge_);
  Tensor z_src = gather_rows(z, g.src);
  Tensor score = add(add(head_dot(gather_rows(z, g.dst), att_dst_), head_dot(z_src, att_src_)), head_dot(ze, att_edge_));
  Tensor alpha = segment_softmax(leaky_relu(score, 0.2), g.dst, g.num_nodes);
  if (attention != nullptr) *attention = alpha.value();
  Tensor agg = scatter_add_rows(head_scale(z_src, alpha), g.dst, g.num_nodes);
  Tensor h = elu(agg);
  h = add(h, residual_ ? residual_->forward(x) : x);
  return norm_ ? norm_->forward(h) : h;
}

void GatLayer::parameters(ParameterList& out, const std::string& prefix) const {
  out.push_back({prefix + ".w_node", w_node_});
  out.push_back({prefix + ".w_edge", w_edge_});
  out.push_back({prefix + ".att_dst", att_dst_});
  out.push_back({prefix + ".att_src", att_src_});
  out.push_back({prefix + ".att_edge", att_edge_});
  if (residual_) residual_->parameters(out, prefix + ".residual");
  if (norm_) norm_->parameters(out, prefix + ".norm");
}

GatEncoder::GatEncoder(int node_dim, int edge_dim, Rng& rng)
    : input_(node_dim, 64, rng), first_(64, 4, 16, edge_dim, rng), second_(64, 4, 8, edge_dim, rng) {}

Tensor GatEncoder::forward(const Tensor& node_features, const GraphBatch& g) const {
  Tensor h = elu(input_.forward(node_features));
  h = first_.forward(h, g);
  return second_.forward(h, g);
}

void GatEncoder::parameters(ParameterList& out, const std::string& prefix) const {
  input_.parameters(out, prefix + ".input");
  first_.parameters(out, prefix + ".gat0");
  second_.parameters(out, prefix + ".gat1");
}

MlpEncoder::MlpEncoder(int node_dim, Rng& rng) : mlp_({node_dim, 64, kEmbeddingDim}, Activation::kElu, rng) {}

Tensor MlpEncoder::forward(const Tensor& node_features, const GraphBatch&) const { return mlp_.forward(node_features); }

void MlpEncoder::parameters(ParameterList& out, const std::string& prefix) const { mlp_.parameters(out, prefix + ".mlp"); }

}  // namespace dtar::nn
