#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dtar/nn/layers.hpp"

namespace dtar::nn {

/// Directed edge list with per-edge features. Several graphs can be
/// stacked into one block-diagonal batch.
struct GraphBatch {
  int num_nodes = 0;
  std::vector<int> src;
  std::vector<int> dst;
  Matrix edge_features;  // one row per directed edge

  int num_edges() const { return static_cast<int>(src.size()); }
  /// Throws std::invalid_argument when some node has no incoming edge or the
  /// arrays disagree in length.
  void validate() const;
};

/// Both directions of every undirected edge (sharing its feature row), then
/// one self-loop per node whose feature is (1, 0, ..., 0).
GraphBatch build_graph(int num_nodes, std::span<const std::pair<int, int>> edges, const Matrix& edge_features,
                       bool self_loops = true);

/// Block-diagonal union; node ids of graph b are offset by the node counts
/// of graphs 0..b-1.
GraphBatch stack_graphs(std::span<const GraphBatch* const> graphs);

/// Edge-featured multi-head attention layer with head concatenation, ELU,
/// residual connection and LayerNorm.
class GatLayer {
 public:
  GatLayer() = default;
  GatLayer(int in_dim, int heads, int head_dim, int edge_dim, Rng& rng, bool use_layer_norm = true);

  /// attention, when non-null, receives the E x H coefficients.
  Tensor forward(const Tensor& x, const GraphBatch& g, Matrix* attention = nullptr) const;
  void parameters(ParameterList& out, const std::string& prefix) const;

  int out_dim() const { return heads_ * head_dim_; }
  Tensor& node_weight() { return w_node_; }
  Tensor& edge_weight() { return w_edge_; }
  Tensor& att_dst() { return att_dst_; }
  Tensor& att_src() { return att_src_; }
  Tensor& att_edge() { return att_edge_; }
  bool has_residual_projection() const { return residual_.has_value(); }

 private:
  int in_dim_ = 0;
  int heads_ = 1;
  int head_dim_ = 1;
  Tensor w_node_;
  Tensor w_edge_;
  Tensor att_dst_;
  Tensor att_src_;
  Tensor att_edge_;
  std::optional<Linear> residual_;
  std::optional<LayerNorm> norm_;
};

/// Maps K x 6 domain features to K x out_dim embeddings.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual Tensor forward(const Tensor& node_features, const GraphBatch& g) const = 0;
  virtual void parameters(ParameterList& out, const std::string& prefix) const = 0;
  virtual int out_dim() const = 0;
};

/// Linear 6 -> 64 with ELU, GAT 64 -> 64 (4 x 16), GAT 64 -> 32 (4 x 8).
class GatEncoder final : public Encoder {
 public:
  GatEncoder(int node_dim, int edge_dim, Rng& rng);

  Tensor forward(const Tensor& node_features, const GraphBatch& g) const override;
  void parameters(ParameterList& out, const std::string& prefix) const override;
  int out_dim() const override { return second_.out_dim(); }

 private:
  Linear input_;
  GatLayer first_;
  GatLayer second_;
};

/// Per-domain MLP 6 -> 64 -> 32 without message passing.
class MlpEncoder final : public Encoder {
 public:
  MlpEncoder(int node_dim, Rng& rng);

  Tensor forward(const Tensor& node_features, const GraphBatch& g) const override;
  void parameters(ParameterList& out, const std::string& prefix) const override;
  int out_dim() const override { return mlp_.out_dim(); }

 private:
  Mlp mlp_;
};

inline constexpr int kEmbeddingDim = 32;

}  // namespace dtar::nn
