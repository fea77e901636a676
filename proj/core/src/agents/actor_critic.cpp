#include "dtar/agents/actor_critic.hpp"

#include <stdexcept>

#include "dtar/agents/observation.hpp"

namespace dtar::agents {

namespace {

std::unique_ptr<nn::Encoder> make_encoder(EncoderKind kind, Rng& rng) {
  if (kind == EncoderKind::kMlp) return std::make_unique<nn::MlpEncoder>(kNodeFeatureDim, rng);
  return std::make_unique<nn::GatEncoder>(kNodeFeatureDim, kEdgeFeatureDim, rng);
}

}  // namespace

ActorCritic::ActorCritic(int num_domains, EncoderKind encoder, Rng& rng)
    : num_domains_(num_domains), encoder_kind_(encoder), encoder_(make_encoder(encoder, rng)) {
  const int obs = observation_size(num_domains);
  policy_ = nn::Mlp({obs, 128, 128, num_domains}, nn::Activation::kTanh, rng);
  value_ = nn::Mlp({obs, 128, 128, 1}, nn::Activation::kTanh, rng);
}

ActorCritic::Output ActorCritic::forward(std::span<const GraphSnapshot* const> snapshots,
                                         std::span<const int> snapshot_index, std::span<const int> current,
                                         std::span<const int> dst, const nn::Matrix& aux,
                                         const nn::Matrix& mask) const {
  const auto b = snapshot_index.size();
  if (current.size() != b || dst.size() != b || static_cast<std::size_t>(aux.rows()) != b ||
      static_cast<std::size_t>(mask.rows()) != b) {
    throw std::invalid_argument("ActorCritic::forward: batch sizes disagree");
  }
  const int k = num_domains_;
  nn::Matrix feats(static_cast<Eigen::Index>(snapshots.size()) * k, kNodeFeatureDim);
  std::vector<const nn::GraphBatch*> graphs;
  graphs.reserve(snapshots.size());
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    feats.middleRows(static_cast<Eigen::Index>(i) * k, k) = snapshots[i]->node_features;
    graphs.push_back(&snapshots[i]->graph);
  }
  nn::GraphBatch batch = graphs.size() == 1 ? *graphs.front() : nn::stack_graphs(graphs);
  nn::Tensor emb = encoder_->forward(nn::Tensor::constant(std::move(feats)), batch);

  std::vector<int> cur_rows(b), dst_rows(b);
  for (std::size_t i = 0; i < b; ++i) {
    cur_rows[i] = snapshot_index[i] * k + current[i];
    dst_rows[i] = snapshot_index[i] * k + dst[i];
  }
  nn::Tensor obs =
      nn::concat_cols({nn::gather_rows(emb, cur_rows), nn::gather_rows(emb, dst_rows), nn::Tensor::constant(aux)});
  return Output{nn::masked_log_softmax(policy_.forward(obs), mask), value_.forward(obs)};
}

nn::Matrix ActorCritic::embed(const GraphSnapshot& snapshot) const {
  nn::NoGradGuard guard;
  return encoder_->forward(nn::Tensor::constant(snapshot.node_features), snapshot.graph).value();
}

std::pair<nn::RowVector, double> ActorCritic::heads(const nn::RowVector& observation) const {
  nn::NoGradGuard guard;
  nn::Tensor x = nn::Tensor::constant(nn::Matrix(observation));
  nn::RowVector logits = policy_.forward(x).value().row(0);
  const double v = value_.forward(x).value()(0, 0);
  return {std::move(logits), v};
}

nn::ParameterList ActorCritic::parameters() const {
  nn::ParameterList out;
  encoder_->parameters(out, "encoder");
  policy_.parameters(out, "policy");
  value_.parameters(out, "value");
  return out;
}

}  // namespace dtar::agents
