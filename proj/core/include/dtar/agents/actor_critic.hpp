#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "dtar/agents/agent.hpp"
#include "dtar/nn/gat.hpp"
#include "dtar/nn/layers.hpp"

namespace dtar::agents {

enum class EncoderKind { kGat, kMlp };

/// Encoder plus policy and value heads (obs -> 128 -> 128 -> K / 1, tanh).
class ActorCritic {
 public:
  ActorCritic(int num_domains, EncoderKind encoder, Rng& rng);

  struct Output {
    nn::Tensor log_probs;  // B x K, masked
    nn::Tensor values;     // B x 1
  };

  /// Batched forward. Sample b uses snapshot snapshots[snapshot_index[b]];
  /// each distinct snapshot is encoded once.
  Output forward(std::span<const GraphSnapshot* const> snapshots, std::span<const int> snapshot_index,
                 std::span<const int> current, std::span<const int> dst, const nn::Matrix& aux,
                 const nn::Matrix& mask) const;

  /// K x 32 embeddings without recording a graph.
  nn::Matrix embed(const GraphSnapshot& snapshot) const;

  /// Raw policy logits and value for one observation.
  std::pair<nn::RowVector, double> heads(const nn::RowVector& observation) const;

  nn::ParameterList parameters() const;
  int num_domains() const { return num_domains_; }
  EncoderKind encoder_kind() const { return encoder_kind_; }

 private:
  int num_domains_;
  EncoderKind encoder_kind_;
  std::unique_ptr<nn::Encoder> encoder_;
  nn::Mlp policy_;
  nn::Mlp value_;
};

}  // namespace dtar::agents
