#pragma once

#include "dtar/agents/agent.hpp"
#include "dtar/nn/matrix.hpp"

namespace dtar::agents {

/// 32 + 32 embedding entries, 3 flow-state, K distance, 4 global.
inline int observation_size(int num_domains) { return 2 * nn::kEmbeddingDim + 3 + num_domains + 4; }
inline int aux_size(int num_domains) { return 3 + num_domains + 4; }

/// Non-embedding tail of the observation: flow state, distance vector,
/// global state. The distance entry of a non-adjacent (or cut-off) domain
/// is -1.
nn::RowVector observation_aux(const DecisionState& s);

/// Full observation from K x 32 embeddings.
nn::RowVector build_observation(const nn::Matrix& embeddings, const DecisionState& s);

/// Observation without live load, fault or surge information: the
/// embedding slots carry (n_k, c_k) of the current and destination domains
/// followed by zeros, and only the time entry of the global block is kept.
nn::RowVector static_observation(const DecisionState& s);

}  // namespace dtar::agents
