#include "dtar/agents/observation.hpp"

#include <algorithm>
#include <stdexcept>

namespace dtar::agents {

nn::RowVector observation_aux(const DecisionState& s) {
  const int k = s.num_domains();
  const auto kd = static_cast<double>(k);
  nn::RowVector v(aux_size(k));
  v(0) = s.current / kd;
  v(1) = s.dst / kd;
  v(2) = s.h_max > 0 ? static_cast<double>(s.hops_taken) / s.h_max : 0.0;
  for (int d = 0; d < k; ++d) v(3 + d) = -1.0;
  for (const auto& nb : s.step->dg->neighbors(s.current)) {
    const int dist = (*s.dist_to_dst)[static_cast<std::size_t>(nb.domain)];
    if (dist != kUnreachable) v(3 + nb.domain) = dist / kd;
  }
  const int g = 3 + k;
  v(g) = static_cast<double>(s.step->t) / s.step->steps_per_episode;
  v(g + 1) = std::min(s.step->cv, 2.0) / 2.0;
  v(g + 2) = s.step->surge ? 1.0 : 0.0;
  v(g + 3) = s.step->any_fault ? 1.0 : 0.0;
  return v;
}

nn::RowVector build_observation(const nn::Matrix& embeddings, const DecisionState& s) {
  const int k = s.num_domains();
  if (embeddings.rows() != k || embeddings.cols() != nn::kEmbeddingDim) {
    throw std::invalid_argument("build_observation: embeddings must be K x 32");
  }
  nn::RowVector v(observation_size(k));
  v.segment(0, nn::kEmbeddingDim) = embeddings.row(s.current);
  v.segment(nn::kEmbeddingDim, nn::kEmbeddingDim) = embeddings.row(s.dst);
  v.tail(aux_size(k)) = observation_aux(s);
  return v;
}

nn::RowVector static_observation(const DecisionState& s) {
  const int k = s.num_domains();
  nn::RowVector v = nn::RowVector::Zero(observation_size(k));
  const nn::Matrix& f = s.step->snapshot->node_features;
  v(0) = f(s.current, 0);
  v(1) = f(s.current, 2);
  v(nn::kEmbeddingDim) = f(s.dst, 0);
  v(nn::kEmbeddingDim + 1) = f(s.dst, 2);
  nn::RowVector aux = observation_aux(s);
  const int g = 3 + k;
  aux(g + 1) = 0.0;
  aux(g + 2) = 0.0;
  aux(g + 3) = 0.0;
  v.tail(aux_size(k)) = aux;
  return v;
}

}  // namespace dtar::agents
