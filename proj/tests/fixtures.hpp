#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dtar/agents/actor_critic.hpp"
#include "dtar/agents/observation.hpp"
#include "dtar/agents/ppo.hpp"
#include "dtar/domain_state.hpp"
#include "dtar/nn/gat.hpp"
#include "dtar/nn/layers.hpp"
#include "support.hpp"

namespace dtar::fixture {

inline nn::Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  nn::Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = scale * (2.0 * uniform01(rng) - 1.0);
  return m;
}

/// Random connected K-domain snapshot with random node and edge features.
inline std::shared_ptr<agents::GraphSnapshot> random_snapshot(int k, Rng& rng, std::uint64_t id = 1) {
  auto edges = random_connected_edges(k, 0.4, rng);
  auto snap = std::make_shared<agents::GraphSnapshot>();
  snap->id = id;
  snap->node_features = random_matrix(k, kNodeFeatureDim, rng);
  const nn::Matrix ef = random_matrix(static_cast<Eigen::Index>(edges.size()), kEdgeFeatureDim, rng);
  snap->graph = nn::build_graph(k, edges, ef);
  return snap;
}

/// Buffer of random transitions over a few snapshots, with stored
/// log-probabilities spread so the ratios land on both sides of the clip range.
inline agents::RolloutBuffer random_buffer(const agents::ActorCritic& net, int k, int n, Rng& rng) {
  std::vector<std::shared_ptr<agents::GraphSnapshot>> snaps;
  for (int s = 0; s < 3; ++s) snaps.push_back(random_snapshot(k, rng, static_cast<std::uint64_t>(s + 1)));
  agents::RolloutBuffer buf(n);
  for (int i = 0; i < n; ++i) {
    agents::RolloutBuffer::Entry e;
    e.snapshot = snaps[static_cast<std::size_t>(i) % snaps.size()];
    e.current = uniform_int(rng, 0, k - 1);
    e.dst = uniform_int(rng, 0, k - 1);
    e.aux = random_matrix(1, agents::aux_size(k), rng);
    e.mask.assign(static_cast<std::size_t>(k), false);
    for (int a = 0; a < k; ++a) e.mask[static_cast<std::size_t>(a)] = uniform01(rng) < 0.6;
    const int forced = uniform_int(rng, 0, k - 1);
    e.mask[static_cast<std::size_t>(forced)] = true;
    do {
      e.action = uniform_int(rng, 0, k - 1);
    } while (!e.mask[static_cast<std::size_t>(e.action)]);
    e.reward = 2.0 * uniform01(rng) - 1.0;
    e.done = uniform01(rng) < 0.3;
    buf.add(std::move(e));
  }
  // stored log-probs: current policy shifted by up to +-0.5
  std::vector<const agents::GraphSnapshot*> ptrs;
  std::vector<int> idx;
  std::vector<int> cur, dst;
  nn::Matrix aux(n, agents::aux_size(k)), mask(n, k);
  for (int i = 0; i < n; ++i) {
    const auto& e = buf.at(static_cast<std::size_t>(i));
    ptrs.push_back(e.snapshot.get());
    idx.push_back(i);
    cur.push_back(e.current);
    dst.push_back(e.dst);
    aux.row(i) = e.aux;
    mask.row(i) = nn::mask_row(e.mask);
  }
  nn::NoGradGuard guard;
  const auto out = net.forward(ptrs, idx, cur, dst, aux, mask);
  agents::RolloutBuffer shifted(n);
  for (int i = 0; i < n; ++i) {
    auto e = buf.at(static_cast<std::size_t>(i));
    e.log_prob = out.log_probs.value()(i, e.action) + (uniform01(rng) - 0.5);
    e.value = out.values.value()(i, 0) + 0.3 * (2.0 * uniform01(rng) - 1.0);
    shifted.add(std::move(e));
  }
  shifted.compute_gae(0.0, 0.99, 0.95);
  return shifted;
}

struct GradCheck {
  double max_rel = 0.0;
  std::size_t checked = 0;
  std::string worst;
};

/// Relative error |a - n| / max(|a|, |n|, floor) of analytic against
/// central-difference gradients. stride > 1 checks every stride-th entry.
inline GradCheck gradcheck(const nn::ParameterList& params, const std::function<nn::Tensor()>& loss_fn,
                           double h = 1e-5, int stride = 1, double floor = 1e-6) {
  nn::ParameterList ps = params;
  nn::zero_grads(ps);
  nn::backward(loss_fn());
  GradCheck out;
  for (auto& p : ps) {
    const nn::Matrix analytic = p.tensor.grad();
    nn::Matrix& v = p.tensor.mutable_value();
    for (Eigen::Index k = 0; k < v.size(); k += stride) {
      double& x = v.data()[k];
      const double x0 = x;
      double fp = 0.0, fm = 0.0;
      {
        nn::NoGradGuard g;
        x = x0 + h;
        fp = loss_fn().item();
        x = x0 - h;
        fm = loss_fn().item();
      }
      x = x0;
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic.data()[k];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      ++out.checked;
      if (rel > out.max_rel) {
        out.max_rel = rel;
        out.worst = p.name + "[" + std::to_string(k) + "] analytic " + std::to_string(a) + " numeric " +
                    std::to_string(numeric);
      }
    }
  }
  nn::zero_grads(ps);
  return out;
}

}  // namespace dtar::fixture
