#include "dtar/agents/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "dtar/nn/distributions.hpp"

namespace dtar::agents {

void PpoConfig::validate() const {
  if (n_steps < 1 || batch_size < 1 || epochs < 0) throw std::invalid_argument("ppo: counts must be positive");
  if (lr <= 0.0 || clip <= 0.0 || max_grad_norm <= 0.0) throw std::invalid_argument("ppo: lr, clip, grad norm > 0");
  if (gamma < 0.0 || gamma > 1.0 || lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("ppo: gamma, lambda");
  if (entropy_coef < 0.0 || value_coef < 0.0) throw std::invalid_argument("ppo: coefficients must be >= 0");
}

GaeResult gae(std::span<const double> rewards, std::span<const double> values, std::span<const bool> dones,
              double last_value, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) throw std::invalid_argument("gae: length mismatch");
  GaeResult out{std::vector<double>(n), std::vector<double>(n)};
  double next_adv = 0.0;
  double next_value = last_value;
  for (std::size_t i = n; i-- > 0;) {
    const double live = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * next_value * live - values[i];
    next_adv = delta + gamma * lambda * live * next_adv;
    out.advantages[i] = next_adv;
    out.returns[i] = next_adv + values[i];
    next_value = values[i];
  }
  return out;
}

void RolloutBuffer::clear() {
  entries_.clear();
  adv_.clear();
  ret_.clear();
}

void RolloutBuffer::compute_gae(double last_value, double gamma, double lambda) {
  std::vector<double> r, v;
  r.reserve(size());
  v.reserve(size());
  for (const auto& e : entries_) {
    r.push_back(e.reward);
    v.push_back(e.value);
  }
  std::unique_ptr<bool[]> dones(new bool[size()]);
  for (std::size_t i = 0; i < size(); ++i) dones[i] = entries_[i].done;
  auto res = gae(r, v, std::span<const bool>(dones.get(), size()), last_value, gamma, lambda);
  adv_ = std::move(res.advantages);
  ret_ = std::move(res.returns);
}

std::vector<double> normalize_advantages(std::span<const double> adv) {
  if (adv.empty()) return {};
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::max(std::sqrt(var / n), 1e-8);
  std::vector<double> out(adv.size());
  for (std::size_t i = 0; i < adv.size(); ++i) out[i] = (adv[i] - mean) / sd;
  return out;
}

nn::Tensor ppo_loss(const ActorCritic& net, const RolloutBuffer& buffer, std::span<const int> indices,
                    std::span<const double> advantages, const PpoConfig& cfg, PpoLossStats* stats) {
  const auto b = static_cast<Eigen::Index>(indices.size());
  if (b == 0) throw std::invalid_argument("ppo_loss: empty minibatch");
  if (buffer.returns().size() != buffer.size()) throw std::logic_error("ppo_loss: compute_gae has not run");
  const int k = net.num_domains();

  std::vector<const GraphSnapshot*> snaps;
  std::unordered_map<const GraphSnapshot*, int> slot;
  std::vector<int> snap_idx, cur, dst, actions;
  nn::Matrix aux(b, buffer.at(static_cast<std::size_t>(indices[0])).aux.size());
  nn::Matrix mask(b, k);
  nn::Matrix old_logp(b, 1), adv(b, 1), ret(b, 1);
  for (Eigen::Index r = 0; r < b; ++r) {
    const auto i = static_cast<std::size_t>(indices[static_cast<std::size_t>(r)]);
    const auto& e = buffer.at(i);
    auto [it, inserted] = slot.try_emplace(e.snapshot.get(), static_cast<int>(snaps.size()));
    if (inserted) snaps.push_back(e.snapshot.get());
    snap_idx.push_back(it->second);
    cur.push_back(e.current);
    dst.push_back(e.dst);
    actions.push_back(e.action);
    aux.row(r) = e.aux;
    for (int a = 0; a < k; ++a) mask(r, a) = e.mask[static_cast<std::size_t>(a)] ? 1.0 : 0.0;
    old_logp(r, 0) = e.log_prob;
    adv(r, 0) = advantages[i];
    ret(r, 0) = buffer.returns()[i];
  }

  auto out = net.forward(snaps, snap_idx, cur, dst, aux, mask);
  nn::Tensor logp = nn::pick(out.log_probs, actions);
  nn::Tensor ratio = nn::exp(nn::sub(logp, nn::Tensor::constant(old_logp)));
  nn::Tensor a = nn::Tensor::constant(adv);
  nn::Tensor surr = nn::minimum(nn::mul(ratio, a), nn::mul(nn::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip), a));
  nn::Tensor policy_loss = nn::scale(nn::mean(surr), -1.0);
  nn::Tensor value_loss = nn::mean(nn::square(nn::sub(out.values, nn::Tensor::constant(ret))));
  // Masked entries carry exp(-1e9) = 0 probability, so they add nothing.
  nn::Tensor entropy = nn::scale(nn::mean(nn::row_sum(nn::mul(nn::exp(out.log_probs), out.log_probs))), -1.0);
  nn::Tensor total =
      nn::sub(nn::add(policy_loss, nn::scale(value_loss, cfg.value_coef)), nn::scale(entropy, cfg.entropy_coef));

  if (stats != nullptr) {
    stats->policy_loss = policy_loss.item();
    stats->value_loss = value_loss.item();
    stats->entropy = entropy.item();
    stats->total = total.item();
    const auto& rv = ratio.value();
    stats->clip_fraction =
        static_cast<double>(((rv.array() - 1.0).abs() > cfg.clip).count()) / static_cast<double>(b);
  }
  return total;
}

PpoUpdateStats ppo_update(ActorCritic& net, nn::Adam& adam, const RolloutBuffer& buffer, const PpoConfig& cfg,
                          Rng& rng) {
  if (buffer.advantages().size() != buffer.size()) throw std::logic_error("ppo_update: compute_gae first");
  PpoUpdateStats st;
  if (buffer.empty()) return st;
  const std::vector<double> adv = normalize_advantages(buffer.advantages());
  nn::ParameterList params = net.parameters();
  std::vector<int> order(buffer.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(i) - 1))]);
    }
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::span<const int> idx(order.data() + start, end - start);
      nn::zero_grads(params);
      PpoLossStats ls;
      nn::Tensor loss = ppo_loss(net, buffer, idx, adv, cfg, &ls);
      if (!std::isfinite(ls.total)) throw nn::NumericError("non-finite PPO loss");
      nn::backward(loss);
      nn::clip_grad_norm(params, cfg.max_grad_norm);
      adam.step(params);
      st.last = ls;
      st.mean_policy_loss += ls.policy_loss;
      st.mean_value_loss += ls.value_loss;
      st.mean_entropy += ls.entropy;
      ++st.minibatches;
    }
  }
  if (st.minibatches > 0) {
    st.mean_policy_loss /= st.minibatches;
    st.mean_value_loss /= st.minibatches;
    st.mean_entropy /= st.minibatches;
  }
  return st;
}

}  // namespace dtar::agents
