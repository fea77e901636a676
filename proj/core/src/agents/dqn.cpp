#include "dtar/agents/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dtar/agents/observation.hpp"
#include "dtar/nn/checkpoint.hpp"
#include "dtar/nn/distributions.hpp"

namespace dtar::agents {

void DqnConfig::validate() const {
  if (replay_capacity < 1 || batch_size < 1 || target_sync < 1 || train_freq < 1 || learning_starts < 0) {
    throw std::invalid_argument("dqn: counts must be positive");
  }
  if (gamma < 0.0 || gamma > 1.0 || lr <= 0.0) throw std::invalid_argument("dqn: gamma in [0, 1], lr > 0");
  if (epsilon_end < 0.0 || epsilon_start > 1.0 || epsilon_end > epsilon_start || anneal_steps < 1) {
    throw std::invalid_argument("dqn: bad epsilon schedule");
  }
}

double td_target(double reward, bool done, const nn::RowVector& target_q, const ActionMask& next_mask, double gamma) {
  if (done) return reward;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < target_q.size(); ++a)
    if (next_mask[static_cast<std::size_t>(a)]) best = std::max(best, target_q(a));
  if (!std::isfinite(best)) return reward;
  return reward + gamma * best;
}

nn::Tensor dqn_loss(const nn::Mlp& q, const nn::Mlp& target, const std::vector<const DqnTransition*>& batch,
                    double gamma) {
  const auto b = static_cast<Eigen::Index>(batch.size());
  if (b == 0) throw std::invalid_argument("dqn_loss: empty batch");
  const Eigen::Index d = batch.front()->obs.size();
  nn::Matrix obs(b, d), next(b, d), y(b, 1);
  std::vector<int> actions(static_cast<std::size_t>(b));
  for (Eigen::Index i = 0; i < b; ++i) {
    const auto& t = *batch[static_cast<std::size_t>(i)];
    obs.row(i) = t.obs;
    next.row(i) = t.next_obs;
    actions[static_cast<std::size_t>(i)] = t.action;
  }
  nn::Matrix next_q;
  {
    nn::NoGradGuard guard;
    next_q = target.forward(nn::Tensor::constant(next)).value();
  }
  for (Eigen::Index i = 0; i < b; ++i) {
    const auto& t = *batch[static_cast<std::size_t>(i)];
    y(i, 0) = td_target(t.reward, t.done, next_q.row(i), t.next_mask, gamma);
  }
  nn::Tensor pred = nn::pick(q.forward(nn::Tensor::constant(obs)), actions);
  return nn::mean(nn::square(nn::sub(pred, nn::Tensor::constant(y))));
}

namespace {

nn::Mlp make_q(int k, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kInit);
  return nn::Mlp({observation_size(k), 128, 128, k}, nn::Activation::kTanh, rng);
}

}  // namespace

CdparAgent::CdparAgent(int num_domains, const DqnConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      seed_(seed),
      q_(make_q(num_domains, seed)),
      target_(make_q(num_domains, seed)),
      adam_(nn::AdamConfig{cfg.lr}),
      replay_rng_(make_rng(seed, Stream::kMinibatch)) {
  cfg_.validate();
  sync_target();
}

double CdparAgent::epsilon() const {
  const double frac = std::min(1.0, static_cast<double>(timesteps_) / static_cast<double>(cfg_.anneal_steps));
  return cfg_.epsilon_start + frac * (cfg_.epsilon_end - cfg_.epsilon_start);
}

void CdparAgent::sync_target() {
  nn::ParameterList src, dst;
  q_.parameters(src, "q");
  target_.parameters(dst, "q");
  for (std::size_t i = 0; i < src.size(); ++i) dst[i].tensor.mutable_value() = src[i].tensor.value();
}

int CdparAgent::act(const DecisionState& s, Rng& rng) {
  const nn::RowVector obs = static_observation(s);
  int a = -1;
  if (training_ && uniform01(rng) < epsilon()) {
    std::vector<int> admitted;
    for (int k = 0; k < s.num_domains(); ++k)
      if (s.mask[static_cast<std::size_t>(k)]) admitted.push_back(k);
    if (admitted.empty()) throw nn::EmptyMaskError();
    a = admitted[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(admitted.size()) - 1))];
  } else {
    nn::NoGradGuard guard;
    const nn::Matrix qv = q_.forward(nn::Tensor::constant(nn::Matrix(obs))).value();
    for (int k = 0; k < s.num_domains(); ++k) {
      if (s.mask[static_cast<std::size_t>(k)] && (a < 0 || qv(0, k) > qv(0, a))) a = k;
    }
    if (a < 0) throw nn::EmptyMaskError();
  }
  if (training_) {
    last_obs_ = obs;
    last_action_ = a;
    pending_ = true;
    ++timesteps_;
  }
  return a;
}

void CdparAgent::feedback(const Feedback& fb) {
  if (!training_ || !pending_) return;
  pending_ = false;
  DqnTransition t;
  t.obs = last_obs_;
  t.action = last_action_;
  t.reward = fb.reward;
  t.done = fb.done || fb.next == nullptr;
  if (!t.done) {
    t.next_obs = static_observation(*fb.next);
    t.next_mask = fb.next->mask;
  } else {
    t.next_obs = nn::RowVector::Zero(last_obs_.size());
  }
  replay_.push_back(std::move(t));
  if (static_cast<int>(replay_.size()) > cfg_.replay_capacity) replay_.pop_front();

  if (timesteps_ >= cfg_.learning_starts && timesteps_ % cfg_.train_freq == 0 &&
      static_cast<int>(replay_.size()) >= cfg_.batch_size) {
    train_step();
  }
  if (timesteps_ % cfg_.target_sync == 0) sync_target();
}

void CdparAgent::train_step() {
  std::vector<const DqnTransition*> batch;
  batch.reserve(static_cast<std::size_t>(cfg_.batch_size));
  const int n = static_cast<int>(replay_.size());
  for (int i = 0; i < cfg_.batch_size; ++i) batch.push_back(&replay_[static_cast<std::size_t>(uniform_int(replay_rng_, 0, n - 1))]);
  nn::ParameterList params;
  q_.parameters(params, "q");
  nn::zero_grads(params);
  nn::Tensor loss = dqn_loss(q_, target_, batch, cfg_.gamma);
  if (!std::isfinite(loss.item())) throw nn::NumericError("non-finite DQN loss");
  nn::backward(loss);
  nn::clip_grad_norm(params, cfg_.max_grad_norm);
  adam_.step(params);
  ++gradient_steps_;
}

void CdparAgent::save(const std::string& path) const {
  nn::ParameterList params;
  q_.parameters(params, "q");
  nn::save_checkpoint(path, to_string(kind()), params, &adam_, {{"timesteps", std::to_string(timesteps_)}});
}

void CdparAgent::load(const std::string& path) {
  nn::ParameterList params;
  q_.parameters(params, "q");
  auto info = nn::load_checkpoint(path, params, &adam_, to_string(kind()));
  if (auto it = info.info.find("timesteps"); it != info.info.end()) timesteps_ = std::stoll(it->second);
  sync_target();
}

}  // namespace dtar::agents
