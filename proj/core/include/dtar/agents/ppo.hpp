#pragma once

#include <memory>
#include <span>
#include <vector>

#include "dtar/agents/actor_critic.hpp"
#include "dtar/nn/adam.hpp"

namespace dtar::agents {

struct PpoConfig {
  int n_steps = 2048;
  int batch_size = 256;
  int epochs = 10;
  double lr = 3e-4;
  double entropy_coef = 0.03;
  double value_coef = 0.5;
  double clip = 0.2;
  double gamma = 0.99;
  double lambda = 0.95;
  double max_grad_norm = 0.5;

  void validate() const;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// delta_t = r_t + gamma V_{t+1} (1 - done_t) - V_t,
/// A_t = delta_t + gamma lambda (1 - done_t) A_{t+1}; V_T = last_value.
GaeResult gae(std::span<const double> rewards, std::span<const double> values, std::span<const bool> dones,
              double last_value, double gamma, double lambda);

/// Transitions gathered between two updates.
class RolloutBuffer {
 public:
  explicit RolloutBuffer(int capacity = 2048) : capacity_(capacity) {}

  struct Entry {
    std::shared_ptr<const GraphSnapshot> snapshot;
    int current = 0;
    int dst = 0;
    nn::RowVector aux;
    std::vector<bool> mask;
    int action = 0;
    double log_prob = 0.0;
    double value = 0.0;
    double reward = 0.0;
    bool done = false;
  };

  void add(Entry e) { entries_.push_back(std::move(e)); }
  Entry& back() { return entries_.back(); }
  const Entry& at(std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool full() const { return static_cast<int>(entries_.size()) >= capacity_; }
  int capacity() const { return capacity_; }
  void clear();

  /// Fills advantages and returns.
  void compute_gae(double last_value, double gamma, double lambda);
  const std::vector<double>& advantages() const { return adv_; }
  const std::vector<double>& returns() const { return ret_; }

 private:
  int capacity_;
  std::vector<Entry> entries_;
  std::vector<double> adv_;
  std::vector<double> ret_;
};

struct PpoLossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double total = 0.0;
  double clip_fraction = 0.0;
};

/// Clipped surrogate + value_coef * MSE - entropy_coef * entropy over the
/// given buffer indices; advantages are indexed like the buffer.
nn::Tensor ppo_loss(const ActorCritic& net, const RolloutBuffer& buffer, std::span<const int> indices,
                    std::span<const double> advantages, const PpoConfig& cfg, PpoLossStats* stats = nullptr);

struct PpoUpdateStats {
  PpoLossStats last;
  double mean_policy_loss = 0.0;
  double mean_value_loss = 0.0;
  double mean_entropy = 0.0;
  int minibatches = 0;
};

/// E epochs over shuffled minibatches with advantage normalisation,
/// global gradient-norm clipping and Adam. Requires compute_gae first.
/// Throws nn::NumericError on a non-finite loss.
PpoUpdateStats ppo_update(ActorCritic& net, nn::Adam& adam, const RolloutBuffer& buffer, const PpoConfig& cfg,
                          Rng& rng);

/// Mean 0, population std 1 (std floored at 1e-8).
std::vector<double> normalize_advantages(std::span<const double> adv);

}  // namespace dtar::agents
