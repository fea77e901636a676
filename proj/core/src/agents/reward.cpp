#include "dtar/agents/reward.hpp"

#include <stdexcept>

namespace dtar::agents {

void RewardConfig::validate() const {
  if (direction < 0.0 || hop_penalty < 0.0 || arrival < 0.0 || failure < 0.0) {
    throw std::invalid_argument("reward coefficients must be non-negative");
  }
}

double step_reward(int d_before, int d_after, int hops, StepOutcome outcome, const RewardConfig& cfg,
                   bool action_taken) {
  if (!action_taken) return outcome == StepOutcome::kFailed ? -cfg.failure : 0.0;
  double r = cfg.direction * static_cast<double>(d_before - d_after) - cfg.hop_penalty;
  if (outcome == StepOutcome::kArrived) r += cfg.arrival - cfg.hop_penalty * hops;
  if (outcome == StepOutcome::kFailed) r -= cfg.failure;
  return r;
}

}  // namespace dtar::agents
