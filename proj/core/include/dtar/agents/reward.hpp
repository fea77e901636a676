#pragma once

namespace dtar::agents {

struct RewardConfig {
  double direction = 1.0;     // delta
  double hop_penalty = 0.05;  // beta
  double arrival = 5.0;       // r_s
  double failure = 5.0;       // r_f

  void validate() const;
};

enum class StepOutcome { kStep, kArrived, kFailed };

/// Reward of one hop c -> c'. d_before = d(c, dst), d_after = d(c', dst);
/// hops is the hop count including this hop. A failure with no action
/// taken yields -r_f alone.
double step_reward(int d_before, int d_after, int hops, StepOutcome outcome, const RewardConfig& cfg,
                   bool action_taken = true);

}  // namespace dtar::agents
