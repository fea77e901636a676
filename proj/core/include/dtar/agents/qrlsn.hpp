#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dtar/agents/agent.hpp"
#include "dtar/nn/distributions.hpp"

namespace dtar::agents {

struct QrlsnConfig {
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  /// Steps over which epsilon decays linearly; set to the training budget.
  long long anneal_steps = 200000;

  void validate() const;
};

/// Dense Q[current][dst][action].
class QTable {
 public:
  explicit QTable(int num_domains = 0);
  int num_domains() const { return k_; }
  double& operator()(int c, int d, int a) { return q_[index(c, d, a)]; }
  double operator()(int c, int d, int a) const { return q_[index(c, d, a)]; }
  const std::vector<double>& data() const { return q_; }

  /// Highest-valued admitted action, lowest id on ties; -1 if none admitted.
  int greedy(int c, int d, const ActionMask& mask) const;
  /// Max over admitted actions; 0 if none admitted.
  double max_admitted(int c, int d, const ActionMask& mask) const;

  /// Text: "K" on the first line, then K^3 values in index order.
  void write(std::ostream& os) const;
  static QTable read(std::istream& is);

 private:
  std::size_t index(int c, int d, int a) const {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(d)) *
               static_cast<std::size_t>(k_) +
           static_cast<std::size_t>(a);
  }
  int k_;
  std::vector<double> q_;
};

/// Bellman target r + gamma * max_admitted Q[c', d, .], or r when terminal.
double q_target(const QTable& q, double reward, bool done, int next_current, int dst, const ActionMask& next_mask,
                double gamma);

/// Tabular Q-learning with state (current, dst).
class QrlsnAgent final : public RoutingAgent {
 public:
  QrlsnAgent(int num_domains, const QrlsnConfig& cfg);

  AgentKind kind() const override { return AgentKind::kQrlsn; }
  int act(const DecisionState& s, Rng& rng) override;
  void feedback(const Feedback& fb) override;

  double epsilon() const;
  QTable& table() { return q_; }

  void save(const std::string& path) const override;
  void load(const std::string& path) override;

 private:
  QrlsnConfig cfg_;
  QTable q_;
  int last_c_ = -1;
  int last_d_ = -1;
  int last_a_ = -1;
};

}  // namespace dtar::agents
