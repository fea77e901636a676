#include "dtar/agents/qrlsn.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace dtar::agents {

void QrlsnConfig::validate() const {
  if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("qrlsn: alpha in (0, 1]");
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("qrlsn: gamma in [0, 1]");
  if (epsilon_end < 0.0 || epsilon_start > 1.0 || epsilon_end > epsilon_start) {
    throw std::invalid_argument("qrlsn: need 0 <= epsilon_end <= epsilon_start <= 1");
  }
  if (anneal_steps < 1) throw std::invalid_argument("qrlsn: anneal_steps >= 1");
}

QTable::QTable(int num_domains)
    : k_(num_domains), q_(static_cast<std::size_t>(num_domains) * num_domains * num_domains, 0.0) {}

int QTable::greedy(int c, int d, const ActionMask& mask) const {
  int best = -1;
  for (int a = 0; a < k_; ++a) {
    if (mask[static_cast<std::size_t>(a)] && (best < 0 || (*this)(c, d, a) > (*this)(c, d, best))) best = a;
  }
  return best;
}

double QTable::max_admitted(int c, int d, const ActionMask& mask) const {
  const int a = greedy(c, d, mask);
  return a < 0 ? 0.0 : (*this)(c, d, a);
}

void QTable::write(std::ostream& os) const {
  os << k_ << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < q_.size(); ++i) os << q_[i] << ((i + 1) % static_cast<std::size_t>(k_) ? ' ' : '\n');
}

QTable QTable::read(std::istream& is) {
  int k = 0;
  if (!(is >> k) || k < 1) throw std::runtime_error("Q table: bad header");
  QTable t(k);
  for (double& v : t.q_)
    if (!(is >> v)) throw std::runtime_error("Q table: truncated data");
  return t;
}

double q_target(const QTable& q, double reward, bool done, int next_current, int dst, const ActionMask& next_mask,
                double gamma) {
  if (done) return reward;
  return reward + gamma * q.max_admitted(next_current, dst, next_mask);
}

QrlsnAgent::QrlsnAgent(int num_domains, const QrlsnConfig& cfg) : cfg_(cfg), q_(num_domains) { cfg_.validate(); }

double QrlsnAgent::epsilon() const {
  const double frac = std::min(1.0, static_cast<double>(timesteps_) / static_cast<double>(cfg_.anneal_steps));
  return cfg_.epsilon_start + frac * (cfg_.epsilon_end - cfg_.epsilon_start);
}

int QrlsnAgent::act(const DecisionState& s, Rng& rng) {
  int a;
  if (training_ && uniform01(rng) < epsilon()) {
    std::vector<int> admitted;
    for (int k = 0; k < s.num_domains(); ++k)
      if (s.mask[static_cast<std::size_t>(k)]) admitted.push_back(k);
    if (admitted.empty()) throw nn::EmptyMaskError();
    a = admitted[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(admitted.size()) - 1))];
  } else {
    a = q_.greedy(s.current, s.dst, s.mask);
    if (a < 0) throw nn::EmptyMaskError();
  }
  if (training_) {
    last_c_ = s.current;
    last_d_ = s.dst;
    last_a_ = a;
    ++timesteps_;
  }
  return a;
}

void QrlsnAgent::feedback(const Feedback& fb) {
  if (!training_ || last_a_ < 0) return;
  const bool terminal = fb.done || fb.next == nullptr;
  const double target = terminal ? fb.reward
                                 : q_target(q_, fb.reward, false, fb.next->current, last_d_, fb.next->mask, cfg_.gamma);
  double& q = q_(last_c_, last_d_, last_a_);
  q += cfg_.alpha * (target - q);
  last_a_ = -1;
}

void QrlsnAgent::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write Q table '" + path + "'");
  q_.write(out);
}

void QrlsnAgent::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint not found: '" + path + "'");
  QTable t = QTable::read(in);
  if (t.num_domains() != q_.num_domains()) throw std::runtime_error("Q table size does not match K");
  q_ = std::move(t);
}

}  // namespace dtar::agents
