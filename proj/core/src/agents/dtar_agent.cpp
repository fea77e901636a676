#include "dtar/agents/dtar_agent.hpp"

#include <stdexcept>

#include "dtar/agents/observation.hpp"
#include "dtar/nn/checkpoint.hpp"
#include "dtar/nn/distributions.hpp"

namespace dtar::agents {

namespace {

EncoderKind encoder_for(AgentKind kind) {
  switch (kind) {
    case AgentKind::kDtar:
    case AgentKind::kDtarRandPart:
      return EncoderKind::kGat;
    case AgentKind::kDtarMlp:
      return EncoderKind::kMlp;
    default:
      throw std::invalid_argument("DtarAgent: unsupported kind " + to_string(kind));
  }
}

ActorCritic make_net(AgentKind kind, int k, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kInit);
  return ActorCritic(k, encoder_for(kind), rng);
}

}  // namespace

DtarAgent::DtarAgent(AgentKind kind, int num_domains, const PpoConfig& cfg, std::uint64_t seed)
    : kind_(kind),
      cfg_(cfg),
      seed_(seed),
      net_(make_net(kind, num_domains, seed)),
      adam_(nn::AdamConfig{cfg.lr}),
      buffer_(cfg.n_steps) {
  cfg_.validate();
}

const nn::Matrix& DtarAgent::embeddings(const GraphSnapshot& snap) {
  // Parameters only change inside update(), which bumps updates_.
  if (cached_ptr_ != &snap || cached_id_ != snap.id || cached_version_ != updates_) {
    cached_embeddings_ = net_.embed(snap);
    cached_ptr_ = &snap;
    cached_id_ = snap.id;
    cached_version_ = updates_;
  }
  return cached_embeddings_;
}

int DtarAgent::act(const DecisionState& s, Rng& rng) {
  if (training_ && buffer_.full()) {
    // Mid-flow boundary: bootstrap from the value of this state.
    const double v = net_.heads(build_observation(embeddings(*s.step->snapshot), s)).second;
    update(v);
  }
  const nn::RowVector obs = build_observation(embeddings(*s.step->snapshot), s);
  auto [logits, value] = net_.heads(obs);
  nn::MaskedCategorical dist(logits, s.mask);
  const int action = training_ ? dist.sample(rng) : dist.argmax();
  if (training_) {
    RolloutBuffer::Entry e;
    e.snapshot = s.step->snapshot;
    e.current = s.current;
    e.dst = s.dst;
    e.aux = obs.tail(aux_size(s.num_domains()));
    e.mask = s.mask;
    e.action = action;
    e.log_prob = dist.log_prob(action);
    e.value = value;
    buffer_.add(std::move(e));
    pending_ = true;
    ++timesteps_;
  }
  return action;
}

void DtarAgent::feedback(const Feedback& fb) {
  if (!training_ || !pending_) return;
  buffer_.back().reward = fb.reward;
  buffer_.back().done = fb.done;
  pending_ = false;
  if (fb.done && buffer_.full()) update(0.0);
}

PpoUpdateStats DtarAgent::update(double last_value) {
  if (buffer_.empty()) return {};
  buffer_.compute_gae(last_value, cfg_.gamma, cfg_.lambda);
  Rng rng = make_rng(seed_, Stream::kMinibatch, static_cast<std::uint64_t>(updates_));
  last_stats_ = ppo_update(net_, adam_, buffer_, cfg_, rng);
  buffer_.clear();
  ++updates_;
  return last_stats_;
}

void DtarAgent::save(const std::string& path) const {
  nn::save_checkpoint(path, to_string(kind_), net_.parameters(), &adam_,
                      {{"updates", std::to_string(updates_)}, {"timesteps", std::to_string(timesteps_)}});
}

void DtarAgent::load(const std::string& path) {
  nn::ParameterList params = net_.parameters();
  auto info = nn::load_checkpoint(path, params, &adam_, to_string(kind_));
  if (auto it = info.info.find("updates"); it != info.info.end()) updates_ = std::stoi(it->second);
  if (auto it = info.info.find("timesteps"); it != info.info.end()) timesteps_ = std::stoll(it->second);
  cached_version_ = -1;
}

}  // namespace dtar::agents
