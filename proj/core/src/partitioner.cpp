#include "dtar/partitioner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <string>

namespace dtar {

void Nsga2Config::validate(int num_sats, int num_domains) const {
  if (population < 4 || population % 2 != 0) throw std::invalid_argument("nsga2: population must be even and >= 4");
  if (generations < 0) throw std::invalid_argument("nsga2: generations must be >= 0");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) throw std::invalid_argument("nsga2: crossover_prob");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) throw std::invalid_argument("nsga2: mutation_prob");
  if (tournament_size < 1) throw std::invalid_argument("nsga2: tournament_size must be >= 1");
  if (num_domains < 1 || num_domains > num_sats) throw std::invalid_argument("nsga2: need 1 <= K <= N");
  const auto b = effective_bounds(num_sats, num_domains);
  if (b.min_size < 1 || b.min_size > b.max_size) throw std::invalid_argument("nsga2: invalid size bounds");
  if (static_cast<long long>(b.min_size) * num_domains > num_sats ||
      static_cast<long long>(b.max_size) * num_domains < num_sats)
    throw std::invalid_argument("nsga2: size bounds infeasible for N and K");
}

SizeBounds Nsga2Config::effective_bounds(int num_sats, int num_domains) const {
  if (bounds.min_size > 0 && bounds.max_size > 0) return bounds;
  return default_size_bounds(num_sats, num_domains);
}

double idtr(const DomainPartition& part, const TrafficMatrix& t) {
  const int n = t.size();
  double intra = 0.0;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const int li = part.label(i);
    for (int j = 0; j < n; ++j) {
      const double v = t(i, j);
      total += v;
      if (part.label(j) == li) intra += v;
    }
  }
  if (!(total > 0.0)) throw std::invalid_argument("idtr: total traffic is zero");
  return intra / total;
}

double population_std(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n);
}

double load_deviation(const DomainPartition& part, const TrafficMatrix& t) {
  const auto loads = domain_loads(t, part);
  return population_std(loads);
}

bool dominates(const Objectives& a, const Objectives& b) {
  const bool no_worse = a.idtr >= b.idtr && a.sigma_l <= b.sigma_l;
  const bool better = a.idtr > b.idtr || a.sigma_l < b.sigma_l;
  return no_worse && better;
}

std::vector<std::vector<int>> nondominated_sort(std::span<const Objectives> objs) {
  const int n = static_cast<int>(objs.size());
  std::vector<std::vector<int>> dominated(static_cast<std::size_t>(n));
  std::vector<int> counter(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> fronts;
  std::vector<int> current;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(objs[static_cast<std::size_t>(p)], objs[static_cast<std::size_t>(q)])) {
        dominated[static_cast<std::size_t>(p)].push_back(q);
      } else if (dominates(objs[static_cast<std::size_t>(q)], objs[static_cast<std::size_t>(p)])) {
        ++counter[static_cast<std::size_t>(p)];
      }
    }
    if (counter[static_cast<std::size_t>(p)] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    std::vector<int> next;
    for (int p : current) {
      for (int q : dominated[static_cast<std::size_t>(p)]) {
        if (--counter[static_cast<std::size_t>(q)] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const Objectives> front) {
  const std::size_t n = front.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), kInf);
    return dist;
  }
  std::vector<std::size_t> order(n);
  auto accumulate_axis = [&](auto key) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(front[a]) < key(front[b]); });
    dist[order.front()] = kInf;
    dist[order.back()] = kInf;
    const double range = key(front[order.back()]) - key(front[order.front()]);
    if (!(range > 0.0)) return;
    for (std::size_t r = 1; r + 1 < n; ++r) {
      dist[order[r]] += (key(front[order[r + 1]]) - key(front[order[r - 1]])) / range;
    }
  };
  accumulate_axis([](const Objectives& o) { return o.idtr; });
  accumulate_axis([](const Objectives& o) { return o.sigma_l; });
  return dist;
}

std::pair<std::vector<int>, std::vector<int>> crossover_at(const std::vector<int>& p1, const std::vector<int>& p2,
                                                           int cut) {
  if (p1.size() != p2.size()) throw std::invalid_argument("crossover: parent length mismatch");
  const auto k = static_cast<std::size_t>(std::clamp(cut, 0, static_cast<int>(p1.size())));
  std::vector<int> c1(p1.begin(), p1.begin() + static_cast<std::ptrdiff_t>(k));
  c1.insert(c1.end(), p2.begin() + static_cast<std::ptrdiff_t>(k), p2.end());
  std::vector<int> c2(p2.begin(), p2.begin() + static_cast<std::ptrdiff_t>(k));
  c2.insert(c2.end(), p1.begin() + static_cast<std::ptrdiff_t>(k), p1.end());
  return {std::move(c1), std::move(c2)};
}

std::pair<std::vector<int>, std::vector<int>> crossover(const std::vector<int>& p1, const std::vector<int>& p2,
                                                        Rng& rng) {
  const int n = static_cast<int>(p1.size());
  if (n < 2) return {p1, p2};
  return crossover_at(p1, p2, uniform_int(rng, 1, n - 1));
}

MutationMode draw_mutation_mode(Rng& rng) {
  const double u = uniform01(rng);
  if (u < 0.60) return MutationMode::kIntraOrbit;
  if (u < 0.80) return MutationMode::kTrafficAware;
  return MutationMode::kBoundary;
}

bool is_border_node(const SatGraph& g, std::span<const int> labels, int sat) {
  const int own = labels[static_cast<std::size_t>(sat)];
  for (int v : g.neighbors(sat))
    if (labels[static_cast<std::size_t>(v)] != own) return true;
  return false;
}

std::vector<int> mutate_intra_orbit(const std::vector<int>& labels, const SatGraph& g, Rng& rng) {
  std::vector<int> out = labels;
  const int i = uniform_int(rng, 0, g.size() - 1);
  const SatNode& n = g.node(i);
  const int s = g.sats_per_plane();
  const int step = uniform_int(rng, 0, 1) == 0 ? 1 : s - 1;
  const int nb = g.index_of(n.plane, (n.slot + step) % s);
  out[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(nb)];
  return out;
}

std::vector<int> mutate_traffic_aware(const std::vector<int>& labels, int num_domains, const SatGraph& g,
                                      std::span<const double> node_loads) {
  std::vector<double> loads(static_cast<std::size_t>(num_domains), 0.0);
  for (int i = 0; i < g.size(); ++i)
    loads[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += node_loads[static_cast<std::size_t>(i)];
  const int hi = static_cast<int>(std::max_element(loads.begin(), loads.end()) - loads.begin());
  const int lo = static_cast<int>(std::min_element(loads.begin(), loads.end()) - loads.begin());
  if (hi == lo) return labels;

  const double sigma_before = population_std(loads);
  double best_sigma = std::numeric_limits<double>::infinity();
  int best_node = -1;
  for (int i = 0; i < g.size(); ++i) {
    if (labels[static_cast<std::size_t>(i)] != hi) continue;
    bool touches_lo = false;
    for (int v : g.neighbors(i)) touches_lo = touches_lo || labels[static_cast<std::size_t>(v)] == lo;
    if (!touches_lo) continue;
    const double r = node_loads[static_cast<std::size_t>(i)];
    loads[static_cast<std::size_t>(hi)] -= r;
    loads[static_cast<std::size_t>(lo)] += r;
    const double s = population_std(loads);
    loads[static_cast<std::size_t>(hi)] += r;
    loads[static_cast<std::size_t>(lo)] -= r;
    if (s < best_sigma) {
      best_sigma = s;
      best_node = i;
    }
  }
  if (best_node < 0 || best_sigma > sigma_before) return labels;
  std::vector<int> out = labels;
  out[static_cast<std::size_t>(best_node)] = lo;
  return out;
}

std::vector<int> mutate_boundary(const std::vector<int>& labels, const SatGraph& g, Rng& rng) {
  std::vector<int> border;
  for (int i = 0; i < g.size(); ++i)
    if (is_border_node(g, labels, i)) border.push_back(i);
  if (border.empty()) return labels;
  const int i = border[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(border.size()) - 1))];
  std::vector<int> targets;
  for (int v : g.neighbors(i)) {
    const int l = labels[static_cast<std::size_t>(v)];
    if (l != labels[static_cast<std::size_t>(i)]) targets.push_back(l);
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  std::vector<int> out = labels;
  out[static_cast<std::size_t>(i)] = targets[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(targets.size()) - 1))];
  return out;
}

MutationResult mutate(const DomainPartition& part, const SatGraph& g, std::span<const double> node_loads,
                      const SizeBounds& bounds, Rng& rng) {
  MutationResult res;
  res.mode = draw_mutation_mode(rng);
  std::vector<int> labels;
  switch (res.mode) {
    case MutationMode::kIntraOrbit:
      labels = mutate_intra_orbit(part.labels(), g, rng);
      break;
    case MutationMode::kTrafficAware:
      labels = mutate_traffic_aware(part.labels(), part.num_domains(), g, node_loads);
      break;
    case MutationMode::kBoundary:
      labels = mutate_boundary(part.labels(), g, rng);
      break;
  }
  res.partition = repair(DomainPartition(part.num_domains(), std::move(labels)), g, bounds);
  return res;
}

// ---------------------------------------------------------------------------
// Repair

namespace {

class Repairer {
 public:
  Repairer(const SatGraph& g, int k, SizeBounds bounds, std::vector<int> labels)
      : g_(g), k_(k), bounds_(bounds), labels_(std::move(labels)), budget_(10 * g.size()) {
    sizes_.assign(static_cast<std::size_t>(k_), 0);
    for (int l : labels_) ++sizes_[static_cast<std::size_t>(l)];
  }

  std::vector<int> run() {
    revive_empty();
    if (valid()) return std::move(labels_);
    enforce_upper();
    enforce_lower(false);
    restore_connectivity();
    enforce_lower(true);
    while (!valid()) {
      const int before = moves_;
      enforce_upper();
      restore_connectivity();
      enforce_lower(false);
      restore_connectivity();
      enforce_lower(true);
      restore_connectivity();
      if (moves_ == before) throw RepairError("repair: no progress toward a feasible partition");
    }
    return std::move(labels_);
  }

 private:
  int label(int i) const { return labels_[static_cast<std::size_t>(i)]; }
  int size(int d) const { return sizes_[static_cast<std::size_t>(d)]; }

  void move(int sat, int to) {
    if (++moves_ > budget_) throw RepairError("repair: migration budget exhausted");
    --sizes_[static_cast<std::size_t>(label(sat))];
    ++sizes_[static_cast<std::size_t>(to)];
    labels_[static_cast<std::size_t>(sat)] = to;
  }

  bool valid() const {
    for (int d = 0; d < k_; ++d) {
      if (size(d) < bounds_.min_size || size(d) > bounds_.max_size) return false;
      if (!domain_connected(g_, labels_, d)) return false;
    }
    return true;
  }

  bool touches(int sat, int domain) const {
    for (int v : g_.neighbors(sat))
      if (label(v) == domain) return true;
    return false;
  }

  // Removing sat splits its domain (or would empty it).
  bool is_cut(int sat) const {
    const int d = label(sat);
    const int remaining = size(d) - 1;
    if (remaining <= 0) return true;
    int start = -1;
    for (int v : g_.neighbors(sat)) {
      if (label(v) == d) {
        start = v;
        break;
      }
    }
    if (start < 0) {
      // sat is an isolated fragment; the rest must already be connected
      for (int i = 0; i < g_.size() && start < 0; ++i)
        if (i != sat && label(i) == d) start = i;
    }
    std::vector<char> seen(labels_.size(), 0);
    seen[static_cast<std::size_t>(sat)] = 1;
    seen[static_cast<std::size_t>(start)] = 1;
    std::queue<int> q;
    q.push(start);
    int reached = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : g_.neighbors(u)) {
        if (!seen[static_cast<std::size_t>(v)] && label(v) == d) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++reached;
          q.push(v);
        }
      }
    }
    return reached != remaining;
  }

  std::vector<std::vector<int>> components(int d) const {
    std::vector<std::vector<int>> comps;
    std::vector<char> seen(labels_.size(), 0);
    for (int s = 0; s < g_.size(); ++s) {
      if (label(s) != d || seen[static_cast<std::size_t>(s)]) continue;
      std::vector<int> comp{s};
      seen[static_cast<std::size_t>(s)] = 1;
      for (std::size_t h = 0; h < comp.size(); ++h) {
        for (int v : g_.neighbors(comp[h])) {
          if (!seen[static_cast<std::size_t>(v)] && label(v) == d) {
            seen[static_cast<std::size_t>(v)] = 1;
            comp.push_back(v);
          }
        }
      }
      comps.push_back(std::move(comp));
    }
    return comps;
  }

  // Prefers candidates whose removal keeps their donor connected.
  int pick_non_cut(const std::vector<int>& ordered) const {
    for (int c : ordered)
      if (!is_cut(c)) return c;
    return ordered.empty() ? -1 : ordered.front();
  }

  // Stage 1: carve a connected chunk out of the largest domain.
  void revive_empty() {
    for (int e = 0; e < k_; ++e) {
      if (size(e) > 0) continue;
      const int big = static_cast<int>(std::max_element(sizes_.begin(), sizes_.end()) - sizes_.begin());
      const int want = std::min(bounds_.min_size, size(big) - 1);
      if (want < 1) throw RepairError("repair: not enough satellites to revive an empty domain");
      int seed = -1;
      for (int i = 0; i < g_.size() && seed < 0; ++i)
        if (label(i) == big && is_border_node(g_, labels_, i)) seed = i;
      for (int i = 0; i < g_.size() && seed < 0; ++i)
        if (label(i) == big) seed = i;
      std::vector<int> chunk{seed};
      std::vector<char> seen(labels_.size(), 0);
      seen[static_cast<std::size_t>(seed)] = 1;
      for (std::size_t h = 0; h < chunk.size() && static_cast<int>(chunk.size()) < want; ++h) {
        for (int v : g_.neighbors(chunk[h])) {
          if (static_cast<int>(chunk.size()) >= want) break;
          if (!seen[static_cast<std::size_t>(v)] && label(v) == big) {
            seen[static_cast<std::size_t>(v)] = 1;
            chunk.push_back(v);
          }
        }
      }
      for (int s : chunk) move(s, e);
    }
  }

  // Stage 2: shed boundary nodes of oversized domains.
  void enforce_upper() {
    for (;;) {
      int over = -1;
      for (int d = 0; d < k_ && over < 0; ++d)
        if (size(d) > bounds_.max_size) over = d;
      if (over < 0) return;

      // (target size, sat) for moves into domains with spare capacity
      std::vector<std::pair<int, int>> spare;
      std::vector<std::pair<int, int>> any;
      for (int i = 0; i < g_.size(); ++i) {
        if (label(i) != over) continue;
        int best_spare = -1;
        int best_any = -1;
        for (int v : g_.neighbors(i)) {
          const int l = label(v);
          if (l == over) continue;
          if (size(l) < bounds_.max_size && (best_spare < 0 || size(l) < size(best_spare))) best_spare = l;
          if (best_any < 0 || size(l) < size(best_any)) best_any = l;
        }
        if (best_spare >= 0) spare.emplace_back(size(best_spare), i);
        if (best_any >= 0) any.emplace_back(size(best_any), i);
      }
      auto& pool = spare.empty() ? any : spare;
      if (pool.empty()) throw RepairError("repair: oversized domain has no boundary");
      std::stable_sort(pool.begin(), pool.end());
      std::vector<int> ordered;
      for (const auto& [sz, i] : pool) ordered.push_back(i);
      const int sat = pick_non_cut(ordered);
      int target = -1;
      for (int v : g_.neighbors(sat)) {
        const int l = label(v);
        if (l == over) continue;
        const bool ok = spare.empty() || size(l) < bounds_.max_size;
        if (ok && (target < 0 || size(l) < size(target) || (size(l) == size(target) && l < target))) target = l;
      }
      move(sat, target);
    }
  }

  // Stages 3 and 5: grow undersized domains from neighbours larger than n_min.
  // With relax, a donor two domain-hops away passes a node through an intermediate.
  void enforce_lower(bool relax) {
    for (;;) {
      int under = -1;
      for (int d = 0; d < k_ && under < 0; ++d)
        if (size(d) < bounds_.min_size) under = d;
      if (under < 0) return;
      if (pull_direct(under)) continue;
      if (relax && pull_two_hop(under)) continue;
      return;
    }
  }

  bool pull_direct(int under) {
    std::vector<std::pair<int, int>> cand;  // (-donor size, sat)
    for (int i = 0; i < g_.size(); ++i) {
      const int l = label(i);
      if (l == under || size(l) <= bounds_.min_size) continue;
      if (touches(i, under)) cand.emplace_back(-size(l), i);
    }
    if (cand.empty()) return false;
    std::stable_sort(cand.begin(), cand.end());
    std::vector<int> ordered;
    for (const auto& [neg, i] : cand) ordered.push_back(i);
    move(pick_non_cut(ordered), under);
    return true;
  }

  bool pull_two_hop(int under) {
    for (int x = 0; x < g_.size(); ++x) {
      const int mid = label(x);
      if (mid == under || !touches(x, under) || is_cut(x)) continue;
      // Tentatively hand x over, then look for a donor refilling mid.
      labels_[static_cast<std::size_t>(x)] = under;
      --sizes_[static_cast<std::size_t>(mid)];
      ++sizes_[static_cast<std::size_t>(under)];
      int donor_sat = -1;
      for (int y = 0; y < g_.size() && donor_sat < 0; ++y) {
        const int l = label(y);
        if (l == mid || l == under || size(l) <= bounds_.min_size) continue;
        if (touches(y, mid) && !is_cut(y)) donor_sat = y;
      }
      labels_[static_cast<std::size_t>(x)] = mid;
      ++sizes_[static_cast<std::size_t>(mid)];
      --sizes_[static_cast<std::size_t>(under)];
      if (donor_sat < 0) continue;
      move(x, under);
      move(donor_sat, mid);
      return true;
    }
    return false;
  }

  // Stage 4: every non-largest component joins the neighbouring domain
  // that owns most of its outside neighbours.
  void restore_connectivity() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int d = 0; d < k_; ++d) {
        auto comps = components(d);
        if (comps.size() <= 1) continue;
        std::size_t keep = 0;
        for (std::size_t c = 1; c < comps.size(); ++c)
          if (comps[c].size() > comps[keep].size()) keep = c;
        for (std::size_t c = 0; c < comps.size(); ++c) {
          if (c == keep) continue;
          std::vector<int> votes(static_cast<std::size_t>(k_), 0);
          for (int s : comps[c])
            for (int v : g_.neighbors(s))
              if (label(v) != d) ++votes[static_cast<std::size_t>(label(v))];
          int target = -1;
          for (int l = 0; l < k_; ++l) {
            if (votes[static_cast<std::size_t>(l)] == 0) continue;
            if (target < 0 || votes[static_cast<std::size_t>(l)] > votes[static_cast<std::size_t>(target)] ||
                (votes[static_cast<std::size_t>(l)] == votes[static_cast<std::size_t>(target)] &&
                 size(l) < size(target))) {
              target = l;
            }
          }
          if (target < 0) throw RepairError("repair: isolated component with no neighbouring domain");
          for (int s : comps[c]) move(s, target);
        }
        changed = true;
        break;
      }
    }
  }

  const SatGraph& g_;
  int k_;
  SizeBounds bounds_;
  std::vector<int> labels_;
  std::vector<int> sizes_;
  int budget_;
  int moves_ = 0;
};

}  // namespace

DomainPartition repair(const DomainPartition& part, const SatGraph& g, const SizeBounds& bounds) {
  const int k = part.num_domains();
  if (part.num_sats() != g.size()) throw std::invalid_argument("repair: label vector length mismatch");
  for (int l : part.labels())
    if (l < 0 || l >= k) throw std::invalid_argument("repair: label out of range");
  if (static_cast<long long>(bounds.min_size) * k > g.size() || static_cast<long long>(bounds.max_size) * k < g.size())
    throw RepairError("repair: size bounds infeasible for N and K");
  Repairer r(g, k, bounds, part.labels());
  return DomainPartition(k, r.run());
}

// ---------------------------------------------------------------------------
// Selection and the evolutionary loop

std::size_t select_final_index(std::span<const Individual> front) {
  if (front.empty()) throw std::invalid_argument("select_final: empty front");
  double imin = front[0].obj.idtr, imax = imin, smin = front[0].obj.sigma_l, smax = smin;
  for (const auto& ind : front) {
    imin = std::min(imin, ind.obj.idtr);
    imax = std::max(imax, ind.obj.idtr);
    smin = std::min(smin, ind.obj.sigma_l);
    smax = std::max(smax, ind.obj.sigma_l);
  }
  auto norm = [](double x, double lo, double hi) { return hi > lo ? (x - lo) / (hi - lo) : 0.0; };
  constexpr double kTieEps = 1e-12;
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < front.size(); ++i) {
    const auto& o = front[i].obj;
    const double score = 0.5 * norm(o.idtr, imin, imax) + 0.5 * (1.0 - norm(o.sigma_l, smin, smax));
    bool take = false;
    if (score > best_score + kTieEps) {
      take = true;
    } else if (std::abs(score - best_score) <= kTieEps) {
      const auto& b = front[best];
      if (o.idtr > b.obj.idtr) take = true;
      else if (o.idtr == b.obj.idtr && front[i].partition.labels() < b.partition.labels()) take = true;
    }
    if (take) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

DomainPartition select_final(std::span<const Individual> front) {
  return front[select_final_index(front)].partition;
}

namespace {

struct Problem {
  const SatGraph& g;
  const TrafficMatrix& t;
  int k;
  SizeBounds bounds;
  std::vector<double> node_loads;

  Objectives evaluate(const DomainPartition& p) const {
    std::vector<double> loads(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < g.size(); ++i) loads[static_cast<std::size_t>(p.label(i))] += node_loads[static_cast<std::size_t>(i)];
    return {idtr(p, t), population_std(loads)};
  }
};

bool better_in_tournament(const Individual& a, const Individual& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.crowding > b.crowding;
}

const Individual& tournament(const std::vector<Individual>& pop, int size, Rng& rng) {
  const Individual* best = &pop[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(pop.size()) - 1))];
  for (int t = 1; t < size; ++t) {
    const Individual& c = pop[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(pop.size()) - 1))];
    if (better_in_tournament(c, *best)) best = &c;
  }
  return *best;
}

// Rank + crowding (mu + lambda) truncation of `pool` to `keep` individuals.
std::vector<Individual> environmental_selection(std::vector<Individual> pool, std::size_t keep) {
  std::vector<Objectives> objs;
  objs.reserve(pool.size());
  for (const auto& ind : pool) objs.push_back(ind.obj);
  const auto fronts = nondominated_sort(objs);
  std::vector<Individual> out;
  out.reserve(keep);
  for (std::size_t f = 0; f < fronts.size() && out.size() < keep; ++f) {
    const auto& front = fronts[f];
    std::vector<Objectives> fobj;
    for (int i : front) fobj.push_back(objs[static_cast<std::size_t>(i)]);
    const auto crowd = crowding_distance(fobj);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (out.size() + front.size() > keep) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
    }
    for (std::size_t r = 0; r < order.size() && out.size() < keep; ++r) {
      Individual ind = std::move(pool[static_cast<std::size_t>(front[order[r]])]);
      ind.rank = static_cast<int>(f);
      ind.crowding = crowd[order[r]];
      out.push_back(std::move(ind));
    }
  }
  return out;
}

GenerationStats stats_of(int gen, const std::vector<Individual>& pop) {
  GenerationStats s;
  s.generation = gen;
  s.best_idtr = -std::numeric_limits<double>::infinity();
  s.best_sigma_l = std::numeric_limits<double>::infinity();
  for (const auto& ind : pop) {
    s.best_idtr = std::max(s.best_idtr, ind.obj.idtr);
    s.best_sigma_l = std::min(s.best_sigma_l, ind.obj.sigma_l);
    if (ind.rank == 0) ++s.front_size;
  }
  return s;
}

}  // namespace

Nsga2Result run_nsga2(const SatGraph& g, const TrafficMatrix& t, int num_domains, const Nsga2Config& cfg,
                      std::uint64_t seed, const GenerationObserver& observer) {
  cfg.validate(g.size(), num_domains);
  if (t.size() != g.size()) throw std::invalid_argument("run_nsga2: traffic matrix size mismatch");
  const Problem prob{g, t, num_domains, cfg.effective_bounds(g.size(), num_domains), t.node_loads()};
  const auto m = static_cast<std::size_t>(cfg.population);
  const int init_mut = cfg.init_mutations > 0 ? cfg.init_mutations : std::max(1, g.size() / 4);

  const DomainPartition base = repair(uniform_partition(g.size(), num_domains), g, prob.bounds);
  std::vector<Individual> pop;
  pop.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Individual ind;
    ind.partition = base;
    if (i > 0) {
      Rng rng = make_rng(seed, Stream::kInit, i);
      const int count = uniform_int(rng, 1, init_mut);
      for (int c = 0; c < count; ++c) ind.partition = mutate(ind.partition, g, prob.node_loads, prob.bounds, rng).partition;
    }
    ind.obj = prob.evaluate(ind.partition);
    pop.push_back(std::move(ind));
  }
  pop = environmental_selection(std::move(pop), m);

  Nsga2Result result;
  result.history.push_back(stats_of(0, pop));
  if (observer) observer(0, pop);

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    std::vector<Individual> offspring;
    offspring.reserve(m);
    for (std::size_t q = 0; q < m / 2; ++q) {
      Rng rng = make_rng(seed, Stream::kPartitioner, static_cast<std::uint64_t>(gen) * m + q);
      const Individual& a = tournament(pop, cfg.tournament_size, rng);
      const Individual& b = tournament(pop, cfg.tournament_size, rng);
      DomainPartition c1 = a.partition;
      DomainPartition c2 = b.partition;
      if (uniform01(rng) < cfg.crossover_prob) {
        auto [l1, l2] = crossover(a.partition.labels(), b.partition.labels(), rng);
        c1 = repair(DomainPartition(num_domains, std::move(l1)), g, prob.bounds);
        c2 = repair(DomainPartition(num_domains, std::move(l2)), g, prob.bounds);
      }
      for (DomainPartition* c : {&c1, &c2}) {
        if (uniform01(rng) < cfg.mutation_prob) *c = mutate(*c, g, prob.node_loads, prob.bounds, rng).partition;
        Individual child;
        child.partition = std::move(*c);
        child.obj = prob.evaluate(child.partition);
        offspring.push_back(std::move(child));
      }
    }
    std::vector<Individual> pool = std::move(pop);
    for (auto& o : offspring) pool.push_back(std::move(o));
    pop = environmental_selection(std::move(pool), m);
    result.history.push_back(stats_of(gen, pop));
    if (observer) observer(gen, pop);
  }

  std::set<std::vector<int>> seen;
  for (const auto& ind : pop) {
    if (ind.rank != 0 || !seen.insert(ind.partition.labels()).second) continue;
    result.front.push_back(ind);
  }
  std::stable_sort(result.front.begin(), result.front.end(),
                   [](const Individual& a, const Individual& b) { return a.obj.idtr > b.obj.idtr; });
  const std::size_t pick = select_final_index(result.front);
  result.selected = result.front[pick].partition;
  result.selected_obj = result.front[pick].obj;
  return result;
}

}  // namespace dtar
