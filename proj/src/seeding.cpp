#include "mvsg/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "mvsg/error.hpp"

namespace mvsg {

namespace {

// Masses of a small, growing node set in the selected views only.
class SeedTracker {
 public:
  SeedTracker(const MultiViewGraph& graph, const std::vector<std::size_t>& views)
      : graph_(graph), views_(views), counts_(views.size()), mass_(views.size(), 0.0) {}

  void clear() {
    nodes_.clear();
    for (auto& c : counts_) c.clear();
    std::fill(mass_.begin(), mass_.end(), 0.0);
  }

  bool contains(EntityId e) const { return std::find(nodes_.begin(), nodes_.end(), e) != nodes_.end(); }

  void add(EntityId e) {
    nodes_.push_back(e);
    for (std::size_t s = 0; s < views_.size(); ++s) {
      const View& view = graph_.view(views_[s]);
      for (ValueId v : view.values_of(e)) {
        auto& count = counts_[s][v];
        mass_[s] += view.weights[v] * count;
        ++count;
      }
    }
  }

  // Index into the selected view list.
  bool satisfied(std::size_t slot) const {
    const double volume = pair_volume(nodes_.size());
    return volume > 0.0 && mass_[slot] / volume > graph_.view(views_[slot]).density;
  }

  bool all_satisfied() const {
    for (std::size_t s = 0; s < views_.size(); ++s) {
      if (!satisfied(s)) return false;
    }
    return true;
  }

  const std::vector<EntityId>& nodes() const { return nodes_; }

 private:
  const MultiViewGraph& graph_;
  const std::vector<std::size_t>& views_;
  std::vector<EntityId> nodes_;
  std::vector<std::unordered_map<ValueId, std::uint32_t>> counts_;
  std::vector<double> mass_;
};

}  // namespace

void validate(const SeedConfig& cfg) {
  if (cfg.z < 1) throw InputError("z must be at least 1");
  if (!(cfg.percentile > 0.0 && cfg.percentile <= 100.0)) {
    throw InputError("percentile must be in (0, 100]");
  }
  if (cfg.attempt_cap < 1) throw InputError("attempt cap must be at least 1");
  if (cfg.restart_cap < 1) throw InputError("restart cap must be at least 1");
}

double frequency_percentile(const View& view, double q) {
  const std::size_t m = view.num_values();
  if (m == 0) return 0.0;
  std::vector<std::size_t> freq(m);
  for (std::size_t v = 0; v < m; ++v) {
    freq[v] = view.carrier_offsets[v + 1] - view.carrier_offsets[v];
  }
  std::sort(freq.begin(), freq.end());
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(m)));
  rank = std::clamp<std::size_t>(rank, 1, m);
  return static_cast<double>(freq[rank - 1]);
}

std::vector<double> view_weights(const MultiViewGraph& graph, double q) {
  std::vector<double> weights(graph.num_views(), 0.0);
  for (std::size_t i = 0; i < graph.num_views(); ++i) {
    const View& view = graph.view(i);
    if (!view.eligible()) continue;
    weights[i] = 1.0 / frequency_percentile(view, q);
  }
  return weights;
}

std::vector<std::size_t> seed_views(const MultiViewGraph& graph, const SeedConfig& cfg, Rng& rng) {
  auto weights = view_weights(graph, cfg.percentile);
  const auto eligible = static_cast<std::size_t>(
      std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
  if (eligible < cfg.z) {
    throw PreconditionError("seed_views: " + std::to_string(eligible) +
                            " eligible views, fewer than z = " + std::to_string(cfg.z));
  }
  std::vector<std::size_t> chosen;
  for (std::size_t draw = 0; draw < cfg.z; ++draw) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    std::size_t pick_index = weights.size();
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = i;
      acc += weights[i];
      if (target < acc) {
        pick_index = i;
        break;
      }
    }
    if (pick_index == weights.size()) pick_index = last_positive;
    chosen.push_back(pick_index);
    weights[pick_index] = 0.0;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::optional<std::vector<EntityId>> greedy_seed(const MultiViewGraph& graph,
                                                 const std::vector<std::size_t>& views,
                                                 const SeedConfig& cfg, Rng& rng) {
  if (views.empty()) throw PreconditionError("greedy_seed: no views selected");
  std::vector<std::vector<ValueId>> shared(views.size());
  for (std::size_t s = 0; s < views.size(); ++s) {
    const View& view = graph.view(views[s]);
    for (ValueId v = 0; v < view.num_values(); ++v) {
      if (view.carriers_of(v).size() >= 2) shared[s].push_back(v);
    }
    if (shared[s].empty()) return std::nullopt;
  }

  SeedTracker seed(graph, views);
  std::vector<std::size_t> order(views.size());
  for (std::size_t restart = 0; restart < cfg.restart_cap; ++restart) {
    seed.clear();
    const std::size_t first = pick(rng, views.size());
    const ValueId value = shared[first][pick(rng, shared[first].size())];
    const auto carriers = graph.view(views[first]).carriers_of(value);
    const std::size_t a = pick(rng, carriers.size());
    std::size_t b = pick(rng, carriers.size() - 1);
    if (b >= a) ++b;
    seed.add(carriers[a]);
    seed.add(carriers[b]);

    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    bool ok = true;
    for (std::size_t slot : order) {
      const View& view = graph.view(views[slot]);
      for (std::size_t attempt = 0; attempt < cfg.attempt_cap && !seed.satisfied(slot); ++attempt) {
        const EntityId member = seed.nodes()[pick(rng, seed.nodes().size())];
        const auto values = view.values_of(member);
        if (values.empty()) continue;
        const auto co = view.carriers_of(values[pick(rng, values.size())]);
        const EntityId candidate = co[pick(rng, co.size())];
        if (!seed.contains(candidate)) seed.add(candidate);
      }
      if (!seed.satisfied(slot)) {
        ok = false;
        break;
      }
    }
    // Growth for a later view can dilute an earlier one; only a seed that
    // meets every constraint at the end is returned.
    if (ok && seed.all_satisfied()) {
      auto nodes = seed.nodes();
      std::sort(nodes.begin(), nodes.end());
      return nodes;
    }
  }
  return std::nullopt;
}

std::optional<std::vector<EntityId>> random_seed(const MultiViewGraph& graph,
                                                 const std::vector<std::size_t>& views,
                                                 std::size_t max_nodes, std::size_t max_draws,
                                                 Rng& rng, std::size_t* draws) {
  const std::size_t n = graph.num_entities();
  if (n < 2) throw PreconditionError("random_seed: need at least two entities");
  max_nodes = std::clamp<std::size_t>(max_nodes, 2, n);
  SeedTracker seed(graph, views);
  std::vector<EntityId> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t draw = 1; draw <= max_draws; ++draw) {
    seed.clear();
    const std::size_t size = 2 + pick(rng, max_nodes - 1);
    // Partial Fisher-Yates: first `size` entries become a uniform sample.
    for (std::size_t k = 0; k < size; ++k) {
      std::swap(pool[k], pool[k + pick(rng, n - k)]);
      seed.add(pool[k]);
    }
    if (seed.all_satisfied()) {
      if (draws) *draws = draw;
      auto nodes = seed.nodes();
      std::sort(nodes.begin(), nodes.end());
      return nodes;
    }
  }
  if (draws) *draws = max_draws;
  return std::nullopt;
}

bool satisfies_constraints(const MultiViewGraph& graph, const std::vector<EntityId>& nodes,
                           const std::vector<std::size_t>& views) {
  const double volume = pair_volume(nodes.size());
  if (volume <= 0.0) return false;
  for (std::size_t i : views) {
    if (!(graph.block_mass(nodes, i) / volume > graph.view(i).density)) return false;
  }
  return true;
}

}  // namespace mvsg
