#include "mvsg/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "mvsg/error.hpp"

namespace mvsg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Sum of f_i for hypothetical masses at volume v; -inf if any view is
// infeasible.
double score_masses(const MultiViewGraph& graph, const std::vector<std::size_t>& views,
                    const double* masses, double volume) {
  if (volume < 1.0) return kNegInf;
  double total = 0.0;
  for (std::size_t s = 0; s < views.size(); ++s) {
    const View& view = graph.view(views[s]);
    const double c = masses[s];
    if (!(c > 0.0) || !(c / volume > view.density)) return kNegInf;
    total += view_nll(c, volume, view.mass, graph.volume());
  }
  return total;
}

double current_score(const BlockState& block, const std::vector<std::size_t>& views) {
  std::vector<double> masses;
  for (std::size_t i : views) masses.push_back(block.mass(i));
  return score_masses(block.graph(), views, masses.data(), block.volume());
}

MinedBlock finalize_block(const MultiViewGraph& graph, const BlockState& block,
                          const std::vector<std::size_t>& views, std::size_t iterations,
                          std::size_t seed_id, bool capped) {
  MinedBlock out;
  out.nodes = block.sorted_nodes();
  out.views = views;
  const BlockState fresh(graph, out.nodes);
  out.score = suspiciousness(fresh, out.views);
  out.iterations = iterations;
  out.seed_id = seed_id;
  out.capped = capped;
  return out;
}

}  // namespace

void validate(const MinerConfig& cfg) {
  validate(cfg.seed);
  if (cfg.num_seeds < 1) throw InputError("number of seeds must be at least 1");
  if (!(cfg.jaccard_threshold >= 0.0 && cfg.jaccard_threshold <= 1.0)) {
    throw InputError("jaccard threshold must be in [0, 1]");
  }
  if (cfg.iteration_cap < 1) throw InputError("iteration cap must be at least 1");
  if (cfg.threads < 1) throw InputError("thread count must be at least 1");
}

std::optional<std::vector<std::size_t>> update_views(const BlockState& block, std::size_t z) {
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < block.graph().num_views(); ++i) {
    const double f = view_score_or_nan(block, i);
    if (!std::isnan(f)) scored.emplace_back(f, i);
  }
  if (scored.size() < z) return std::nullopt;
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> views;
  for (std::size_t k = 0; k < z; ++k) views.push_back(scored[k].second);
  std::sort(views.begin(), views.end());
  return views;
}

std::optional<NodeMove> best_node_move(const BlockState& block, const std::vector<std::size_t>& views) {
  const MultiViewGraph& graph = block.graph();
  const std::size_t n = block.size();
  const double add_volume = pair_volume(n + 1);
  const double remove_volume = pair_volume(n > 0 ? n - 1 : 0);
  std::vector<double> masses(views.size());

  std::optional<NodeMove> best;
  for (EntityId e = 0; e < graph.num_entities(); ++e) {
    const bool member = block.contains(e);
    if (member && n <= 2) continue;
    for (std::size_t s = 0; s < views.size(); ++s) {
      masses[s] = block.mass(views[s]) +
                  (member ? block.remove_delta(views[s], e) : block.add_delta(views[s], e));
    }
    const double f = score_masses(graph, views, masses.data(), member ? remove_volume : add_volume);
    if (f == kNegInf) continue;
    if (!best || f > best->score) best = NodeMove{e, member ? Move::Remove : Move::Add, f};
  }
  return best;
}

bool update_nodes(BlockState& block, const std::vector<std::size_t>& views) {
  const double current = current_score(block, views);
  auto move = best_node_move(block, views);
  if (!move || !(move->score > current)) return false;
  block.apply(move->node, move->move);
  return true;
}

RunResult expand(const MultiViewGraph& graph, std::vector<EntityId> seed_nodes,
                 std::vector<std::size_t> views, const MinerConfig& cfg, std::size_t seed_id) {
  RunResult result;
  BlockState block(graph, seed_nodes);
  double score = current_score(block, views);
  if (score == kNegInf) {
    result.status = RunStatus::SeedingFailed;
    return result;
  }
  result.trace.push_back(score);

  for (std::size_t it = 1; it <= cfg.iteration_cap; ++it) {
    const double previous = score;
    auto next_views = update_views(block, cfg.seed.z);
    if (!next_views) {
      result.status = RunStatus::Abandoned;
      return result;
    }
    views = std::move(*next_views);
    update_nodes(block, views);
    score = current_score(block, views);
    if (!(score > previous)) {
      result.status = RunStatus::Converged;
      result.block = finalize_block(graph, block, views, it, seed_id, false);
      return result;
    }
    result.trace.push_back(score);
  }
  result.status = RunStatus::Capped;
  result.block = finalize_block(graph, block, views, cfg.iteration_cap, seed_id, true);
  return result;
}

RunResult slice_n_dice(const MultiViewGraph& graph, const MinerConfig& cfg, Rng& rng,
                       std::size_t seed_id) {
  if (graph.eligible_views().size() < cfg.seed.z) return {};
  auto views = seed_views(graph, cfg.seed, rng);
  auto seed = greedy_seed(graph, views, cfg.seed, rng);
  if (!seed) return {};
  return expand(graph, std::move(*seed), std::move(views), cfg, seed_id);
}

MineResult run_seeds(const MultiViewGraph& graph, const MinerConfig& cfg) {
  validate(cfg);
  std::vector<RunResult> runs(cfg.num_seeds);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s = next++; s < cfg.num_seeds; s = next++) {
      Rng rng = split_rng(cfg.rng_seed, s);
      runs[s] = slice_n_dice(graph, cfg, rng, s);
    }
  };
  const std::size_t threads = std::min(cfg.threads, cfg.num_seeds);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  MineResult out;
  for (auto& run : runs) {
    switch (run.status) {
      case RunStatus::SeedingFailed: ++out.seeding_failures; break;
      case RunStatus::Abandoned: ++out.abandoned; break;
      case RunStatus::Capped: ++out.capped; [[fallthrough]];
      case RunStatus::Converged: out.blocks.push_back(std::move(*run.block)); break;
    }
  }
  std::sort(out.blocks.begin(), out.blocks.end(), [](const MinedBlock& a, const MinedBlock& b) {
    if (a.score.total != b.score.total) return a.score.total > b.score.total;
    return a.seed_id < b.seed_id;
  });
  return out;
}

MineResult mine(const MultiViewGraph& graph, const MinerConfig& cfg) {
  MineResult result = run_seeds(graph, cfg);
  result.blocks = jaccard_dedup(std::move(result.blocks), cfg.jaccard_threshold);
  return result;
}

double jaccard(const std::vector<EntityId>& a, const std::vector<EntityId>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

std::vector<MinedBlock> jaccard_dedup(std::vector<MinedBlock> ranked, double eta) {
  std::vector<MinedBlock> kept;
  for (auto& block : ranked) {
    bool redundant = false;
    for (const auto& k : kept) {
      if (jaccard(block.nodes, k.nodes) >= eta) {
        redundant = true;
        break;
      }
    }
    if (!redundant) kept.push_back(std::move(block));
  }
  return kept;
}

void write_jsonl(std::ostream& out, const MultiViewGraph& graph,
                 const std::vector<MinedBlock>& blocks) {
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    const MinedBlock& b = blocks[r];
    nlohmann::ordered_json j;
    j["rank"] = r + 1;
    j["score"] = b.score.total;
    auto views = nlohmann::ordered_json::array();
    for (const ViewScore& vs : b.score.per_view) {
      nlohmann::ordered_json v;
      v["name"] = graph.view(vs.view).name;
      v["mass"] = vs.mass;
      v["density"] = vs.density;
      v["graph_density"] = vs.graph_density;
      v["f"] = vs.f;
      views.push_back(std::move(v));
    }
    j["views"] = std::move(views);
    auto ids = nlohmann::ordered_json::array();
    for (EntityId e : b.nodes) ids.push_back(graph.entity_ids()[e]);
    j["entity_ids"] = std::move(ids);
    j["size"] = b.nodes.size();
    j["iterations"] = b.iterations;
    j["seed_id"] = b.seed_id;
    j["capped"] = b.capped;
    out << j.dump() << '\n';
  }
}

}  // namespace mvsg
