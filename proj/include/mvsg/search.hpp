#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mvsg/graph.hpp"
#include "mvsg/metric.hpp"
#include "mvsg/rng.hpp"
#include "mvsg/seeding.hpp"

namespace mvsg {

struct MinerConfig {
  SeedConfig seed;  // seed.z is the view budget of every mined block
  std::size_t num_seeds = 200;
  double jaccard_threshold = 0.05;
  std::size_t threads = 1;
  std::size_t iteration_cap = 1000;
  std::uint64_t rng_seed = 0;
};

void validate(const MinerConfig& cfg);

struct MinedBlock {
  std::vector<EntityId> nodes;     // sorted
  std::vector<std::size_t> views;  // sorted
  BlockScore score;                // recomputed from scratch on the final block
  std::size_t iterations = 0;
  std::size_t seed_id = 0;
  bool capped = false;
};

// Top-z views by f_i among views with rho_i > P_i, ties to the lower index;
// returned sorted. nullopt if fewer than z views qualify.
std::optional<std::vector<std::size_t>> update_views(const BlockState& block, std::size_t z);

struct NodeMove {
  EntityId node = 0;
  Move move = Move::Add;
  double score = 0.0;
};

// Best-scoring feasible single-node addition or removal over all entities
// (removals keep at least two nodes), ties to the lower entity index.
// nullopt when no move is feasible.
std::optional<NodeMove> best_node_move(const BlockState& block, const std::vector<std::size_t>& views);

// Applies best_node_move if it strictly raises f over `views`. Returns
// whether the block changed.
bool update_nodes(BlockState& block, const std::vector<std::size_t>& views);

enum class RunStatus { Converged, Capped, SeedingFailed, Abandoned };

struct RunResult {
  RunStatus status = RunStatus::SeedingFailed;
  std::optional<MinedBlock> block;
  std::vector<double> trace;  // accepted scores, strictly increasing
};

// Alternates update_views and update_nodes from a given seed until the score
// stops increasing or the iteration cap is hit.
RunResult expand(const MultiViewGraph& graph, std::vector<EntityId> seed_nodes,
                 std::vector<std::size_t> views, const MinerConfig& cfg, std::size_t seed_id = 0);

// seed_views -> greedy_seed -> expand.
RunResult slice_n_dice(const MultiViewGraph& graph, const MinerConfig& cfg, Rng& rng,
                       std::size_t seed_id = 0);

struct MineResult {
  std::vector<MinedBlock> blocks;  // descending score, ties by seed id
  std::size_t seeding_failures = 0;
  std::size_t abandoned = 0;
  std::size_t capped = 0;
};

// num_seeds independent runs on cfg.threads workers. Seed s draws from
// split_rng(cfg.rng_seed, s), so output does not depend on thread count.
// Blocks are ranked but not deduplicated.
MineResult run_seeds(const MultiViewGraph& graph, const MinerConfig& cfg);

// run_seeds followed by jaccard_dedup.
MineResult mine(const MultiViewGraph& graph, const MinerConfig& cfg);

double jaccard(const std::vector<EntityId>& a, const std::vector<EntityId>& b);

// Keeps a block iff its Jaccard similarity with every kept block is < eta.
std::vector<MinedBlock> jaccard_dedup(std::vector<MinedBlock> ranked, double eta);

// One JSON object per line: rank, score, views[{name, mass, density,
// graph_density, f}], entity_ids, size, iterations, seed_id, capped.
void write_jsonl(std::ostream& out, const MultiViewGraph& graph,
                 const std::vector<MinedBlock>& blocks);

}  // namespace mvsg
