#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mvsg/graph.hpp"
#include "mvsg/rng.hpp"

namespace mvsg {

struct SeedConfig {
  std::size_t z = 3;             // views per block
  double percentile = 95.0;      // q, for view sampling weights
  std::size_t attempt_cap = 20;  // growth attempts per view before restarting
  std::size_t restart_cap = 50;  // fresh starts before giving up
};

// Throws InputError if a field is out of range.
void validate(const SeedConfig& cfg);

// Nearest-rank q-th percentile of the carrier counts of a view's values.
// Returns 0 for a view with no values.
double frequency_percentile(const View& view, double q);

// Sampling weight 1 / percentile for eligible views, 0 otherwise.
std::vector<double> view_weights(const MultiViewGraph& graph, double q);

// Draws cfg.z distinct eligible views without replacement, proportional to
// view_weights (renormalized after each draw). Sorted ascending. Throws
// PreconditionError if fewer than z views are eligible.
std::vector<std::size_t> seed_views(const MultiViewGraph& graph, const SeedConfig& cfg, Rng& rng);

// Grows a small node set whose density exceeds the background in every
// selected view: start from two carriers of a random shared value, then for
// each view (shuffled) repeatedly add a co-carrier of a random member's value
// until rho_i > P_i or the attempt cap is spent, restarting from scratch on
// failure. nullopt after restart_cap fresh starts, or at once when a selected
// view has no value shared by two entities.
std::optional<std::vector<EntityId>> greedy_seed(const MultiViewGraph& graph,
                                                 const std::vector<std::size_t>& views,
                                                 const SeedConfig& cfg, Rng& rng);

// Comparison mode: sample uniform random node sets of size in
// [2, max_nodes] until one satisfies every constraint. Reports the number of
// draws through `draws`; nullopt after max_draws.
std::optional<std::vector<EntityId>> random_seed(const MultiViewGraph& graph,
                                                 const std::vector<std::size_t>& views,
                                                 std::size_t max_nodes, std::size_t max_draws,
                                                 Rng& rng, std::size_t* draws = nullptr);

// rho_i > P_i in every listed view, with masses recomputed from scratch.
bool satisfies_constraints(const MultiViewGraph& graph, const std::vector<EntityId>& nodes,
                           const std::vector<std::size_t>& views);

}  // namespace mvsg
