#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mvsg/graph.hpp"
#include "mvsg/seeding.hpp"

namespace mvsg {

enum class SeedMethod { Greedy, Random };
std::string_view to_string(SeedMethod m);

struct SeedTiming {
  SeedMethod method;
  std::size_t z = 0;
  std::size_t trial = 0;
  double seconds = 0.0;  // until the first valid seed, or until giving up
  bool found = false;
  std::size_t attempts = 0;  // greedy_seed calls, or random draws
};

struct SeedBenchConfig {
  std::vector<std::size_t> z_values{1, 2, 3, 4, 5};
  std::size_t trials = 100;
  std::size_t random_max_nodes = 2;       // random sets have size in [2, this]
  std::size_t random_max_draws = 1000000;
  std::size_t greedy_max_calls = 1000;
  std::uint64_t rng_seed = 0;
};

// Per trial both methods get the same views (drawn by seed_views) and the
// clock runs until each produces a seed meeting all constraints.
std::vector<SeedTiming> seed_time_trials(const MultiViewGraph& graph, const SeedBenchConfig& cfg);

double median_seconds(const std::vector<SeedTiming>& rows, SeedMethod method, std::size_t z);

struct ScalingPoint {
  std::size_t num_entities = 0;
  std::size_t iterations = 0;
  double seconds = 0.0;  // median over repeats
};

struct ScalingConfig {
  std::vector<std::size_t> sizes{500, 1000, 2000, 4000};
  std::vector<std::size_t> iteration_counts{25, 50, 100, 200, 400};
  std::size_t fixed_iterations = 100;
  std::size_t fixed_size = 1000;
  std::size_t repeats = 3;
  std::uint64_t rng_seed = 0;
};

// Runs exactly `iterations` UpdateViews + full UpdateNodes neighborhood scans
// from one greedy seed on the attack views of a default-parameter table with
// `num_entities` entities. Moves are applied only when they improve; the scan
// cost is paid every iteration either way.
double time_fixed_iterations(const MultiViewGraph& graph, const std::vector<std::size_t>& views,
                             std::vector<EntityId> seed, std::size_t iterations);

std::vector<ScalingPoint> scaling_vs_entities(const ScalingConfig& cfg);
std::vector<ScalingPoint> scaling_vs_iterations(const ScalingConfig& cfg);

// Coefficient of determination of the least-squares line y ~ a + b x.
double linear_r_squared(const std::vector<double>& x, const std::vector<double>& y);

void write_seed_timings(std::ostream& out, const std::vector<SeedTiming>& rows);
void write_scaling(std::ostream& out, const std::vector<ScalingPoint>& points);

}  // namespace mvsg
