#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mvsg/graph.hpp"
#include "mvsg/ingest.hpp"

namespace mvsg {

// How each attack picks the attributes it synchronizes on.
enum class ViewBias { Uniform, ProportionalToCardinality, InverseToCardinality };

std::string_view to_string(ViewBias b);
ViewBias parse_view_bias(std::string_view name);

struct SimScenario {
  std::size_t num_entities = 500;         // N
  std::vector<std::size_t> cardinality;   // u, one per attribute (K = size)
  std::size_t attack_size = 50;           // n
  std::size_t attack_views = 3;           // k
  std::size_t num_attacks = 1;            // c
  double mean_values = 5.0;               // lambda; attackers draw Poisson(2 lambda)
  double temperature = 10.0;              // tau; attack space is floor(u_i / tau)
  ViewBias view_bias = ViewBias::Uniform;
  std::uint64_t seed = 0;

  std::size_t num_attributes() const { return cardinality.size(); }
};

// u_i = 50 i for i = 1..k.
std::vector<std::size_t> linear_cardinality(std::size_t k, std::size_t step = 50);

// Default scenario: N=500, K=10, u_i=50i, n=50, k=3, c=1, lambda=5, tau=10.
SimScenario default_scenario();

// high-sync | low-sync | high-signal | low-signal | high-dim. Throws InputError
// for other names.
SimScenario preset(std::string_view name);
inline constexpr std::string_view kPresetNames[] = {"high-sync", "low-sync", "high-signal",
                                                    "low-signal", "high-dim"};

// Throws InputError on tau < 1, k > K, n > N, lambda < 0, u_i < 1 or an
// empty attack space floor(u_i / tau) < 1.
void validate(const SimScenario& scenario);

struct Attack {
  std::vector<EntityId> entities;      // sorted, size n
  std::vector<std::size_t> attributes; // sorted, size k
};

struct GroundTruth {
  std::vector<Attack> attacks;

  // (a, b, view) with a < b inside some attack's entities x entities x views.
  bool is_planted(EntityId a, EntityId b, std::size_t view) const;
};

// Normal entities draw Poisson(lambda) distinct values per attribute from
// [1, u_i]; each attack then adds Poisson(2 lambda) distinct values from
// [1, floor(u_i / tau)] to each of its entities in each attacked attribute.
// Entity ids are "e0".."e{N-1}", attributes "a1".."aK", values decimal.
std::pair<AttributeTable, GroundTruth> generate(const SimScenario& scenario);

// Versioned JSON: scenario echo, rng seed, attacks by entity id / attribute
// name.
void write_ground_truth(std::ostream& out, const SimScenario& scenario, const GroundTruth& truth,
                        const AttributeTable& table);
// Resolves ids and names against `table`; throws InputError on mismatch.
GroundTruth read_ground_truth(std::istream& in, const AttributeTable& table);

std::string scenario_to_json(const SimScenario& scenario);

}  // namespace mvsg
