#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "mvsg/graph.hpp"
#include "mvsg/ingest.hpp"
#include "mvsg/simulator.hpp"

namespace mvsg::testing {

inline AttributeTable parse_csv(const std::string& text, const LoadOptions& opts = {}) {
  std::istringstream in(text);
  return load_attribute_table(in, opts);
}

inline MultiViewGraph graph_of(const AttributeTable& table) {
  return MultiViewGraph::build(table, compute_ief(table));
}

inline MultiViewGraph graph_of_csv(const std::string& text) { return graph_of(parse_csv(text)); }

// Pairwise oracle, independent of the inverted index: intersect raw token
// sets and sum ief weights.
inline double brute_pair_weight(const AttributeTable& table, const IefWeights& ief, std::size_t attr,
                                std::size_t a, std::size_t b) {
  double w = 0.0;
  for (const auto& t : table.cell(a, attr)) {
    for (const auto& u : table.cell(b, attr)) {
      if (t == u) w += ief.weight(attr, t);
    }
  }
  return w;
}

inline double brute_block_mass(const AttributeTable& table, const IefWeights& ief, std::size_t attr,
                               const std::vector<EntityId>& nodes) {
  double m = 0.0;
  for (std::size_t x = 0; x < nodes.size(); ++x) {
    for (std::size_t y = x + 1; y < nodes.size(); ++y) {
      m += brute_pair_weight(table, ief, attr, nodes[x], nodes[y]);
    }
  }
  return m;
}

inline bool rel_close(double a, double b, double tol) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tol * scale;
}

inline SimScenario small_scenario(std::uint64_t seed, std::size_t n_entities = 120) {
  SimScenario s = default_scenario();
  s.num_entities = n_entities;
  s.cardinality = linear_cardinality(5, 20);
  s.attack_size = 15;
  s.seed = seed;
  return s;
}

}  // namespace mvsg::testing
