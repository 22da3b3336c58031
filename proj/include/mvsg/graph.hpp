#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mvsg/ingest.hpp"

namespace mvsg {

using EntityId = std::uint32_t;
using ValueId = std::uint32_t;

// One attribute's similarity graph, stored as inverted indexes rather than
// edges. Value ids follow sorted token order.
struct View {
  std::string name;
  std::vector<std::string> tokens;  // value id -> token
  std::vector<double> weights;      // value id -> ief

  // value -> carrier entities (sorted), CSR layout
  std::vector<std::size_t> carrier_offsets;
  std::vector<EntityId> carriers;
  // entity -> values (sorted), CSR layout
  std::vector<std::size_t> value_offsets;
  std::vector<ValueId> entity_values;

  double mass = 0.0;     // C_i over unordered pairs
  double density = 0.0;  // P_i = C_i / V

  std::size_t num_values() const { return tokens.size(); }
  std::span<const EntityId> carriers_of(ValueId v) const {
    return {carriers.data() + carrier_offsets[v], carrier_offsets[v + 1] - carrier_offsets[v]};
  }
  std::span<const ValueId> values_of(EntityId e) const {
    return {entity_values.data() + value_offsets[e], value_offsets[e + 1] - value_offsets[e]};
  }
  // Views without any shared value have C_i = 0 and cannot be scored.
  bool eligible() const { return mass > 0.0; }
};

class MultiViewGraph {
 public:
  MultiViewGraph() = default;

  // Builds both indexes for every attribute. C_i is accumulated per value as
  // ief * f * (f - 1) / 2 in value-id order, never by pair enumeration.
  static MultiViewGraph build(const AttributeTable& table, const IefWeights& ief);

  std::size_t num_entities() const { return entity_ids_.size(); }
  std::size_t num_views() const { return views_.size(); }
  // V = N(N-1)/2
  double volume() const { return volume_; }

  const View& view(std::size_t i) const { return views_.at(i); }
  const std::vector<View>& views() const { return views_; }
  const std::vector<std::string>& entity_ids() const { return entity_ids_; }

  std::vector<std::size_t> eligible_views() const;

  // Sum of ief over values shared by a and b in view i. Throws
  // PreconditionError on unknown indexes or a == b.
  double pair_weight(std::size_t view, EntityId a, EntityId b) const;

  // Mass over unordered pairs of `nodes` in a view, via value frequency
  // counting. Nodes must be distinct.
  double block_mass(std::span<const EntityId> nodes, std::size_t view) const;

  // Versioned binary snapshot; load throws InputError on a bad magic or an
  // unsupported version.
  void save(std::ostream& out) const;
  static MultiViewGraph load(std::istream& in);

 private:
  void finalize();

  std::vector<std::string> entity_ids_;
  std::vector<View> views_;
  double volume_ = 0.0;
};

inline double pair_volume(std::size_t n) {
  return n < 2 ? 0.0 : static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
}

enum class Move { Add, Remove };

// A candidate block under search: node set plus, for every view, the value
// frequency map J_i and the cached mass c_i. Owned by one worker.
class BlockState {
 public:
  explicit BlockState(const MultiViewGraph& graph);
  BlockState(const MultiViewGraph& graph, std::span<const EntityId> nodes);

  const MultiViewGraph& graph() const { return *graph_; }
  std::size_t size() const { return nodes_.size(); }
  double volume() const { return pair_volume(nodes_.size()); }
  double mass(std::size_t view) const { return mass_[view]; }
  double density(std::size_t view) const {
    return nodes_.size() < 2 ? 0.0 : mass_[view] / volume();
  }
  bool contains(EntityId e) const { return member_[e] != 0; }
  std::span<const EntityId> nodes() const { return nodes_; }
  std::vector<EntityId> sorted_nodes() const;
  std::uint32_t count(std::size_t view, ValueId value) const { return counts_[view][value]; }

  // Mass change in a view if e were added (e outside) or removed (e inside).
  double add_delta(std::size_t view, EntityId e) const;
  double remove_delta(std::size_t view, EntityId e) const;

  // Throws PreconditionError when adding a member or removing a non-member.
  void apply(EntityId e, Move move);
  void add(EntityId e) { apply(e, Move::Add); }
  void remove(EntityId e) { apply(e, Move::Remove); }

  // Same node set and frequency maps; masses within `rel_tol`.
  bool equivalent(const BlockState& other, double rel_tol = 1e-9) const;

 private:
  const MultiViewGraph* graph_;
  std::vector<EntityId> nodes_;
  std::vector<char> member_;
  std::vector<std::vector<std::uint32_t>> counts_;
  std::vector<double> mass_;
};

}  // namespace mvsg
