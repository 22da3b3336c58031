#include "mvsg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "mvsg/error.hpp"

namespace mvsg {

namespace {

constexpr char kSnapshotMagic[4] = {'M', 'V', 'S', 'G'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <typename T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw InputError("graph snapshot truncated");
  }
  return value;
}

std::string get_string(std::istream& in) {
  auto len = get<std::uint64_t>(in);
  if (len > (std::uint64_t{1} << 32)) throw InputError("graph snapshot corrupt string length");
  std::string s(len, '\0');
  if (len && !in.read(s.data(), static_cast<std::streamsize>(len))) {
    throw InputError("graph snapshot truncated");
  }
  return s;
}

// Mass of a value carried by f entities, over unordered pairs.
inline double value_mass(double weight, std::size_t f) {
  return weight * static_cast<double>(f) * static_cast<double>(f - (f > 0 ? 1 : 0)) / 2.0;
}

}  // namespace

MultiViewGraph MultiViewGraph::build(const AttributeTable& table, const IefWeights& ief) {
  if (ief.num_attributes() != table.num_attributes() ||
      ief.num_entities() != table.num_entities()) {
    throw PreconditionError("build_graph: ief was computed from a different table");
  }
  MultiViewGraph g;
  g.entity_ids_ = table.entity_ids();
  const std::size_t n = table.num_entities();
  g.views_.resize(table.num_attributes());

  for (std::size_t a = 0; a < table.num_attributes(); ++a) {
    View& view = g.views_[a];
    view.name = table.attributes()[a];

    const auto& weights = ief.attribute_weights(a);
    std::unordered_map<std::string, ValueId> ids;
    ids.reserve(weights.size());
    for (const auto& [token, w] : weights) {
      ids.emplace(token, static_cast<ValueId>(view.tokens.size()));
      view.tokens.push_back(token);
      view.weights.push_back(w);
    }

    view.value_offsets.assign(n + 1, 0);
    for (std::size_t e = 0; e < n; ++e) {
      std::vector<ValueId> vals;
      for (const auto& token : table.cell(e, a)) {
        auto it = ids.find(token);
        if (it != ids.end()) vals.push_back(it->second);
      }
      std::sort(vals.begin(), vals.end());
      view.entity_values.insert(view.entity_values.end(), vals.begin(), vals.end());
      view.value_offsets[e + 1] = view.entity_values.size();
    }
  }
  g.finalize();
  return g;
}

// Derives the value->entity index and the view totals from entity_values.
void MultiViewGraph::finalize() {
  const std::size_t n = entity_ids_.size();
  volume_ = pair_volume(n);
  for (View& view : views_) {
    const std::size_t nv = view.num_values();
    std::vector<std::size_t> freq(nv, 0);
    for (ValueId v : view.entity_values) ++freq[v];
    view.carrier_offsets.assign(nv + 1, 0);
    for (std::size_t v = 0; v < nv; ++v) view.carrier_offsets[v + 1] = view.carrier_offsets[v] + freq[v];
    view.carriers.assign(view.entity_values.size(), 0);
    std::vector<std::size_t> cursor(view.carrier_offsets.begin(), view.carrier_offsets.end() - 1);
    for (std::size_t e = 0; e < n; ++e) {
      for (ValueId v : view.values_of(static_cast<EntityId>(e))) {
        view.carriers[cursor[v]++] = static_cast<EntityId>(e);
      }
    }
    double mass = 0.0;
    for (std::size_t v = 0; v < nv; ++v) mass += value_mass(view.weights[v], freq[v]);
    view.mass = mass;
    view.density = volume_ > 0.0 ? mass / volume_ : 0.0;
  }
}

std::vector<std::size_t> MultiViewGraph::eligible_views() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < views_.size(); ++i) {
    if (views_[i].eligible()) out.push_back(i);
  }
  return out;
}

double MultiViewGraph::pair_weight(std::size_t view, EntityId a, EntityId b) const {
  if (view >= views_.size()) throw PreconditionError("pair_weight: unknown view index");
  if (a >= num_entities() || b >= num_entities()) {
    throw PreconditionError("pair_weight: unknown entity index");
  }
  if (a == b) throw PreconditionError("pair_weight: entities must differ");
  const View& vw = views_[view];
  auto va = vw.values_of(a);
  auto vb = vw.values_of(b);
  double w = 0.0;
  auto ia = va.begin();
  auto ib = vb.begin();
  while (ia != va.end() && ib != vb.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      w += vw.weights[*ia];
      ++ia;
      ++ib;
    }
  }
  return w;
}

double MultiViewGraph::block_mass(std::span<const EntityId> nodes, std::size_t view) const {
  const View& vw = views_.at(view);
  std::unordered_map<ValueId, std::size_t> freq;
  for (EntityId e : nodes) {
    for (ValueId v : vw.values_of(e)) ++freq[v];
  }
  std::vector<std::pair<ValueId, std::size_t>> sorted(freq.begin(), freq.end());
  std::sort(sorted.begin(), sorted.end());
  double mass = 0.0;
  for (const auto& [v, f] : sorted) mass += value_mass(vw.weights[v], f);
  return mass;
}

void MultiViewGraph::save(std::ostream& out) const {
  out.write(kSnapshotMagic, 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint64_t>(out, entity_ids_.size());
  put<std::uint64_t>(out, views_.size());
  for (const auto& id : entity_ids_) put_string(out, id);
  for (const View& view : views_) {
    put_string(out, view.name);
    put<std::uint64_t>(out, view.num_values());
    for (std::size_t v = 0; v < view.num_values(); ++v) {
      put_string(out, view.tokens[v]);
      put<double>(out, view.weights[v]);
      auto carriers = view.carriers_of(static_cast<ValueId>(v));
      put<std::uint64_t>(out, carriers.size());
      out.write(reinterpret_cast<const char*>(carriers.data()),
                static_cast<std::streamsize>(carriers.size() * sizeof(EntityId)));
    }
  }
  if (!out) throw std::runtime_error("failed writing graph snapshot");
}

MultiViewGraph MultiViewGraph::load(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kSnapshotMagic, 4) != 0) {
    throw InputError("not a graph snapshot (bad magic)");
  }
  auto version = get<std::uint32_t>(in);
  if (version != kSnapshotVersion) {
    throw InputError("unsupported graph snapshot version " + std::to_string(version));
  }
  MultiViewGraph g;
  const auto n = get<std::uint64_t>(in);
  const auto k = get<std::uint64_t>(in);
  g.entity_ids_.reserve(n);
  for (std::uint64_t e = 0; e < n; ++e) g.entity_ids_.push_back(get_string(in));
  g.views_.resize(k);
  for (View& view : g.views_) {
    view.name = get_string(in);
    const auto nv = get<std::uint64_t>(in);
    std::vector<std::vector<ValueId>> per_entity(n);
    for (std::uint64_t v = 0; v < nv; ++v) {
      view.tokens.push_back(get_string(in));
      view.weights.push_back(get<double>(in));
      const auto count = get<std::uint64_t>(in);
      for (std::uint64_t c = 0; c < count; ++c) {
        auto e = get<EntityId>(in);
        if (e >= n) throw InputError("graph snapshot corrupt entity index");
        per_entity[e].push_back(static_cast<ValueId>(v));
      }
    }
    view.value_offsets.assign(n + 1, 0);
    for (std::uint64_t e = 0; e < n; ++e) {
      view.entity_values.insert(view.entity_values.end(), per_entity[e].begin(), per_entity[e].end());
      view.value_offsets[e + 1] = view.entity_values.size();
    }
  }
  g.finalize();
  return g;
}

BlockState::BlockState(const MultiViewGraph& graph)
    : graph_(&graph),
      member_(graph.num_entities(), 0),
      counts_(graph.num_views()),
      mass_(graph.num_views(), 0.0) {
  for (std::size_t i = 0; i < graph.num_views(); ++i) counts_[i].assign(graph.view(i).num_values(), 0);
}

BlockState::BlockState(const MultiViewGraph& graph, std::span<const EntityId> nodes)
    : BlockState(graph) {
  for (EntityId e : nodes) add(e);
}

std::vector<EntityId> BlockState::sorted_nodes() const {
  std::vector<EntityId> out(nodes_.begin(), nodes_.end());
  std::sort(out.begin(), out.end());
  return out;
}

double BlockState::add_delta(std::size_t view, EntityId e) const {
  const View& vw = graph_->view(view);
  const auto& counts = counts_[view];
  double delta = 0.0;
  for (ValueId v : vw.values_of(e)) delta += vw.weights[v] * counts[v];
  return delta;
}

double BlockState::remove_delta(std::size_t view, EntityId e) const {
  const View& vw = graph_->view(view);
  const auto& counts = counts_[view];
  double delta = 0.0;
  for (ValueId v : vw.values_of(e)) delta += vw.weights[v] * (counts[v] - 1);
  return -delta;
}

void BlockState::apply(EntityId e, Move move) {
  if (e >= graph_->num_entities()) throw PreconditionError("apply_move: unknown entity index");
  const bool add = move == Move::Add;
  if (add == contains(e)) {
    throw PreconditionError(add ? "apply_move: entity already in block"
                                : "apply_move: entity not in block");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    mass_[i] += add ? add_delta(i, e) : remove_delta(i, e);
    auto& counts = counts_[i];
    for (ValueId v : graph_->view(i).values_of(e)) {
      if (add) {
        ++counts[v];
      } else {
        --counts[v];
      }
    }
  }
  if (add) {
    member_[e] = 1;
    nodes_.push_back(e);
  } else {
    member_[e] = 0;
    nodes_.erase(std::find(nodes_.begin(), nodes_.end(), e));
  }
  // An empty or singleton block has no pairs; drop accumulated roundoff.
  if (nodes_.size() < 2) std::fill(mass_.begin(), mass_.end(), 0.0);
}

bool BlockState::equivalent(const BlockState& other, double rel_tol) const {
  if (graph_ != other.graph_ || sorted_nodes() != other.sorted_nodes() || counts_ != other.counts_) {
    return false;
  }
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    const double scale = std::max({std::abs(mass_[i]), std::abs(other.mass_[i]), 1.0});
    if (std::abs(mass_[i] - other.mass_[i]) > rel_tol * scale) return false;
  }
  return true;
}

}  // namespace mvsg
