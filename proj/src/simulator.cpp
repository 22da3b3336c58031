#include "mvsg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "mvsg/error.hpp"
#include "mvsg/rng.hpp"

namespace mvsg {

namespace {

std::size_t attack_space(const SimScenario& s, std::size_t attribute) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(s.cardinality[attribute]) / s.temperature));
}

// Up to `count` distinct integers drawn uniformly from [1, space].
std::vector<std::size_t> distinct_values(Rng& rng, std::size_t count, std::size_t space) {
  count = std::min(count, space);
  std::unordered_set<std::size_t> picked;
  std::vector<std::size_t> out;
  // Floyd's algorithm: exactly `count` iterations, uniform over subsets.
  for (std::size_t j = space - count + 1; j <= space; ++j) {
    std::size_t t = 1 + pick(rng, j);
    if (!picked.insert(t).second) {
      picked.insert(j);
      t = j;
    }
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> sample_attributes(const SimScenario& s, Rng& rng) {
  const std::size_t k = s.num_attributes();
  std::vector<double> weights(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double u = static_cast<double>(s.cardinality[i]);
    switch (s.view_bias) {
      case ViewBias::Uniform: weights[i] = 1.0; break;
      case ViewBias::ProportionalToCardinality: weights[i] = u; break;
      case ViewBias::InverseToCardinality: weights[i] = 1.0 / u; break;
    }
  }
  std::vector<std::size_t> chosen;
  for (std::size_t draw = 0; draw < s.attack_views; ++draw) {
    std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
    const std::size_t i = dist(rng);
    chosen.push_back(i);
    weights[i] = 0.0;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

std::string_view to_string(ViewBias b) {
  switch (b) {
    case ViewBias::Uniform: return "uniform";
    case ViewBias::ProportionalToCardinality: return "proportional";
    case ViewBias::InverseToCardinality: return "inverse";
  }
  return "?";
}

ViewBias parse_view_bias(std::string_view name) {
  for (ViewBias b : {ViewBias::Uniform, ViewBias::ProportionalToCardinality,
                     ViewBias::InverseToCardinality}) {
    if (to_string(b) == name) return b;
  }
  throw InputError("unknown view bias '" + std::string(name) +
                   "' (expected uniform, proportional or inverse)");
}

std::vector<std::size_t> linear_cardinality(std::size_t k, std::size_t step) {
  std::vector<std::size_t> u(k);
  for (std::size_t i = 0; i < k; ++i) u[i] = step * (i + 1);
  return u;
}

SimScenario default_scenario() {
  SimScenario s;
  s.cardinality = linear_cardinality(10);
  return s;
}

SimScenario preset(std::string_view name) {
  SimScenario s = default_scenario();
  if (name == "high-sync") return s;
  if (name == "low-sync") {
    s.temperature = 2.0;
  } else if (name == "high-signal") {
    s.view_bias = ViewBias::ProportionalToCardinality;
  } else if (name == "low-signal") {
    s.view_bias = ViewBias::InverseToCardinality;
  } else if (name == "high-dim") {
    s.cardinality = linear_cardinality(30);
  } else {
    throw InputError("unknown preset '" + std::string(name) + "'");
  }
  return s;
}

void validate(const SimScenario& s) {
  if (!(s.temperature >= 1.0)) throw InputError("temperature tau must be >= 1");
  if (!(s.mean_values >= 0.0)) throw InputError("lambda must be >= 0");
  if (s.attack_views > s.num_attributes()) throw InputError("attack views k exceeds K");
  if (s.num_attacks > 0 && s.attack_size > s.num_entities) {
    throw InputError("attack size n exceeds N");
  }
  for (std::size_t i = 0; i < s.num_attributes(); ++i) {
    if (s.cardinality[i] < 1) throw InputError("attribute cardinality must be >= 1");
    if (s.num_attacks > 0 && attack_space(s, i) < 1) {
      throw InputError("attack space floor(u_" + std::to_string(i + 1) + " / tau) is empty");
    }
  }
}

bool GroundTruth::is_planted(EntityId a, EntityId b, std::size_t view) const {
  for (const Attack& atk : attacks) {
    if (!std::binary_search(atk.attributes.begin(), atk.attributes.end(), view)) continue;
    if (std::binary_search(atk.entities.begin(), atk.entities.end(), a) &&
        std::binary_search(atk.entities.begin(), atk.entities.end(), b)) {
      return true;
    }
  }
  return false;
}

std::pair<AttributeTable, GroundTruth> generate(const SimScenario& s) {
  validate(s);
  Rng rng(splitmix64(s.seed));
  const std::size_t n = s.num_entities;
  const std::size_t k = s.num_attributes();

  std::vector<std::string> ids(n);
  for (std::size_t e = 0; e < n; ++e) ids[e] = "e" + std::to_string(e);
  std::vector<std::string> names(k);
  for (std::size_t i = 0; i < k; ++i) names[i] = "a" + std::to_string(i + 1);

  // values[i][e]
  std::vector<std::vector<std::vector<std::size_t>>> values(k, std::vector<std::vector<std::size_t>>(n));
  std::poisson_distribution<std::size_t> normal(s.mean_values);
  for (std::size_t e = 0; e < n; ++e) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t count = s.mean_values > 0.0 ? normal(rng) : 0;
      values[i][e] = distinct_values(rng, count, s.cardinality[i]);
    }
  }

  GroundTruth truth;
  std::poisson_distribution<std::size_t> attacker(2.0 * s.mean_values);
  std::vector<EntityId> pool(n);
  for (std::size_t a = 0; a < s.num_attacks; ++a) {
    Attack atk;
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t j = 0; j < s.attack_size; ++j) {
      std::swap(pool[j], pool[j + pick(rng, n - j)]);
      atk.entities.push_back(pool[j]);
    }
    std::sort(atk.entities.begin(), atk.entities.end());
    atk.attributes = sample_attributes(s, rng);
    for (EntityId e : atk.entities) {
      for (std::size_t i : atk.attributes) {
        const std::size_t count = s.mean_values > 0.0 ? attacker(rng) : 0;
        auto extra = distinct_values(rng, count, attack_space(s, i));
        auto& cell = values[i][e];
        std::vector<std::size_t> merged;
        std::set_union(cell.begin(), cell.end(), extra.begin(), extra.end(), std::back_inserter(merged));
        cell = std::move(merged);
      }
    }
    truth.attacks.push_back(std::move(atk));
  }

  AttributeTable table(std::move(ids), std::move(names));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t e = 0; e < n; ++e) {
      AttributeTable::Cell cell;
      cell.reserve(values[i][e].size());
      for (std::size_t v : values[i][e]) cell.push_back(std::to_string(v));
      table.set_cell(e, i, std::move(cell));
    }
  }
  return {std::move(table), std::move(truth)};
}

std::string scenario_to_json(const SimScenario& s) {
  nlohmann::ordered_json j;
  j["num_entities"] = s.num_entities;
  j["num_attributes"] = s.num_attributes();
  j["cardinality"] = s.cardinality;
  j["attack_size"] = s.attack_size;
  j["attack_views"] = s.attack_views;
  j["num_attacks"] = s.num_attacks;
  j["mean_values"] = s.mean_values;
  j["temperature"] = s.temperature;
  j["view_bias"] = std::string(to_string(s.view_bias));
  j["seed"] = s.seed;
  return j.dump();
}

void write_ground_truth(std::ostream& out, const SimScenario& s, const GroundTruth& truth,
                        const AttributeTable& table) {
  nlohmann::ordered_json j;
  j["format"] = "mvsg-ground-truth";
  j["version"] = 1;
  j["rng_seed"] = s.seed;
  j["scenario"] = nlohmann::ordered_json::parse(scenario_to_json(s));
  auto attacks = nlohmann::ordered_json::array();
  for (const Attack& atk : truth.attacks) {
    nlohmann::ordered_json a;
    std::vector<std::string> ids;
    for (EntityId e : atk.entities) ids.push_back(table.entity_ids()[e]);
    std::vector<std::string> attrs;
    for (std::size_t i : atk.attributes) attrs.push_back(table.attributes()[i]);
    a["entity_ids"] = ids;
    a["attributes"] = attrs;
    attacks.push_back(std::move(a));
  }
  j["attacks"] = std::move(attacks);
  out << j.dump(2) << '\n';
}

GroundTruth read_ground_truth(std::istream& in, const AttributeTable& table) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("ground truth is not valid JSON: ") + ex.what());
  }
  if (j.value("format", "") != "mvsg-ground-truth" || j.value("version", 0) != 1) {
    throw InputError("ground truth: unsupported format or version");
  }
  std::unordered_map<std::string, EntityId> entity_index;
  for (std::size_t e = 0; e < table.num_entities(); ++e) {
    entity_index.emplace(table.entity_ids()[e], static_cast<EntityId>(e));
  }
  GroundTruth truth;
  for (const auto& a : j.at("attacks")) {
    Attack atk;
    for (const auto& id : a.at("entity_ids")) {
      auto it = entity_index.find(id.get<std::string>());
      if (it == entity_index.end()) {
        throw InputError("ground truth names unknown entity '" + id.get<std::string>() + "'");
      }
      atk.entities.push_back(it->second);
    }
    for (const auto& name : a.at("attributes")) {
      const std::size_t idx = table.attribute_index(name.get<std::string>());
      if (idx == table.num_attributes()) {
        throw InputError("ground truth names unknown attribute '" + name.get<std::string>() + "'");
      }
      atk.attributes.push_back(idx);
    }
    std::sort(atk.entities.begin(), atk.entities.end());
    std::sort(atk.attributes.begin(), atk.attributes.end());
    truth.attacks.push_back(std::move(atk));
  }
  return truth;
}

}  // namespace mvsg
