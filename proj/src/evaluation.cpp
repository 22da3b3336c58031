#include "mvsg/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>

#include "mvsg/error.hpp"

namespace mvsg {

BehaviorSet::BehaviorSet(std::size_t num_entities, std::vector<std::uint64_t> keys,
                         std::vector<char> positive)
    : num_entities_(num_entities), keys_(std::move(keys)), positive_(std::move(positive)) {}

std::size_t BehaviorSet::num_positive() const {
  return static_cast<std::size_t>(std::count(positive_.begin(), positive_.end(), 1));
}

std::uint64_t BehaviorSet::key(EntityId a, EntityId b, std::size_t view) const {
  if (a > b) std::swap(a, b);
  const auto n = static_cast<std::uint64_t>(num_entities_);
  return (static_cast<std::uint64_t>(view) * n + a) * n + b;
}

std::size_t BehaviorSet::find(EntityId a, EntityId b, std::size_t view) const {
  const auto k = key(a, b, view);
  auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
  if (it == keys_.end() || *it != k) return keys_.size();
  return static_cast<std::size_t>(it - keys_.begin());
}

BehaviorSet::Triple BehaviorSet::decode(std::size_t index) const {
  const auto n = static_cast<std::uint64_t>(num_entities_);
  std::uint64_t k = keys_[index];
  const auto b = static_cast<EntityId>(k % n);
  k /= n;
  const auto a = static_cast<EntityId>(k % n);
  return {a, b, static_cast<std::size_t>(k / n)};
}

BehaviorSet label_behaviors(const MultiViewGraph& graph, const GroundTruth& truth) {
  const std::size_t n = graph.num_entities();
  std::vector<std::uint64_t> keys;
  BehaviorSet keyer(n, {}, {});
  for (std::size_t i = 0; i < graph.num_views(); ++i) {
    const View& view = graph.view(i);
    const std::size_t start = keys.size();
    for (ValueId v = 0; v < view.num_values(); ++v) {
      if (view.weights[v] <= 0.0) continue;
      auto carriers = view.carriers_of(v);
      for (std::size_t x = 0; x < carriers.size(); ++x) {
        for (std::size_t y = x + 1; y < carriers.size(); ++y) {
          keys.push_back(keyer.key(carriers[x], carriers[y], i));
        }
      }
    }
    std::sort(keys.begin() + static_cast<std::ptrdiff_t>(start), keys.end());
    keys.erase(std::unique(keys.begin() + static_cast<std::ptrdiff_t>(start), keys.end()), keys.end());
  }
  BehaviorSet unlabeled(n, std::move(keys), {});
  std::vector<char> positive(unlabeled.size(), 0);
  for (std::size_t idx = 0; idx < unlabeled.size(); ++idx) {
    const auto t = unlabeled.decode(idx);
    positive[idx] = truth.is_planted(t.a, t.b, t.view) ? 1 : 0;
  }
  std::vector<std::uint64_t> sorted_keys;
  sorted_keys.reserve(unlabeled.size());
  for (std::size_t idx = 0; idx < unlabeled.size(); ++idx) {
    const auto t = unlabeled.decode(idx);
    sorted_keys.push_back(unlabeled.key(t.a, t.b, t.view));
  }
  return BehaviorSet(n, std::move(sorted_keys), std::move(positive));
}

Penalties penalize(const BehaviorSet& behaviors, const std::vector<ScoredBlock>& blocks) {
  Penalties p{std::vector<double>(behaviors.size(), 0.0), std::vector<char>(behaviors.size(), 0)};
  for (const ScoredBlock& block : blocks) {
    for (std::size_t x = 0; x < block.nodes.size(); ++x) {
      for (std::size_t y = x + 1; y < block.nodes.size(); ++y) {
        for (std::size_t view : block.views) {
          const std::size_t idx = behaviors.find(block.nodes[x], block.nodes[y], view);
          if (idx == behaviors.size()) continue;
          p.value[idx] += block.score;
          p.covered[idx] = 1;
        }
      }
    }
  }
  return p;
}

PrCurve pr_curve(const Penalties& penalties, const std::vector<char>& labels) {
  const std::size_t total_positive =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (total_positive == 0) throw PreconditionError("pr_curve: no positive behaviors");

  std::vector<std::size_t> flagged;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (penalties.covered[i]) flagged.push_back(i);
  }
  std::stable_sort(flagged.begin(), flagged.end(), [&](std::size_t a, std::size_t b) {
    return penalties.value[a] > penalties.value[b];
  });

  PrCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 1.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < flagged.size();) {
    const double threshold = penalties.value[flagged[k]];
    // Tied penalties enter together.
    while (k < flagged.size() && penalties.value[flagged[k]] == threshold) {
      if (labels[flagged[k]]) {
        ++tp;
      } else {
        ++fp;
      }
      ++k;
    }
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(total_positive);
    curve.auc += (recall - prev_recall) * precision;
    prev_recall = recall;
    curve.points.push_back({threshold, precision, recall});
  }
  return curve;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::SliceNDice: return "slicendice";
    case Method::Mass: return "mass";
    case Method::AvgDeg: return "avgdeg";
    case Method::Dens: return "dens";
    case Method::SingVal: return "singval";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  throw InputError("unknown method '" + std::string(name) + "'");
}

namespace {

Baseline baseline_of(Method m) {
  switch (m) {
    case Method::Mass: return Baseline::Mass;
    case Method::AvgDeg: return Baseline::AvgDeg;
    case Method::Dens: return Baseline::Dens;
    case Method::SingVal: return Baseline::SingVal;
    case Method::SliceNDice: break;
  }
  throw PreconditionError("SliceNDice is not a baseline");
}

struct RankedBlock {
  ScoredBlock block;
  std::size_t seed_id;
};

}  // namespace

std::vector<ScoredBlock> method_blocks(Method method, const MultiViewGraph& graph,
                                       const std::vector<MinedBlock>& raw, std::size_t z,
                                       double eta) {
  std::vector<ScoredBlock> out;
  if (method == Method::SliceNDice) {
    for (const MinedBlock& b : jaccard_dedup(raw, eta)) out.push_back({b.nodes, b.views, b.score.total});
    return out;
  }
  const Baseline kind = baseline_of(method);
  std::vector<MinedBlock> rescored;
  rescored.reserve(raw.size());
  for (const MinedBlock& b : raw) {
    const BlockState block(graph, b.nodes);
    std::vector<std::pair<double, std::size_t>> per_view;
    for (std::size_t i = 0; i < graph.num_views(); ++i) {
      const std::size_t single[] = {i};
      per_view.emplace_back(baseline_score(kind, block, single), i);
    }
    std::stable_sort(per_view.begin(), per_view.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    MinedBlock r;
    r.nodes = b.nodes;
    for (std::size_t k = 0; k < std::min(z, per_view.size()); ++k) r.views.push_back(per_view[k].second);
    std::sort(r.views.begin(), r.views.end());
    r.score.total = baseline_score(kind, block, r.views);
    r.seed_id = b.seed_id;
    rescored.push_back(std::move(r));
  }
  std::stable_sort(rescored.begin(), rescored.end(), [](const MinedBlock& x, const MinedBlock& y) {
    if (x.score.total != y.score.total) return x.score.total > y.score.total;
    return x.seed_id < y.seed_id;
  });
  for (const MinedBlock& b : jaccard_dedup(std::move(rescored), eta)) {
    out.push_back({b.nodes, b.views, b.score.total});
  }
  return out;
}

std::vector<MethodResult> compare(const MultiViewGraph& graph, const GroundTruth& truth,
                                  const std::vector<MinedBlock>& raw, const std::vector<Method>& methods,
                                  std::size_t z, double eta) {
  const BehaviorSet behaviors = label_behaviors(graph, truth);
  std::vector<MethodResult> results;
  for (Method m : methods) {
    auto blocks = method_blocks(m, graph, raw, z, eta);
    MethodResult r{m, pr_curve(penalize(behaviors, blocks), behaviors.labels()), blocks.size()};
    results.push_back(std::move(r));
  }
  return results;
}

ScenarioRun evaluate_scenario(const std::string& name, SimScenario scenario, std::uint64_t sim_seed,
                              const std::vector<Method>& methods, const MinerConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  scenario.seed = sim_seed;
  auto [table, truth] = generate(scenario);
  const auto graph = MultiViewGraph::build(table, compute_ief(table));
  ScenarioRun run;
  run.scenario = name;
  run.mined = run_seeds(graph, cfg);
  run.results = compare(graph, truth, run.mined.blocks, methods, cfg.seed.z, cfg.jaccard_threshold);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

void write_auc_table(std::ostream& out, const std::vector<ScenarioRun>& runs) {
  // (method, scenario) -> (sum, count), kept in first-seen order
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> acc;
  for (const ScenarioRun& run : runs) {
    for (const MethodResult& r : run.results) {
      auto key = std::make_pair(std::string(to_string(r.method)), run.scenario);
      auto [it, inserted] = acc.emplace(key, std::make_pair(0.0, std::size_t{0}));
      if (inserted) order.push_back(key);
      it->second.first += r.curve.auc;
      ++it->second.second;
    }
  }
  out << "# baselines rescore the blocks found by the likelihood search with their own metric "
         "and view choice; they are not independent pipelines\n";
  out << "method,scenario,auc_pr\n";
  out << std::setprecision(6) << std::fixed;
  for (const auto& key : order) {
    const auto& [sum, count] = acc[key];
    out << key.first << ',' << key.second << ',' << sum / static_cast<double>(count) << '\n';
  }
}

void write_auc_by_repetition(std::ostream& out, const std::vector<ScenarioRun>& runs) {
  out << "method,scenario,repetition,auc_pr\n";
  out << std::setprecision(6) << std::fixed;
  for (const ScenarioRun& run : runs) {
    for (const MethodResult& r : run.results) {
      out << to_string(r.method) << ',' << run.scenario << ',' << run.repetition << ','
          << r.curve.auc << '\n';
    }
  }
}

void write_pr_points(std::ostream& out, const std::vector<ScenarioRun>& runs, Method method) {
  out << "scenario,repetition,threshold,precision,recall\n";
  out << std::setprecision(10);
  for (const ScenarioRun& run : runs) {
    for (const MethodResult& r : run.results) {
      if (r.method != method) continue;
      for (const PrPoint& p : r.curve.points) {
        out << run.scenario << ',' << run.repetition << ',';
        if (std::isinf(p.threshold)) {
          out << "inf";
        } else {
          out << p.threshold;
        }
        out << ',' << p.precision << ',' << p.recall << '\n';
      }
    }
  }
}

}  // namespace mvsg
