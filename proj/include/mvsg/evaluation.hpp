#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mvsg/graph.hpp"
#include "mvsg/metric.hpp"
#include "mvsg/search.hpp"
#include "mvsg/simulator.hpp"

namespace mvsg {

// Every (unordered entity pair, view) with nonzero pair weight, in ascending
// (view, a, b) order, each labeled planted or not.
class BehaviorSet {
 public:
  BehaviorSet() = default;
  BehaviorSet(std::size_t num_entities, std::vector<std::uint64_t> keys, std::vector<char> positive);

  std::size_t size() const { return keys_.size(); }
  std::size_t num_positive() const;
  bool positive(std::size_t index) const { return positive_[index] != 0; }
  const std::vector<char>& labels() const { return positive_; }

  std::uint64_t key(EntityId a, EntityId b, std::size_t view) const;
  // Index of the behavior, or size() when the pair has zero weight in view.
  std::size_t find(EntityId a, EntityId b, std::size_t view) const;

  struct Triple {
    EntityId a;
    EntityId b;
    std::size_t view;
  };
  Triple decode(std::size_t index) const;

 private:
  std::size_t num_entities_ = 0;
  std::vector<std::uint64_t> keys_;
  std::vector<char> positive_;
};

// Enumerates behaviors through the value -> carriers index (pairs within each
// value's carrier list, deduplicated), never a dense tensor.
BehaviorSet label_behaviors(const MultiViewGraph& graph, const GroundTruth& truth);

struct ScoredBlock {
  std::vector<EntityId> nodes;  // sorted
  std::vector<std::size_t> views;
  double score = 0.0;
};

struct Penalties {
  std::vector<double> value;  // summed scores of covering blocks
  std::vector<char> covered;  // inside at least one block
};

Penalties penalize(const BehaviorSet& behaviors, const std::vector<ScoredBlock>& blocks);

struct PrPoint {
  double threshold;
  double precision;
  double recall;
};

struct PrCurve {
  std::vector<PrPoint> points;  // starts at (inf, 1, 0)
  double auc = 0.0;             // step-wise: sum (R_k - R_{k-1}) P_k
};

// Sweeps thresholds over the distinct penalties of covered behaviors, highest
// first, flagging behaviors with penalty >= threshold. Throws
// PreconditionError when no label is positive.
PrCurve pr_curve(const Penalties& penalties, const std::vector<char>& labels);

enum class Method { SliceNDice, Mass, AvgDeg, Dens, SingVal };
inline constexpr Method kAllMethods[] = {Method::SliceNDice, Method::Mass, Method::AvgDeg,
                                         Method::Dens, Method::SingVal};
std::string_view to_string(Method m);
Method parse_method(std::string_view name);

// Blocks a method reports. SliceNDice keeps the miner's ranking and scores.
// A baseline rescored every raw mined block: it picks the z views its own
// metric rates highest, scores the block on their aggregate, then the list is
// re-ranked by that score and deduplicated with the same eta.
std::vector<ScoredBlock> method_blocks(Method method, const MultiViewGraph& graph,
                                       const std::vector<MinedBlock>& raw, std::size_t z,
                                       double eta);

struct MethodResult {
  Method method;
  PrCurve curve;
  std::size_t num_blocks = 0;
};

std::vector<MethodResult> compare(const MultiViewGraph& graph, const GroundTruth& truth,
                                  const std::vector<MinedBlock>& raw, const std::vector<Method>& methods,
                                  std::size_t z, double eta);

struct ScenarioRun {
  std::string scenario;
  std::size_t repetition = 0;
  std::vector<MethodResult> results;
  MineResult mined;
  double seconds = 0.0;
};

// Simulates `scenario` (seed overridden by `sim_seed`), builds the graph,
// mines with `cfg` and compares the methods.
ScenarioRun evaluate_scenario(const std::string& name, SimScenario scenario, std::uint64_t sim_seed,
                              const std::vector<Method>& methods, const MinerConfig& cfg);

// Header comment line naming the baseline substitution, then
// method,scenario,auc_pr rows (mean over repetitions, in first-seen order).
void write_auc_table(std::ostream& out, const std::vector<ScenarioRun>& runs);
// method,scenario,repetition,auc_pr
void write_auc_by_repetition(std::ostream& out, const std::vector<ScenarioRun>& runs);
// scenario,repetition,threshold,precision,recall for one method.
void write_pr_points(std::ostream& out, const std::vector<ScenarioRun>& runs, Method method);

}  // namespace mvsg
