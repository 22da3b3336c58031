#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace mvsg {

// Monotonicity desiderata a block scoring metric should obey.
enum class Axiom { Mass, Size, Contrast, Concentration, CrossView };
inline constexpr Axiom kAllAxioms[] = {Axiom::Mass, Axiom::Size, Axiom::Contrast,
                                       Axiom::Concentration, Axiom::CrossView};

// The scorers compared: the MVERE likelihood and the four baselines.
enum class Metric { Nll, Mass, AvgDeg, Dens, SingVal };
inline constexpr Metric kAllMetrics[] = {Metric::Nll, Metric::Mass, Metric::AvgDeg, Metric::Dens,
                                         Metric::SingVal};

std::string_view to_string(Axiom a);
std::string_view to_string(Metric m);

// Abstract block: n nodes with per-view masses c_i inside a graph of N nodes
// with per-view masses C_i.
struct Configuration {
  std::size_t n = 0;
  std::vector<double> mass;
  std::size_t num_entities = 0;
  std::vector<double> view_mass;
};

// Scores a configuration. Nll uses the mass form for Mass, Concentration and
// CrossView and the density form for Size and Contrast. SingVal materializes
// the uniform n x n aggregated adjacency and runs power iteration.
double score_configuration(Metric metric, Axiom axiom, const Configuration& config);

struct Counterexample {
  Configuration more;  // the block the axiom says is more suspicious
  Configuration less;
  double score_more = 0.0;
  double score_less = 0.0;
};

struct AxiomResult {
  Metric metric;
  Axiom axiom;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::optional<Counterexample> example;
  bool holds() const { return violations == 0; }
};

// Draws `trials` random feasible (rho_i > P_i) configuration pairs per axiom
// and counts pairs where the metric fails to rank `more` strictly above
// `less`. Every metric sees the same pairs.
std::vector<AxiomResult> run_axiom_suite(std::size_t trials, std::uint64_t seed);

// Whether the published comparison table marks the metric as obeying the
// axiom.
bool expected_to_hold(Metric metric, Axiom axiom);

}  // namespace mvsg
