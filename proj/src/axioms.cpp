#include "mvsg/axioms.hpp"

#include <cmath>
#include <random>

#include "mvsg/graph.hpp"
#include "mvsg/metric.hpp"

namespace mvsg {

namespace {

constexpr std::size_t kMaxNodes = 40;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  std::size_t integer(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  // Background graph with k views; densities spread over six decades.
  Configuration background(std::size_t k) {
    Configuration c;
    c.num_entities = integer(100, 100000);
    const double volume = pair_volume(c.num_entities);
    for (std::size_t i = 0; i < k; ++i) c.view_mass.push_back(log_uniform(1e-3, 1e3) * volume);
    c.mass.assign(k, 0.0);
    return c;
  }

  // Block density as a multiple of the view density, strictly above it.
  double contrast() { return log_uniform(1.05, 50.0); }

 private:
  std::mt19937_64 rng_;
};

double graph_density(const Configuration& c, std::size_t i) {
  return c.view_mass[i] / pair_volume(c.num_entities);
}

void fill_masses(Configuration& c, Sampler& s) {
  const double v = pair_volume(c.n);
  for (std::size_t i = 0; i < c.mass.size(); ++i) c.mass[i] = graph_density(c, i) * s.contrast() * v;
}

// Returns (more suspicious, less suspicious).
std::pair<Configuration, Configuration> draw_pair(Axiom axiom, Sampler& s) {
  const std::size_t k = s.integer(axiom == Axiom::CrossView ? 2 : 1, 5);
  Configuration base = s.background(k);
  switch (axiom) {
    case Axiom::Mass: {
      base.n = s.integer(2, kMaxNodes);
      fill_masses(base, s);
      Configuration less = base;
      const std::size_t i = s.integer(0, k - 1);
      const double floor = graph_density(base, i) * pair_volume(base.n) / base.mass[i];
      less.mass[i] = base.mass[i] * (floor + (1.0 - floor) * s.uniform(0.05, 0.95));
      return {base, less};
    }
    case Axiom::Size: {
      Configuration less = base;
      less.n = s.integer(2, kMaxNodes - 1);
      base.n = s.integer(less.n + 1, kMaxNodes);
      for (std::size_t i = 0; i < k; ++i) {
        const double rho = graph_density(base, i) * s.contrast();
        base.mass[i] = rho * pair_volume(base.n);
        less.mass[i] = rho * pair_volume(less.n);
      }
      return {base, less};
    }
    case Axiom::Contrast: {
      base.n = s.integer(2, kMaxNodes);
      fill_masses(base, s);
      Configuration less = base;
      const std::size_t i = s.integer(0, k - 1);
      const double p = graph_density(base, i);
      const double rho = base.mass[i] / pair_volume(base.n);
      const double denser = p + (rho - p) * s.uniform(0.05, 0.95);
      less.view_mass[i] = denser * pair_volume(base.num_entities);
      return {base, less};
    }
    case Axiom::Concentration: {
      Configuration less = base;
      less.n = s.integer(3, kMaxNodes);
      fill_masses(less, s);
      base.mass = less.mass;
      base.n = s.integer(2, less.n - 1);
      return {base, less};
    }
    case Axiom::CrossView: {
      base.n = s.integer(2, kMaxNodes);
      fill_masses(base, s);
      std::size_t i = s.integer(0, k - 1);
      std::size_t j = s.integer(0, k - 2);
      if (j >= i) ++j;
      if (graph_density(base, i) == graph_density(base, j)) base.view_mass[j] *= 2.0;
      if (graph_density(base, i) > graph_density(base, j)) std::swap(i, j);
      const double v = pair_volume(base.n);
      const double small = graph_density(base, j) * s.contrast() * v;
      const double large = small * (1.0 + s.uniform(0.05, 5.0));
      Configuration less = base;
      base.mass[i] = large;
      base.mass[j] = small;
      less.mass[i] = small;
      less.mass[j] = large;
      return {base, less};
    }
  }
  return {base, base};
}

}  // namespace

std::string_view to_string(Axiom a) {
  switch (a) {
    case Axiom::Mass: return "mass";
    case Axiom::Size: return "size";
    case Axiom::Contrast: return "contrast";
    case Axiom::Concentration: return "concentration";
    case Axiom::CrossView: return "cross-view";
  }
  return "?";
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Nll: return "nll";
    case Metric::Mass: return "mass";
    case Metric::AvgDeg: return "avgdeg";
    case Metric::Dens: return "dens";
    case Metric::SingVal: return "singval";
  }
  return "?";
}

double score_configuration(Metric metric, Axiom axiom, const Configuration& c) {
  const double v = pair_volume(c.n);
  const double big_v = pair_volume(c.num_entities);
  double total_mass = 0.0;
  for (double m : c.mass) total_mass += m;
  switch (metric) {
    case Metric::Nll: {
      double f = 0.0;
      const bool density_form = axiom == Axiom::Size || axiom == Axiom::Contrast;
      for (std::size_t i = 0; i < c.mass.size(); ++i) {
        f += density_form ? density_nll(c.mass[i] / v, c.view_mass[i] / big_v, v)
                          : view_nll(c.mass[i], v, c.view_mass[i], big_v);
      }
      return f;
    }
    case Metric::Mass: return total_mass;
    case Metric::AvgDeg: return total_mass / static_cast<double>(c.n);
    case Metric::Dens: return total_mass / v;
    case Metric::SingVal: {
      DenseMatrix a{c.n, std::vector<double>(c.n * c.n, total_mass / v)};
      for (std::size_t r = 0; r < c.n; ++r) a.at(r, r) = 0.0;
      return leading_singular_value(a);
    }
  }
  return 0.0;
}

std::vector<AxiomResult> run_axiom_suite(std::size_t trials, std::uint64_t seed) {
  std::vector<AxiomResult> results;
  for (Axiom axiom : kAllAxioms) {
    Sampler sampler(seed + static_cast<std::uint64_t>(axiom) * 0x9E3779B97F4A7C15ULL);
    std::vector<AxiomResult> row;
    for (Metric m : kAllMetrics) row.push_back({m, axiom, 0, 0, std::nullopt});
    for (std::size_t t = 0; t < trials; ++t) {
      auto [more, less] = draw_pair(axiom, sampler);
      for (AxiomResult& r : row) {
        const double hi = score_configuration(r.metric, axiom, more);
        const double lo = score_configuration(r.metric, axiom, less);
        ++r.trials;
        if (!(hi > lo)) {
          ++r.violations;
          if (!r.example) r.example = Counterexample{more, less, hi, lo};
        }
      }
    }
    results.insert(results.end(), row.begin(), row.end());
  }
  return results;
}

bool expected_to_hold(Metric metric, Axiom axiom) {
  if (metric == Metric::Nll) return true;
  switch (axiom) {
    case Axiom::Mass: return true;
    case Axiom::Size: return metric != Metric::Dens;
    case Axiom::Contrast: return false;
    case Axiom::Concentration: return metric != Metric::Mass;
    case Axiom::CrossView: return false;
  }
  return false;
}

}  // namespace mvsg
