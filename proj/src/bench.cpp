#include "mvsg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>

#include "mvsg/error.hpp"
#include "mvsg/search.hpp"
#include "mvsg/simulator.hpp"

namespace mvsg {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Table at the default parameters except for N; the single attack's views
// give a seed and view set that stay feasible as N grows.
struct ScaledInstance {
  MultiViewGraph graph;
  std::vector<std::size_t> views;
  std::vector<EntityId> seed;
};

ScaledInstance scaled_instance(std::size_t num_entities, std::uint64_t rng_seed) {
  SimScenario s = default_scenario();
  s.num_entities = num_entities;
  s.seed = rng_seed;
  auto [table, truth] = generate(s);
  ScaledInstance inst;
  inst.graph = MultiViewGraph::build(table, compute_ief(table));
  inst.views = truth.attacks.at(0).attributes;
  Rng rng = split_rng(rng_seed, num_entities);
  for (int tries = 0; tries < 100; ++tries) {
    if (auto seed = greedy_seed(inst.graph, inst.views, SeedConfig{inst.views.size()}, rng)) {
      inst.seed = std::move(*seed);
      return inst;
    }
  }
  throw ConvergenceError("bench: no greedy seed on the scaling instance");
}

}  // namespace

std::string_view to_string(SeedMethod m) { return m == SeedMethod::Greedy ? "greedy" : "random"; }

std::vector<SeedTiming> seed_time_trials(const MultiViewGraph& graph, const SeedBenchConfig& cfg) {
  std::vector<SeedTiming> rows;
  for (std::size_t z : cfg.z_values) {
    SeedConfig seed_cfg;
    seed_cfg.z = z;
    if (graph.eligible_views().size() < z) continue;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      Rng rng = split_rng(cfg.rng_seed, z * 1000003 + t);
      const auto views = seed_views(graph, seed_cfg, rng);

      SeedTiming g{SeedMethod::Greedy, z, t};
      auto start = Clock::now();
      while (g.attempts < cfg.greedy_max_calls) {
        ++g.attempts;
        if (greedy_seed(graph, views, seed_cfg, rng)) {
          g.found = true;
          break;
        }
      }
      g.seconds = since(start);
      rows.push_back(g);

      SeedTiming r{SeedMethod::Random, z, t};
      start = Clock::now();
      r.found = random_seed(graph, views, cfg.random_max_nodes, cfg.random_max_draws, rng, &r.attempts)
                    .has_value();
      r.seconds = since(start);
      rows.push_back(r);
    }
  }
  return rows;
}

double median_seconds(const std::vector<SeedTiming>& rows, SeedMethod method, std::size_t z) {
  std::vector<double> v;
  for (const auto& r : rows) {
    if (r.method == method && r.z == z) v.push_back(r.seconds);
  }
  return median(std::move(v));
}

double time_fixed_iterations(const MultiViewGraph& graph, const std::vector<std::size_t>& views,
                             std::vector<EntityId> seed, std::size_t iterations) {
  BlockState block(graph, seed);
  std::vector<std::size_t> current = views;
  const auto start = Clock::now();
  for (std::size_t it = 0; it < iterations; ++it) {
    if (auto v = update_views(block, current.size())) current = std::move(*v);
    update_nodes(block, current);
  }
  return since(start);
}

std::vector<ScalingPoint> scaling_vs_entities(const ScalingConfig& cfg) {
  std::vector<ScalingPoint> out;
  for (std::size_t n : cfg.sizes) {
    const auto inst = scaled_instance(n, cfg.rng_seed);
    std::vector<double> times;
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      times.push_back(time_fixed_iterations(inst.graph, inst.views, inst.seed, cfg.fixed_iterations));
    }
    out.push_back({n, cfg.fixed_iterations, median(times)});
  }
  return out;
}

std::vector<ScalingPoint> scaling_vs_iterations(const ScalingConfig& cfg) {
  std::vector<ScalingPoint> out;
  const auto inst = scaled_instance(cfg.fixed_size, cfg.rng_seed);
  for (std::size_t iters : cfg.iteration_counts) {
    std::vector<double> times;
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      times.push_back(time_fixed_iterations(inst.graph, inst.views, inst.seed, iters));
    }
    out.push_back({cfg.fixed_size, iters, median(times)});
  }
  return out;
}

double linear_r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("linear_r_squared: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("linear_r_squared: constant x");
  if (syy == 0.0) return 1.0;
  return sxy * sxy / (sxx * syy);
}

void write_seed_timings(std::ostream& out, const std::vector<SeedTiming>& rows) {
  out << "method,z,trial,seconds,found,attempts\n";
  out << std::setprecision(9);
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << r.z << ',' << r.trial << ',' << r.seconds << ','
        << (r.found ? 1 : 0) << ',' << r.attempts << '\n';
  }
}

void write_scaling(std::ostream& out, const std::vector<ScalingPoint>& points) {
  out << "num_entities,iterations,seconds\n";
  out << std::setprecision(9);
  for (const auto& p : points) out << p.num_entities << ',' << p.iterations << ',' << p.seconds << '\n';
}

}  // namespace mvsg
