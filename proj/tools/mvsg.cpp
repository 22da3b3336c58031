// mvsg: mine, simulate, evaluate, axioms, bench.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "mvsg/axioms.hpp"
#include "mvsg/bench.hpp"
#include "mvsg/error.hpp"
#include "mvsg/evaluation.hpp"
#include "mvsg/graph.hpp"
#include "mvsg/ingest.hpp"
#include "mvsg/search.hpp"
#include "mvsg/simulator.hpp"
#include "run_context.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mvsg;
using mvsg::cli::RunContext;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::size_t default_threads() {
  if (const char* env = std::getenv("MVSG_THREADS"); env && *env) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || v == 0) throw InputError("MVSG_THREADS must be a positive integer");
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

fs::path manifest_for(const fs::path& out, const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  return out.string() + ".manifest.json";
}

json miner_json(const MinerConfig& c) {
  return {{"z", c.seed.z},
          {"seeds", c.num_seeds},
          {"percentile", c.seed.percentile},
          {"attempt_cap", c.seed.attempt_cap},
          {"restart_cap", c.seed.restart_cap},
          {"jaccard", c.jaccard_threshold},
          {"threads", c.threads},
          {"iteration_cap", c.iteration_cap},
          {"rng_seed", c.rng_seed}};
}

// Shared miner flags.
void add_miner_flags(CLI::App* cmd, MinerConfig& c) {
  cmd->add_option("--z", c.seed.z, "views per block")->capture_default_str();
  cmd->add_option("--seeds", c.num_seeds, "number of seed expansions")->capture_default_str();
  cmd->add_option("--percentile", c.seed.percentile, "value-frequency percentile for view weights")
      ->capture_default_str();
  cmd->add_option("--jaccard", c.jaccard_threshold, "dedup threshold eta")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads (env MVSG_THREADS)");
  cmd->add_option("--rng-seed", c.rng_seed, "master rng seed")->capture_default_str();
  cmd->add_option("--iteration-cap", c.iteration_cap, "per-seed iteration cap")->capture_default_str();
}

// ---- mine ----

struct MineArgs {
  std::string input;
  std::string out;
  std::string manifest;
  std::string id_col = "id";
  std::string delim = ",";
  std::string value_delim = "|";
  bool lowercase = false;
  std::string stopwords;
  std::string save_graph;
  std::string load_graph;
  MinerConfig miner;
};

int cmd_mine(const MineArgs& a) {
  validate(a.miner);
  if (a.delim.size() != 1) throw InputError("--delim must be a single character");
  if (a.input.empty() == a.load_graph.empty()) {
    throw InputError("give exactly one of --input or --load-graph");
  }
  RunContext run("mine");
  const auto t0 = Clock::now();
  MultiViewGraph graph;
  if (!a.load_graph.empty()) {
    std::ifstream in(a.load_graph, std::ios::binary);
    if (!in) throw InputError("cannot open graph snapshot '" + a.load_graph + "'");
    graph = MultiViewGraph::load(in);
    run.add_input(a.load_graph);
  } else {
    LoadOptions opts{a.id_col, a.delim[0], a.value_delim, a.lowercase};
    AttributeTable table = load_attribute_table_file(a.input, opts);
    run.add_input(a.input);
    if (!a.stopwords.empty()) {
      table = apply_stopwords(table, load_stopwords_file(a.stopwords));
      run.add_input(a.stopwords);
    }
    if (table.num_entities() < 2) throw InputError("input has fewer than two entities");
    graph = MultiViewGraph::build(table, compute_ief(table));
  }
  run.timing("load_seconds", since(t0));
  if (!a.save_graph.empty()) graph.save(run.open(a.save_graph));

  const auto t1 = Clock::now();
  MineResult result;
  if (graph.eligible_views().size() < a.miner.seed.z) {
    std::cerr << "mvsg mine: only " << graph.eligible_views().size() << " views have shared values, fewer than z = "
              << a.miner.seed.z << "; no blocks\n";
    result.seeding_failures = a.miner.num_seeds;
  } else {
    result = mine(graph, a.miner);
  }
  run.timing("mine_seconds", since(t1));
  write_jsonl(run.open(a.out), graph, result.blocks);

  run.config() = {{"input", a.input},
                  {"load_graph", a.load_graph},
                  {"id_col", a.id_col},
                  {"delim", a.delim},
                  {"value_delim", a.value_delim},
                  {"lowercase", a.lowercase},
                  {"stopwords", a.stopwords},
                  {"miner", miner_json(a.miner)}};
  run.seeds()["master"] = a.miner.rng_seed;
  run.seeds()["per_seed_stream"] = "split_rng(master, seed_index)";
  run.commit(manifest_for(a.out, a.manifest));

  std::cerr << "mvsg mine: N=" << graph.num_entities() << " K=" << graph.num_views() << " eligible="
            << graph.eligible_views().size() << " blocks=" << result.blocks.size()
            << " seeding_failures=" << result.seeding_failures << " abandoned=" << result.abandoned
            << " capped=" << result.capped << " time=" << std::fixed << std::setprecision(2) << since(t0)
            << "s\n";
  if (result.blocks.empty()) std::cerr << "mvsg mine: warning: every seed failed; output is empty\n";
  if (!result.blocks.empty()) {
    std::cerr << "  top score " << std::setprecision(1) << result.blocks.front().score.total << " ("
              << result.blocks.front().nodes.size() << " entities)\n";
  }
  return 0;
}

// ---- simulate ----

struct SimArgs {
  std::string preset = "high-sync";
  std::optional<std::size_t> entities, attributes, step, attack_size, attack_views, attacks;
  std::optional<double> lambda, tau;
  std::optional<std::string> bias;
  std::uint64_t seed = 0;
  std::string out;
  std::string truth;
  std::string manifest;
};

SimScenario resolve_scenario(const SimArgs& a) {
  SimScenario s = preset(a.preset);
  if (a.attributes || a.step) {
    const std::size_t k = a.attributes.value_or(s.num_attributes());
    s.cardinality = linear_cardinality(k, a.step.value_or(50));
  }
  if (a.entities) s.num_entities = *a.entities;
  if (a.attack_size) s.attack_size = *a.attack_size;
  if (a.attack_views) s.attack_views = *a.attack_views;
  if (a.attacks) s.num_attacks = *a.attacks;
  if (a.lambda) s.mean_values = *a.lambda;
  if (a.tau) s.temperature = *a.tau;
  if (a.bias) s.view_bias = parse_view_bias(*a.bias);
  s.seed = a.seed;
  validate(s);
  return s;
}

int cmd_simulate(const SimArgs& a) {
  const SimScenario s = resolve_scenario(a);
  RunContext run("simulate");
  const auto t0 = Clock::now();
  auto [table, truth] = generate(s);
  run.timing("generate_seconds", since(t0));
  write_attribute_table(run.open(a.out), table);
  const std::string truth_path = a.truth.empty() ? fs::path(a.out).replace_extension(".truth.json").string() : a.truth;
  write_ground_truth(run.open(truth_path), s, truth, table);
  run.config() = {{"preset", a.preset}, {"scenario", json::parse(scenario_to_json(s))}};
  run.seeds()["simulation"] = s.seed;
  run.commit(manifest_for(a.out, a.manifest));
  std::cerr << "mvsg simulate: N=" << s.num_entities << " K=" << s.num_attributes() << " attacks="
            << truth.attacks.size() << " -> " << a.out << ", " << truth_path << '\n';
  return 0;
}

// ---- evaluate ----

struct EvalArgs {
  std::vector<std::string> presets;
  std::string table;
  std::string truth;
  std::string methods = "slicendice,mass,avgdeg,dens,singval";
  std::size_t reps = 5;
  std::uint64_t base_seed = 0;
  std::string out_dir = "eval";
  MinerConfig miner;
};

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    out.push_back(parse_method(name));
  }
  if (out.empty()) throw InputError("--methods is empty");
  return out;
}

int cmd_evaluate(EvalArgs a) {
  const auto methods = parse_methods(a.methods);
  validate(a.miner);
  if (a.reps < 1) throw InputError("--reps must be at least 1");
  if (a.table.empty() != a.truth.empty()) throw InputError("--table and --truth go together");
  if (a.presets.empty() && a.table.empty()) a.presets.assign(std::begin(kPresetNames), std::end(kPresetNames));
  for (const auto& p : a.presets) preset(p);  // rejects unknown names up front

  RunContext run("evaluate");
  std::vector<ScenarioRun> runs;
  json per_run = json::array();
  for (const auto& name : a.presets) {
    for (std::size_t r = 0; r < a.reps; ++r) {
      MinerConfig cfg = a.miner;
      cfg.rng_seed = a.base_seed + r;
      auto sr = evaluate_scenario(name, preset(name), a.base_seed + r, methods, cfg);
      sr.repetition = r;
      std::cerr << "  " << name << " rep " << r << ": ";
      for (const auto& m : sr.results) {
        std::cerr << to_string(m.method) << '=' << std::fixed << std::setprecision(3) << m.curve.auc << ' ';
      }
      std::cerr << '(' << std::setprecision(1) << sr.seconds << "s)\n";
      per_run.push_back({{"scenario", name}, {"repetition", r}, {"sim_seed", a.base_seed + r},
                         {"miner_seed", cfg.rng_seed}, {"seconds", sr.seconds}});
      runs.push_back(std::move(sr));
    }
  }
  if (!a.table.empty()) {
    AttributeTable table = load_attribute_table_file(a.table);
    std::ifstream tin(a.truth);
    if (!tin) throw InputError("cannot open ground truth '" + a.truth + "'");
    const GroundTruth truth = read_ground_truth(tin, table);
    run.add_input(a.table);
    run.add_input(a.truth);
    const auto graph = MultiViewGraph::build(table, compute_ief(table));
    const std::string name = fs::path(a.table).stem().string();
    for (std::size_t r = 0; r < a.reps; ++r) {
      const auto t0 = Clock::now();
      MinerConfig cfg = a.miner;
      cfg.rng_seed = a.base_seed + r;
      ScenarioRun sr;
      sr.scenario = name;
      sr.repetition = r;
      sr.mined = run_seeds(graph, cfg);
      sr.results = compare(graph, truth, sr.mined.blocks, methods, cfg.seed.z, cfg.jaccard_threshold);
      sr.seconds = since(t0);
      per_run.push_back({{"scenario", name}, {"repetition", r}, {"miner_seed", cfg.rng_seed},
                         {"seconds", sr.seconds}});
      runs.push_back(std::move(sr));
    }
  }

  const fs::path dir = a.out_dir;
  write_auc_table(run.open(dir / "auc.csv"), runs);
  write_auc_by_repetition(run.open(dir / "auc_by_repetition.csv"), runs);
  for (Method m : methods) write_pr_points(run.open(dir / ("pr_" + std::string(to_string(m)) + ".csv")), runs, m);
  json names = json::array();
  for (Method m : methods) names.push_back(std::string(to_string(m)));
  run.config() = {{"presets", a.presets}, {"table", a.table}, {"truth", a.truth}, {"methods", names},
                  {"reps", a.reps}, {"miner", miner_json(a.miner)}, {"runs", per_run}};
  run.seeds()["base"] = a.base_seed;
  run.seeds()["rule"] = "repetition r uses simulation seed base+r and miner seed base+r";
  run.commit(dir / "manifest.json");

  std::ostringstream table;
  write_auc_table(table, runs);
  std::cout << table.str();
  return 0;
}

// ---- axioms ----

int cmd_axioms(std::size_t trials, std::uint64_t seed, const std::string& out_dir) {
  if (trials < 1) throw InputError("--trials must be at least 1");
  const auto t0 = Clock::now();
  const auto results = run_axiom_suite(trials, seed);
  const double seconds = since(t0);

  auto find = [&](Metric m, Axiom a) -> const AxiomResult& {
    for (const auto& r : results) {
      if (r.metric == m && r.axiom == a) return r;
    }
    throw std::logic_error("missing axiom cell");
  };
  std::ostringstream grid;
  grid << std::left << std::setw(16) << "axiom";
  for (Metric m : kAllMetrics) grid << std::setw(10) << to_string(m);
  grid << '\n';
  for (Axiom a : kAllAxioms) {
    grid << std::setw(16) << to_string(a);
    for (Metric m : kAllMetrics) grid << (find(m, a).holds() ? "✓" : "✗") << "         ";
    grid << '\n';
  }
  std::cout << grid.str();

  if (!out_dir.empty()) {
    RunContext run("axioms");
    auto& csv = run.open(fs::path(out_dir) / "axioms.csv");
    csv << "metric,axiom,trials,violations,holds,expected\n";
    json dump = json::array();
    for (const auto& r : results) {
      csv << to_string(r.metric) << ',' << to_string(r.axiom) << ',' << r.trials << ',' << r.violations << ','
          << (r.holds() ? 1 : 0) << ',' << (expected_to_hold(r.metric, r.axiom) ? 1 : 0) << '\n';
      if (!r.example) continue;
      auto cfg = [](const Configuration& c) {
        return json{{"n", c.n}, {"mass", c.mass}, {"num_entities", c.num_entities}, {"view_mass", c.view_mass}};
      };
      dump.push_back({{"metric", std::string(to_string(r.metric))},
                      {"axiom", std::string(to_string(r.axiom))},
                      {"more_suspicious", cfg(r.example->more)},
                      {"less_suspicious", cfg(r.example->less)},
                      {"score_more", r.example->score_more},
                      {"score_less", r.example->score_less}});
    }
    run.open(fs::path(out_dir) / "counterexamples.json") << dump.dump(2) << '\n';
    run.open(fs::path(out_dir) / "table.txt") << grid.str();
    run.config() = {{"trials", trials}};
    run.seeds()["axioms"] = seed;
    run.timing("suite_seconds", seconds);
    run.commit(fs::path(out_dir) / "manifest.json");
  }
  std::size_t mismatches = 0;
  for (const auto& r : results) mismatches += r.holds() != expected_to_hold(r.metric, r.axiom);
  std::cerr << "mvsg axioms: " << results.size() << " cells x " << trials << " trials in " << std::fixed
            << std::setprecision(2) << seconds << "s; " << mismatches << " cells differ from the reference table\n";
  return 0;
}

// ---- bench ----

struct BenchArgs {
  std::string out_dir = "bench";
  std::string what = "seed,entities,iterations";
  SeedBenchConfig seed;
  ScalingConfig scaling;
};

int cmd_bench(BenchArgs a) {
  a.seed.rng_seed = a.scaling.rng_seed;
  const bool do_seed = a.what.find("seed") != std::string::npos;
  const bool do_n = a.what.find("entities") != std::string::npos;
  const bool do_it = a.what.find("iterations") != std::string::npos;
  if (!do_seed && !do_n && !do_it) throw InputError("--what selects none of seed, entities, iterations");
  RunContext run("bench");
  const fs::path dir = a.out_dir;
  json summary;
  if (do_seed) {
    SimScenario s = default_scenario();
    s.seed = a.scaling.rng_seed;
    auto [table, truth] = generate(s);
    const auto graph = MultiViewGraph::build(table, compute_ief(table));
    const auto t0 = Clock::now();
    const auto rows = seed_time_trials(graph, a.seed);
    run.timing("seed_seconds", since(t0));
    write_seed_timings(run.open(dir / "seed_times.csv"), rows);
    for (std::size_t z : a.seed.z_values) {
      const double g = median_seconds(rows, SeedMethod::Greedy, z);
      const double r = median_seconds(rows, SeedMethod::Random, z);
      std::cerr << "  z=" << z << " greedy median " << std::scientific << std::setprecision(2) << g
                << "s, random median " << r << "s, ratio " << std::fixed << std::setprecision(1)
                << (g > 0 ? r / g : 0.0) << "x\n";
      summary["seed_ratio_z" + std::to_string(z)] = g > 0 ? r / g : 0.0;
    }
  }
  auto fit = [](const std::vector<ScalingPoint>& pts, bool by_n) {
    std::vector<double> x, y;
    for (const auto& p : pts) {
      x.push_back(static_cast<double>(by_n ? p.num_entities : p.iterations));
      y.push_back(p.seconds);
    }
    return linear_r_squared(x, y);
  };
  if (do_n) {
    const auto pts = scaling_vs_entities(a.scaling);
    write_scaling(run.open(dir / "scaling_entities.csv"), pts);
    summary["r2_entities"] = fit(pts, true);
    std::cerr << "  runtime vs N: R^2 = " << std::setprecision(4) << fit(pts, true) << '\n';
  }
  if (do_it) {
    const auto pts = scaling_vs_iterations(a.scaling);
    write_scaling(run.open(dir / "scaling_iterations.csv"), pts);
    summary["r2_iterations"] = fit(pts, false);
    std::cerr << "  runtime vs iterations: R^2 = " << std::setprecision(4) << fit(pts, false) << '\n';
  }
  run.config() = {{"what", a.what},
                  {"z_values", a.seed.z_values},
                  {"trials", a.seed.trials},
                  {"random_max_nodes", a.seed.random_max_nodes},
                  {"random_max_draws", a.seed.random_max_draws},
                  {"sizes", a.scaling.sizes},
                  {"iteration_counts", a.scaling.iteration_counts},
                  {"fixed_iterations", a.scaling.fixed_iterations},
                  {"fixed_size", a.scaling.fixed_size},
                  {"repeats", a.scaling.repeats},
                  {"summary", summary}};
  run.seeds()["bench"] = a.scaling.rng_seed;
  run.commit(dir / "manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine suspicious multi-attribute entity groups."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mvsg 1.0");

  std::size_t threads = 1;
  try {
    threads = default_threads();
  } catch (const InputError& e) {
    std::cerr << "mvsg: " << e.what() << '\n';
    return 1;
  }

  MineArgs mine_args;
  mine_args.miner.threads = threads;
  auto* mine_cmd = app.add_subcommand("mine", "mine ranked suspicious blocks from a CSV table");
  mine_cmd->add_option("--input,-i", mine_args.input, "input CSV");
  mine_cmd->add_option("--out,-o", mine_args.out, "output JSONL")->required();
  mine_cmd->add_option("--manifest", mine_args.manifest, "manifest path (default <out>.manifest.json)");
  mine_cmd->add_option("--id-col", mine_args.id_col, "id column name")->capture_default_str();
  mine_cmd->add_option("--delim", mine_args.delim, "field delimiter")->capture_default_str();
  mine_cmd->add_option("--value-delim", mine_args.value_delim, "multi-value delimiter")->capture_default_str();
  mine_cmd->add_flag("--lowercase", mine_args.lowercase, "lowercase tokens before matching");
  mine_cmd->add_option("--stopwords", mine_args.stopwords, "per-attribute stopword file");
  mine_cmd->add_option("--save-graph", mine_args.save_graph, "write a binary graph snapshot");
  mine_cmd->add_option("--load-graph", mine_args.load_graph, "read a graph snapshot instead of --input");
  add_miner_flags(mine_cmd, mine_args.miner);

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "generate a table with planted attacks");
  sim_cmd->add_option("--preset", sim.preset, "high-sync | low-sync | high-signal | low-signal | high-dim")
      ->capture_default_str();
  sim_cmd->add_option("--entities", sim.entities, "N");
  sim_cmd->add_option("--attributes", sim.attributes, "K");
  sim_cmd->add_option("--cardinality-step", sim.step, "u_i = step * i");
  sim_cmd->add_option("--attack-size", sim.attack_size, "n");
  sim_cmd->add_option("--attack-views", sim.attack_views, "k");
  sim_cmd->add_option("--attacks", sim.attacks, "c");
  sim_cmd->add_option("--lambda", sim.lambda, "mean values per normal cell");
  sim_cmd->add_option("--tau", sim.tau, "attack temperature (>= 1)");
  sim_cmd->add_option("--bias", sim.bias, "uniform | proportional | inverse");
  sim_cmd->add_option("--seed", sim.seed, "rng seed")->capture_default_str();
  sim_cmd->add_option("--out,-o", sim.out, "output CSV")->required();
  sim_cmd->add_option("--truth", sim.truth, "ground-truth JSON (default <out>.truth.json)");
  sim_cmd->add_option("--manifest", sim.manifest, "manifest path");

  EvalArgs ev;
  ev.miner.threads = threads;
  auto* ev_cmd = app.add_subcommand("evaluate", "precision/recall of SliceNDice and rescored baselines");
  ev_cmd->add_option("--preset", ev.presets, "scenario presets (repeatable; default all five)");
  ev_cmd->add_option("--table", ev.table, "scenario table CSV");
  ev_cmd->add_option("--truth", ev.truth, "scenario ground-truth JSON");
  ev_cmd->add_option("--methods", ev.methods, "comma list")->capture_default_str();
  ev_cmd->add_option("--reps", ev.reps, "repetitions")->capture_default_str();
  ev_cmd->add_option("--base-seed", ev.base_seed, "repetition r uses seed base+r")->capture_default_str();
  ev_cmd->add_option("--out-dir", ev.out_dir, "report directory")->capture_default_str();
  add_miner_flags(ev_cmd, ev.miner);

  std::size_t ax_trials = 1000;
  std::uint64_t ax_seed = 0;
  std::string ax_out;
  auto* ax_cmd = app.add_subcommand("axioms", "axiom pass/fail grid with counterexamples");
  ax_cmd->add_option("--trials", ax_trials, "configurations per cell")->capture_default_str();
  ax_cmd->add_option("--rng-seed", ax_seed, "sampler seed")->capture_default_str();
  ax_cmd->add_option("--out-dir", ax_out, "write csv, counterexamples and manifest here");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "seed-time and scaling benchmarks");
  bench_cmd->add_option("--out-dir", bench.out_dir, "output directory")->capture_default_str();
  bench_cmd->add_option("--what", bench.what, "subset of seed,entities,iterations")->capture_default_str();
  bench_cmd->add_option("--trials", bench.seed.trials, "seed-time trials per z")->capture_default_str();
  bench_cmd->add_option("--z", bench.seed.z_values, "z values")->delimiter(',');
  bench_cmd->add_option("--random-max-nodes", bench.seed.random_max_nodes, "random seed size cap")
      ->capture_default_str();
  bench_cmd->add_option("--random-max-draws", bench.seed.random_max_draws, "random draws before giving up")
      ->capture_default_str();
  bench_cmd->add_option("--sizes", bench.scaling.sizes, "N values")->delimiter(',');
  bench_cmd->add_option("--iterations", bench.scaling.iteration_counts, "iteration counts")->delimiter(',');
  bench_cmd->add_option("--fixed-iterations", bench.scaling.fixed_iterations, "iterations for the N sweep")
      ->capture_default_str();
  bench_cmd->add_option("--fixed-size", bench.scaling.fixed_size, "N for the iteration sweep")
      ->capture_default_str();
  bench_cmd->add_option("--repeats", bench.scaling.repeats, "timing repeats (median)")->capture_default_str();
  bench_cmd->add_option("--rng-seed", bench.scaling.rng_seed, "rng seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*mine_cmd) return cmd_mine(mine_args);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*ev_cmd) return cmd_evaluate(ev);
    if (*ax_cmd) return cmd_axioms(ax_trials, ax_seed, ax_out);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const InputError& e) {
    std::cerr << "mvsg: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "mvsg: error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
