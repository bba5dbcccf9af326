// pgsearch command-line driver: map generation, training, rollouts, method comparison,
// proposition checks and timing.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pgsearch/baselines.hpp"
#include "pgsearch/env.hpp"
#include "pgsearch/eval.hpp"
#include "pgsearch/features.hpp"
#include "pgsearch/policy.hpp"
#include "pgsearch/probmap.hpp"
#include "pgsearch/rng.hpp"
#include "pgsearch/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pgsearch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Sub-streams derived from --seed.
constexpr std::uint64_t kMixtureStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kRunStream = 3;
constexpr std::uint64_t kVerifyStream = 4;
constexpr std::uint64_t kTimingStream = 5;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<Cell> parse_start(const std::string& text) {
  if (text == "random") return std::nullopt;
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--start expects X,Y or random, got '" + text + "'");
  auto number = [&](std::string_view s) {
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw UsageError("bad coordinate in --start '" + text + "'");
    return v;
  };
  const std::string_view sv(text);
  return Cell{number(sv.substr(0, comma)), number(sv.substr(comma + 1))};
}

std::string start_text(const std::optional<Cell>& c) {
  return c ? std::to_string(c->x) + "," + std::to_string(c->y) : "random";
}

GridSpec size_or_usage(const std::string& text) {
  try {
    return parse_size(text);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void prepare_out(const std::string& out) {
  if (out.empty()) throw UsageError("--out DIR is required");
  fs::create_directories(out);
}

void echo_config(const std::string& out, const json& config) {
  write_text(fs::path(out) / "config.json", config.dump(2) + "\n");
}

json env_json(const EnvConfig& env) {
  return {{"gamma", env.gamma}, {"horizon", env.horizon}, {"start", start_text(env.start_cell)}};
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string size = "30x30";
  std::uint64_t seed = 0;
  int components = 3;
  std::string mixture;
  std::string ring;
  std::string out;
};

int cmd_generate_map(const GenerateArgs& a) {
  const GridSpec spec = size_or_usage(a.size);
  prepare_out(a.out);
  json cfg{{"command", "generate-map"}, {"size", a.size}, {"seed", a.seed}};
  ProbabilityMap map = ProbabilityMap::zeros(spec);
  if (!a.ring.empty()) {
    const auto parts = split(a.ring, ',');
    if (parts.size() != 4) throw UsageError("--ring expects CX,CY,RADIUS,WIDTH");
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < 4; ++i) v[i] = std::stod(parts[i]);
    map = ring_map(spec, {v[0], v[1]}, v[2], v[3]);
    cfg["ring"] = {{"center", {v[0], v[1]}}, {"radius", v[2]}, {"width", v[3]}};
  } else {
    GaussianMixture mixture = a.mixture.empty()
                                  ? random_mixture(a.components, spec, derive_seed(a.seed, {kMixtureStream}))
                                  : load_mixture(a.mixture);
    if (a.mixture.empty()) {
      cfg["random_components"] = a.components;
    } else {
      cfg["mixture_file"] = a.mixture;
    }
    map = generate_map(mixture, spec);
    save_mixture(mixture, fs::path(a.out) / "mixture.json");
  }
  save_map(map, fs::path(a.out) / "map.csv");
  echo_config(a.out, cfg);
  std::cout << "wrote " << (fs::path(a.out) / "map.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string map;
  std::string mixture;
  int components = 0;
  std::string size = "30x30";
  std::string design = "multires";
  std::string baseline = "per-step";
  std::string start = "random";
  double gamma = 0.9;
  int horizon = 300;
  int rollouts = 20;
  int iterations = 2000;
  double lr = kDefaultLearningRate;
  int snapshot_every = 0;
  std::uint64_t seed = 0;
  std::string out;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a) {
  const int sources = !a.map.empty() + !a.mixture.empty() + (a.components > 0);
  if (sources != 1) throw UsageError("train needs exactly one of --map, --mixture or --random-components");
  prepare_out(a.out);
  json cfg{{"command", "train"}, {"seed", a.seed}};

  std::optional<MapSource> source;
  if (!a.map.empty()) {
    source = MapSource::fixed(load_map(a.map));
    cfg["map_file"] = a.map;
  } else if (!a.mixture.empty()) {
    const GridSpec spec = size_or_usage(a.size);
    source = MapSource::fixed(generate_map(load_mixture(a.mixture), spec));
    cfg["mixture_file"] = a.mixture;
    cfg["size"] = a.size;
  } else {
    source = MapSource::regenerated(size_or_usage(a.size), a.components);
    cfg["random_components"] = a.components;
    cfg["size"] = a.size;
  }
  const GridSpec& spec = source->spec();

  FeatureDesign design;
  BaselineKind baseline;
  try {
    design = parse_design(a.design, spec);
    baseline = parse_baseline(a.baseline);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }

  TrainConfig tc;
  tc.iterations = a.iterations;
  tc.rollouts_per_iter = a.rollouts;
  tc.learning_rate = a.lr;
  tc.baseline = baseline;
  tc.env.gamma = a.gamma;
  tc.env.horizon = a.horizon;
  tc.env.start_cell = parse_start(a.start);
  tc.seed = derive_seed(a.seed, {kTrainStream});
  tc.snapshot_every = a.snapshot_every;
  try {
    tc.validate();
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
  cfg["design"] = {{"kind", design.name()}, {"k", design.k}, {"window_radius", design.window_radius}};
  cfg["env"] = env_json(tc.env);
  cfg["iterations"] = tc.iterations;
  cfg["rollouts"] = tc.rollouts_per_iter;
  cfg["lr"] = tc.learning_rate;
  cfg["baseline"] = baseline_name(tc.baseline);
  cfg["snapshot_every"] = tc.snapshot_every;
  cfg["train_seed"] = tc.seed;
  echo_config(a.out, cfg);

  const int every = std::max(1, tc.iterations / 20);
  auto progress = [&](const TrainRecord& r) {
    if (a.quiet) return;
    if (r.iteration % every == 0 || r.iteration + 1 == tc.iterations) {
      std::cout << "iter " << r.iteration << "  mean discounted return " << r.mean_discounted_return
                << "  grad norm " << r.grad_norm << "\n";
    }
  };
  const auto result = train(*source, Policy(design), tc, progress);
  save_policy(result.policy, fs::path(a.out) / "policy.json");
  save_train_log(result.log, fs::path(a.out) / "train_log.csv");
  std::cout << "wrote " << (fs::path(a.out) / "policy.json").string() << " and train_log.csv\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string policy;
  std::string map;
  std::string start = "random";
  double gamma = 0.9;
  int horizon = 300;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_run(const RunArgs& a) {
  prepare_out(a.out);
  const auto map = load_map(a.map);
  const auto policy = load_policy(a.policy);
  try {
    require_compatible(policy, map.spec());
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
  EnvConfig env;
  env.gamma = a.gamma;
  env.horizon = a.horizon;
  env.start_cell = parse_start(a.start);
  try {
    env.validate();
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
  if (env.start_cell && !map.spec().contains(*env.start_cell)) throw UsageError("--start is outside the grid");
  const std::uint64_t seed = derive_seed(a.seed, {kRunStream});
  echo_config(a.out, {{"command", "run"},
                      {"policy_file", a.policy},
                      {"map_file", a.map},
                      {"env", env_json(env)},
                      {"seed", a.seed},
                      {"run_seed", seed}});

  const auto traj = rollout(map, policy, env, RolloutMode::Argmax, seed);
  save_trajectory(traj, fs::path(a.out) / "trajectory.csv");
  const json summary{{"steps", traj.steps()},
                     {"start", {traj.positions.front().x, traj.positions.front().y}},
                     {"total_reward", traj.total_reward()},
                     {"discounted_return", discounted_return(traj, env.gamma)}};
  write_text(fs::path(a.out) / "summary.json", summary.dump(2) + "\n");
  std::cout << "steps " << traj.steps() << "  total " << traj.total_reward() << "  discounted "
            << discounted_return(traj, env.gamma) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
  std::string map;
  std::string policy;
  std::string methods = "boustrophedon,spiral,policy";
  std::string start = "0,0";
  double gamma = 0.9;
  int horizon = 300;
  double spiral_threshold = kDefaultSpiralThreshold;
  std::string out;
};

int cmd_compare(const CompareArgs& a) {
  std::vector<Method> methods;
  for (const auto& name : split(a.methods, ',')) {
    const auto m = parse_method(name);
    if (!m) throw UsageError("unknown method '" + name + "' (expected policy, boustrophedon or spiral)");
    methods.push_back(*m);
  }
  if (methods.empty()) throw UsageError("--methods is empty");
  const auto start = parse_start(a.start);
  if (!start) throw UsageError("compare needs a fixed --start X,Y");
  if (!(a.gamma > 0.0 && a.gamma < 1.0) || a.horizon < 0) throw UsageError("invalid --gamma or --horizon");
  prepare_out(a.out);
  const auto map = load_map(a.map);
  if (!map.spec().contains(*start)) throw UsageError("--start is outside the grid");

  std::optional<Policy> policy;
  if (std::find(methods.begin(), methods.end(), Method::Policy) != methods.end()) {
    if (a.policy.empty()) throw UsageError("--policy is required when comparing the policy method");
    policy = load_policy(a.policy);
    try {
      require_compatible(*policy, map.spec());
    } catch (const ContractViolation& e) {
      throw UsageError(e.what());
    }
  }
  json names = json::array();
  for (Method m : methods) names.push_back(method_name(m));
  echo_config(a.out, {{"command", "compare"},
                      {"map_file", a.map},
                      {"policy_file", a.policy},
                      {"methods", names},
                      {"start", start_text(start)},
                      {"gamma", a.gamma},
                      {"horizon", a.horizon},
                      {"spiral_threshold", a.spiral_threshold}});

  const auto report =
      compare_methods(map, methods, *start, a.horizon, a.gamma, policy ? &*policy : nullptr, a.spiral_threshold);
  write_text(fs::path(a.out) / "comparison.csv", comparison_to_csv(report));
  write_text(fs::path(a.out) / "summary.json", comparison_summary_json(report));
  for (const auto& s : report.methods) {
    std::cout << method_name(s.method) << "  total " << s.final_total() << "  discounted " << s.final_discounted()
              << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string prop = "all";
  std::string mode = "enumerate";
  std::string grid;
  int horizon = -1;
  double gamma = 0.9;
  int instances = 20;
  int samples = 20000;
  int batches = 200;
  int batch_size = 20;
  std::uint64_t seed = 0;
  double corrupt_proxy = 1.0;
  std::string out;
};

int cmd_verify(const VerifyArgs& a) {
  if (a.prop != "1" && a.prop != "2" && a.prop != "all") throw UsageError("--prop must be 1, 2 or all");
  if (a.mode != "enumerate" && a.mode != "montecarlo") throw UsageError("--mode must be enumerate or montecarlo");
  if (!(a.gamma > 0.0 && a.gamma < 1.0)) throw UsageError("--gamma must lie in (0, 1)");
  if (a.instances < 1) throw UsageError("--instances must be positive");
  const CheckMode mode = a.mode == "enumerate" ? CheckMode::Enumerate : CheckMode::MonteCarlo;
  std::optional<GridSpec> grid;
  if (!a.grid.empty()) grid = size_or_usage(a.grid);
  prepare_out(a.out);
  CheckOptions options;
  options.proxy_reward_scale = a.corrupt_proxy;

  const int h1 = a.horizon >= 0 ? a.horizon : 5;
  const int h2 = a.horizon >= 0 ? a.horizon : 8;
  json cfg{{"command", "verify"}, {"prop", a.prop},     {"mode", a.mode}, {"gamma", a.gamma},
           {"seed", a.seed},      {"grid", a.grid.empty() ? "default" : a.grid}};
  if (a.prop != "2") cfg["prop1"] = {{"instances", a.instances}, {"horizon", h1}, {"samples", a.samples}};
  if (a.prop != "1") cfg["prop2"] = {{"horizon", h2}, {"batches", a.batches}, {"batch_size", a.batch_size}};
  if (a.corrupt_proxy != 1.0) cfg["corrupt_proxy"] = a.corrupt_proxy;
  echo_config(a.out, cfg);

  std::vector<PropositionReport> reports;
  if (a.prop != "2") {
    Rng rng(derive_seed(a.seed, {kVerifyStream, 1}));
    for (int i = 0; i < a.instances; ++i) {
      const GridSpec spec = grid ? *grid
                                 : GridSpec(1 + static_cast<int>(uniform_index(rng, 3)),
                                            1 + static_cast<int>(uniform_index(rng, 3)));
      const auto map = generate_map(random_mixture(1 + static_cast<int>(uniform_index(rng, 3)), spec, rng()), spec);
      Policy policy(FeatureDesign::multires());
      if (i % 2 == 1) {
        for (double& t : policy.theta()) t = uniform(rng, -2.0, 2.0);
      }
      EnvConfig env;
      env.gamma = a.gamma;
      env.horizon = h1;
      env.start_cell = spec.cell_at(uniform_index(rng, spec.cells()));
      reports.push_back(check_proposition1(map, policy, env, mode, a.samples, rng(), options));
    }
  }
  if (a.prop != "1") {
    const GridSpec spec = grid ? *grid : GridSpec(5, 5);
    const auto map = generate_map(random_mixture(2, spec, derive_seed(a.seed, {kVerifyStream, 2})), spec);
    EnvConfig env;
    env.gamma = a.gamma;
    env.horizon = h2;
    reports.push_back(check_proposition2(map, Policy(FeatureDesign::multires()), env, a.batches, a.batch_size,
                                         derive_seed(a.seed, {kVerifyStream, 3}), options));
  }

  bool all = true;
  json list = json::array();
  for (const auto& r : reports) {
    all = all && r.passed;
    list.push_back(json::parse(proposition_report_json(r)));
    std::cout << "proposition " << r.proposition << "  " << r.instance << "  lhs " << format_double(r.lhs) << "  rhs "
              << format_double(r.rhs) << "  " << (r.passed ? "pass" : "FAIL") << "\n";
  }
  write_text(fs::path(a.out) / "report.json", json{{"all_passed", all}, {"reports", list}}.dump(2) + "\n");
  std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
  return all ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------

struct TimingArgs {
  std::string sizes = "15x15,30x30,60x60";
  std::string designs = "multires,allgrid";
  int horizon = 300;
  int repeats = 5;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_timing(const TimingArgs& a) {
  std::vector<GridSpec> sizes;
  for (const auto& s : split(a.sizes, ',')) sizes.push_back(size_or_usage(s));
  std::vector<FeatureKind> designs;
  for (const auto& d : split(a.designs, ',')) {
    if (d == "multires") {
      designs.push_back(FeatureKind::MultiRes);
    } else if (d == "allgrid") {
      designs.push_back(FeatureKind::AllGrid);
    } else {
      throw UsageError("unknown design '" + d + "'");
    }
  }
  if (sizes.size() < 2) throw UsageError("--sizes needs at least two grid sizes");
  if (designs.empty() || a.horizon < 0 || a.repeats < 1) throw UsageError("invalid timing parameters");
  prepare_out(a.out);
  echo_config(a.out, {{"command", "timing"},
                      {"sizes", a.sizes},
                      {"designs", a.designs},
                      {"horizon", a.horizon},
                      {"repeats", a.repeats},
                      {"seed", a.seed}});

  const auto table = timing_profile(designs, sizes, derive_seed(a.seed, {kTimingStream}), a.horizon, a.repeats);
  write_text(fs::path(a.out) / "timing.csv", timing_to_csv(table));
  json summary;
  for (FeatureKind k : designs) {
    const char* name = k == FeatureKind::MultiRes ? "multires" : "allgrid";
    summary["growth_ratio"][name] = table.growth_ratio(k);
    std::cout << name << " growth ratio " << table.growth_ratio(k) << "\n";
  }
  bool ok = true;
  if (designs.size() == 2 && designs[0] != designs[1]) {
    ok = table.multires_grows_slower();
    summary["multires_grows_slower"] = ok;
    std::cout << "multires grows slower: " << (ok ? "yes" : "NO") << "\n";
  }
  write_text(fs::path(a.out) / "summary.json", summary.dump(2) + "\n");
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy-gradient search over probability maps"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate-map", "Write a probability map from a Gaussian mixture or a ring");
  g->add_option("--size", gen.size, "Grid size WxH")->capture_default_str();
  g->add_option("--seed", gen.seed, "Base seed")->capture_default_str();
  g->add_option("--random-components", gen.components, "Number of random Gaussian components")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  g->add_option("--mixture", gen.mixture, "Mixture JSON file instead of a random mixture");
  g->add_option("--ring", gen.ring, "Ring map CX,CY,RADIUS,WIDTH instead of a mixture");
  g->add_option("--out", gen.out, "Output directory");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a policy with policy gradient");
  t->add_option("--map", tr.map, "Map CSV to train on");
  t->add_option("--mixture", tr.mixture, "Mixture JSON to train on (with --size)");
  t->add_option("--random-components", tr.components, "Draw a fresh random mixture every iteration");
  t->add_option("--size", tr.size, "Grid size WxH for --mixture or --random-components")->capture_default_str();
  t->add_option("--design", tr.design, "Feature design")->check(CLI::IsMember({"multires", "allgrid"}))
      ->capture_default_str();
  t->add_option("--baseline", tr.baseline, "Baseline")->check(CLI::IsMember({"per-step", "mean-return", "none"}))
      ->capture_default_str();
  t->add_option("--start", tr.start, "Start cell X,Y or random")->capture_default_str();
  t->add_option("--gamma", tr.gamma, "Discount factor")->capture_default_str();
  t->add_option("--horizon", tr.horizon, "Episode length")->capture_default_str();
  t->add_option("--rollouts", tr.rollouts, "Rollouts per iteration")->capture_default_str();
  t->add_option("--iterations", tr.iterations, "Gradient iterations")->capture_default_str();
  t->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  t->add_option("--snapshot-every", tr.snapshot_every, "Keep theta every N iterations")->capture_default_str();
  t->add_option("--seed", tr.seed, "Base seed")->capture_default_str();
  t->add_option("--out", tr.out, "Output directory");
  t->add_flag("--quiet", tr.quiet, "Suppress progress output");

  RunArgs run;
  auto* r = app.add_subcommand("run", "Roll out a trained policy greedily");
  r->add_option("--policy", run.policy, "Policy JSON")->required();
  r->add_option("--map", run.map, "Map CSV")->required();
  r->add_option("--start", run.start, "Start cell X,Y or random")->capture_default_str();
  r->add_option("--gamma", run.gamma, "Discount factor")->capture_default_str();
  r->add_option("--horizon", run.horizon, "Number of steps")->capture_default_str();
  r->add_option("--seed", run.seed, "Base seed (random start)")->capture_default_str();
  r->add_option("--out", run.out, "Output directory");

  CompareArgs cmp;
  auto* c = app.add_subcommand("compare", "Compare the policy with the lawnmower and spiral planners");
  c->add_option("--map", cmp.map, "Map CSV")->required();
  c->add_option("--policy", cmp.policy, "Policy JSON");
  c->add_option("--methods", cmp.methods, "Comma-separated methods")->capture_default_str();
  c->add_option("--start", cmp.start, "Start cell X,Y")->capture_default_str();
  c->add_option("--gamma", cmp.gamma, "Discount factor")->capture_default_str();
  c->add_option("--horizon", cmp.horizon, "Number of steps")->capture_default_str();
  c->add_option("--spiral-threshold", cmp.spiral_threshold, "Spiral stopping fraction")->capture_default_str();
  c->add_option("--out", cmp.out, "Output directory");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Check the proxy-reward propositions");
  v->add_option("--prop", ver.prop, "1, 2 or all")->capture_default_str();
  v->add_option("--mode", ver.mode, "enumerate or montecarlo (proposition 1)")->capture_default_str();
  v->add_option("--grid,--size", ver.grid, "Fixed grid size WxH");
  v->add_option("--horizon", ver.horizon, "Horizon (default 5 for proposition 1, 8 for proposition 2)");
  v->add_option("--gamma", ver.gamma, "Discount factor")->capture_default_str();
  v->add_option("--instances", ver.instances, "Proposition 1 instances")->capture_default_str();
  v->add_option("--samples", ver.samples, "Monte Carlo samples per instance")->capture_default_str();
  v->add_option("--batches", ver.batches, "Proposition 2 batches")->capture_default_str();
  v->add_option("--batch-size", ver.batch_size, "Rollouts per batch")->capture_default_str();
  v->add_option("--seed", ver.seed, "Base seed")->capture_default_str();
  v->add_option("--corrupt-proxy", ver.corrupt_proxy, "Testing only: scale the proxy reward")
      ->group("");
  v->add_option("--out", ver.out, "Output directory");

  TimingArgs tim;
  auto* ti = app.add_subcommand("timing", "Time greedy rollouts per feature design and grid size");
  ti->add_option("--sizes", tim.sizes, "Comma-separated sizes")->capture_default_str();
  ti->add_option("--designs", tim.designs, "Comma-separated designs")->capture_default_str();
  ti->add_option("--horizon", tim.horizon, "Rollout length")->capture_default_str();
  ti->add_option("--repeats", tim.repeats, "Repeats per cell (median)")->capture_default_str();
  ti->add_option("--seed", tim.seed, "Base seed")->capture_default_str();
  ti->add_option("--out", tim.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_generate_map(gen);
    if (t->parsed()) return cmd_train(tr);
    if (r->parsed()) return cmd_run(run);
    if (c->parsed()) return cmd_compare(cmp);
    if (v->parsed()) return cmd_verify(ver);
    if (ti->parsed()) return cmd_timing(tim);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
