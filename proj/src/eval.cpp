#include "pgsearch/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "pgsearch/rng.hpp"
#include "pgsearch/trainer.hpp"

namespace pgsearch {

// ---------------------------------------------------------------------------
// Method comparison

const char* method_name(Method m) {
  switch (m) {
    case Method::Policy: return "policy";
    case Method::Boustrophedon: return "boustrophedon";
    case Method::Spiral: return "spiral";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  for (Method m : {Method::Policy, Method::Boustrophedon, Method::Spiral}) {
    if (name == method_name(m)) return m;
  }
  return std::nullopt;
}

bool operator==(const MethodSeries& a, const MethodSeries& b) {
  return a.method == b.method && a.positions == b.positions && a.cumulative_total == b.cumulative_total &&
         a.cumulative_discounted == b.cumulative_discounted && a.remaining_mass == b.remaining_mass;
}

const MethodSeries* ComparisonReport::find(Method m) const {
  for (const auto& s : methods) {
    if (s.method == m) return &s;
  }
  return nullptr;
}

namespace {

MethodSeries build_series(Method method, const ProbabilityMap& map, std::vector<Cell> positions, int horizon,
                          double gamma) {
  MethodSeries s;
  s.method = method;
  const auto n = static_cast<std::size_t>(horizon) + 1;
  ProbabilityMap m = map;
  double cum = 0.0;
  double disc = 0.0;
  double w = 1.0;
  for (std::size_t t = 0; t < n; ++t) {
    const bool moving = t < positions.size();
    const Cell c = moving ? positions[t] : positions.back();
    // The map is replayed independently of the method so the conservation column is a real check.
    const double r = moving ? m.clear(c) : 0.0;
    cum += r;
    disc += w * r;
    w *= gamma;
    s.positions.push_back(c);
    s.cumulative_total.push_back(cum);
    s.cumulative_discounted.push_back(disc);
    s.remaining_mass.push_back(remaining_mass(m));
  }
  return s;
}

}  // namespace

ComparisonReport compare_methods(const ProbabilityMap& map, const std::vector<Method>& methods, Cell start,
                                 int horizon, double gamma, const Policy* policy, double spiral_threshold) {
  if (!map.spec().contains(start)) throw ContractViolation("comparison start is outside the grid");
  if (horizon < 0) throw ContractViolation("horizon must be nonnegative");
  ComparisonReport report;
  report.horizon = horizon;
  report.gamma = gamma;
  report.start = start;
  report.initial_mass = remaining_mass(map);
  for (Method method : methods) {
    std::vector<Cell> positions;
    switch (method) {
      case Method::Policy: {
        if (policy == nullptr) throw ContractViolation("policy method requested without a policy");
        require_compatible(*policy, map.spec());
        EnvConfig cfg{gamma, horizon, start};
        positions = rollout(map, *policy, cfg, RolloutMode::Argmax, 0).positions;
        break;
      }
      case Method::Boustrophedon: positions = boustrophedon_path(map.spec(), start, horizon).cells; break;
      case Method::Spiral: positions = spiral_path(map, start, horizon, spiral_threshold).cells; break;
    }
    report.methods.push_back(build_series(method, map, std::move(positions), horizon, gamma));
  }
  return report;
}

std::string comparison_to_csv(const ComparisonReport& report) {
  std::string out = "method,step,x,y,cumulative_total,cumulative_discounted,remaining_mass,conservation_error\n";
  for (const auto& s : report.methods) {
    for (std::size_t t = 0; t < s.cumulative_total.size(); ++t) {
      const double err = s.cumulative_total[t] + s.remaining_mass[t] - report.initial_mass;
      out += std::string(method_name(s.method)) + "," + std::to_string(t) + "," + std::to_string(s.positions[t].x) +
             "," + std::to_string(s.positions[t].y) + "," + format_double(s.cumulative_total[t]) + "," +
             format_double(s.cumulative_discounted[t]) + "," + format_double(s.remaining_mass[t]) + "," +
             format_double(err) + "\n";
    }
  }
  return out;
}

std::string comparison_summary_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["horizon"] = report.horizon;
  j["gamma"] = report.gamma;
  j["start"] = {report.start.x, report.start.y};
  j["initial_mass"] = report.initial_mass;
  double worst = 0.0;
  for (const auto& s : report.methods) {
    for (std::size_t t = 0; t < s.cumulative_total.size(); ++t) {
      worst = std::max(worst, std::abs(s.cumulative_total[t] + s.remaining_mass[t] - report.initial_mass));
    }
    j["methods"][method_name(s.method)] = {{"total_reward", s.final_total()},
                                           {"discounted_return", s.final_discounted()}};
  }
  j["max_conservation_error"] = worst;
  j["conservation_ok"] = worst <= 1e-9;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Exact enumeration

std::uint64_t count_action_sequences(const GridSpec& spec, Cell start, int horizon) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  // ways[c] = number of legal sequences of the remaining length starting at c.
  std::vector<std::uint64_t> ways(spec.cells(), 1);
  std::vector<std::uint64_t> next(spec.cells());
  for (int h = 0; h < horizon; ++h) {
    for (std::size_t i = 0; i < spec.cells(); ++i) {
      const Cell c = spec.cell_at(i);
      std::uint64_t total = 0;
      bool any = false;
      for (Action a : kAllActions) {
        const Cell n = moved(c, a);
        if (!spec.contains(n)) continue;
        any = true;
        const std::uint64_t w = ways[spec.index(n)];
        total = (kMax - total < w) ? kMax : total + w;
      }
      next[i] = any ? total : 1;  // 1x1 grid: the only sequence is the empty one
    }
    ways.swap(next);
  }
  return ways[spec.index(start)];
}

namespace {

struct Enumerator {
  const Policy& policy;
  int horizon;
  const std::function<void(double, const Trajectory&)>& visit;
  SearchState state;
  Trajectory traj;

  void recurse(double prob) {
    if (static_cast<int>(traj.steps()) == horizon) {
      visit(prob, traj);
      return;
    }
    const ActionSet legal = legal_actions(state);
    if (legal.empty()) {
      visit(prob, traj);
      return;
    }
    std::vector<double> phi(static_cast<std::size_t>(policy.design().k));
    extract_state_features(state.map, state.position, policy.design(), phi);
    const ActionDistribution p = policy.action_probs(phi, legal);
    for (Action a : kAllActions) {
      if (!legal.contains(a) || p[action_index(a)] == 0.0) continue;
      const Cell from = state.position;
      const Cell to = moved(from, a);
      const double saved = state.map.at(to);
      const double r = step_in_place(state, a);
      traj.features.push_back(phi);
      traj.legal.push_back(legal);
      traj.actions.push_back(a);
      traj.rewards.push_back(r);
      traj.positions.push_back(to);
      recurse(prob * p[action_index(a)]);
      traj.features.pop_back();
      traj.legal.pop_back();
      traj.actions.pop_back();
      traj.rewards.pop_back();
      traj.positions.pop_back();
      state.map.set(to, saved);
      state.position = from;
    }
  }
};

}  // namespace

void enumerate_trajectories(const ProbabilityMap& map, const Policy& policy, Cell start, int horizon,
                            const std::function<void(double probability, const Trajectory&)>& visit,
                            std::uint64_t budget) {
  if (!map.spec().contains(start)) throw ContractViolation("enumeration start is outside the grid");
  require_compatible(policy, map.spec());
  const auto leaves = count_action_sequences(map.spec(), start, horizon);
  if (leaves > budget) {
    throw NumericalError("trajectory tree has " + std::to_string(leaves) + " leaves, over the budget of " +
                         std::to_string(budget));
  }
  Enumerator e{policy, horizon, visit, SearchState{start, map}, {}};
  e.traj.horizon = horizon;
  e.traj.positions.push_back(start);
  e.traj.rewards.push_back(e.state.map.clear(start));
  e.recurse(1.0);
}

double exact_expected_return(const ProbabilityMap& map, const Policy& policy, Cell start, int horizon, double gamma) {
  double j = 0.0;
  enumerate_trajectories(map, policy, start, horizon,
                         [&](double p, const Trajectory& t) { j += p * discounted_return(t, gamma); });
  return j;
}

std::vector<int> first_visit_times(const GridSpec& spec, const std::vector<Cell>& positions) {
  std::vector<int> first(spec.cells(), -1);
  for (std::size_t t = 0; t < positions.size(); ++t) {
    int& f = first[spec.index(positions[t])];
    if (f < 0) f = static_cast<int>(t);
  }
  return first;
}

// ---------------------------------------------------------------------------
// Propositions

namespace {

constexpr std::uint64_t kProp1Stream = 0x70726f7031ULL;
constexpr std::uint64_t kProp2Stream = 0x70726f7032ULL;
constexpr std::uint64_t kTargetStream = 0x746172676574ULL;
constexpr double kExactTolerance = 1e-12;
constexpr double kOneSided95 = 1.6448536269514722;

/// Target cell drawn from the (possibly sub-normalized) map; nullopt when it falls off the grid.
std::optional<std::size_t> sample_target(std::span<const double> q, Rng& rng) {
  const double u = uniform01(rng);
  double cdf = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    cdf += q[i];
    if (u < cdf) return i;
  }
  return std::nullopt;
}

/// gamma^T(y) for the target at `cell`, 0 if it is not found within the trajectory.
double indicator_return(const std::vector<int>& first, std::size_t cell, double gamma) {
  const int t = first[cell];
  return t < 0 ? 0.0 : std::pow(gamma, t);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  const auto n = static_cast<double>(xs.size());
  for (double x : xs) r.mean += x;
  r.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return r;
}

std::string describe(const ProbabilityMap& map, const EnvConfig& config) {
  std::string s = std::to_string(map.spec().width) + "x" + std::to_string(map.spec().height) +
                  " grid, H=" + std::to_string(config.horizon) + ", gamma=" + format_double(config.gamma) + ", start=";
  if (config.start_cell) {
    s += "(" + std::to_string(config.start_cell->x) + "," + std::to_string(config.start_cell->y) + ")";
  } else {
    s += "random";
  }
  return s;
}

}  // namespace

PropositionReport check_proposition1(const ProbabilityMap& map, const Policy& policy, const EnvConfig& config,
                                     CheckMode mode, int samples, std::uint64_t seed, const CheckOptions& options) {
  config.validate();
  require_compatible(policy, map.spec());
  PropositionReport rep;
  rep.proposition = 1;
  rep.mode = mode;
  rep.instance = describe(map, config);
  const auto& spec = map.spec();
  const auto q0 = map.values();
  const double gamma = config.gamma;

  if (mode == CheckMode::Enumerate) {
    std::vector<Cell> starts;
    if (config.start_cell) {
      starts.push_back(*config.start_cell);
    } else {
      for (std::size_t i = 0; i < spec.cells(); ++i) starts.push_back(spec.cell_at(i));
    }
    std::uint64_t leaves = 0;
    for (Cell s : starts) {
      const auto c = count_action_sequences(spec, s, config.horizon);
      leaves = (std::numeric_limits<std::uint64_t>::max() - leaves < c) ? std::numeric_limits<std::uint64_t>::max()
                                                                         : leaves + c;
    }
    if (leaves > kEnumerationBudget) {
      throw NumericalError("enumeration budget exceeded: " + std::to_string(leaves) + " trajectories");
    }
    const double start_weight = 1.0 / static_cast<double>(starts.size());
    for (Cell s : starts) {
      enumerate_trajectories(map, policy, s, config.horizon, [&](double p, const Trajectory& t) {
        const double w = p * start_weight;
        rep.lhs += w * options.proxy_reward_scale * discounted_return(t, gamma);
        const auto first = first_visit_times(spec, t.positions);
        double rhs = 0.0;
        for (std::size_t y = 0; y < q0.size(); ++y) {
          if (q0[y] > 0.0) rhs += q0[y] * indicator_return(first, y, gamma);
        }
        rep.rhs += w * rhs;
      });
    }
    rep.exact = true;
    rep.details["trajectories"] = static_cast<double>(leaves);
    rep.details["abs_difference"] = std::abs(rep.lhs - rep.rhs);
    rep.passed = std::abs(rep.lhs - rep.rhs) <= kExactTolerance;
    return rep;
  }

  if (samples < 2) throw ContractViolation("Monte Carlo check needs at least 2 samples");
  std::vector<double> lhs;
  std::vector<double> rhs;
  lhs.reserve(static_cast<std::size_t>(samples));
  rhs.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const auto s = derive_seed(seed, {kProp1Stream, static_cast<std::uint64_t>(i)});
    const Trajectory t = rollout(map, policy, config, RolloutMode::Sample, s);
    lhs.push_back(options.proxy_reward_scale * discounted_return(t, gamma));
    Rng rng(derive_seed(s, {kTargetStream}));
    const auto y = sample_target(q0, rng);
    rhs.push_back(y ? indicator_return(first_visit_times(spec, t.positions), *y, gamma) : 0.0);
  }
  const auto l = mean_se(lhs);
  const auto r = mean_se(rhs);
  rep.lhs = l.mean;
  rep.rhs = r.mean;
  rep.lhs_se = l.se;
  rep.rhs_se = r.se;
  const double combined = std::sqrt(l.se * l.se + r.se * r.se);
  rep.details["samples"] = samples;
  rep.details["z"] = combined > 0.0 ? (l.mean - r.mean) / combined : 0.0;
  rep.passed = std::abs(l.mean - r.mean) <= 3.0 * combined;
  return rep;
}

PropositionReport check_proposition2(const ProbabilityMap& map, const Policy& policy, const EnvConfig& config,
                                     int batches, int batch_size, std::uint64_t seed, const CheckOptions& options) {
  config.validate();
  require_compatible(policy, map.spec());
  if (batches < 30) throw ContractViolation("Proposition 2 check needs at least 30 batches");
  if (batch_size < 1) throw ContractViolation("batch size must be at least 1");
  PropositionReport rep;
  rep.proposition = 2;
  rep.mode = CheckMode::MonteCarlo;
  rep.instance = describe(map, config) + ", " + std::to_string(batches) + " batches of " + std::to_string(batch_size);
  const auto& spec = map.spec();
  const auto q0 = map.values();
  const double gamma = config.gamma;
  const std::size_t dim = policy.size();
  const auto nb = static_cast<std::size_t>(batches);

  std::vector<std::vector<double>> proxy(nb, std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> indicator(nb, std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> integrated(nb, std::vector<double>(dim, 0.0));
  std::vector<double> score_sum(dim);

  for (std::size_t b = 0; b < nb; ++b) {
    for (int i = 0; i < batch_size; ++i) {
      const auto s = derive_seed(seed, {kProp2Stream, b, static_cast<std::uint64_t>(i)});
      const Trajectory t = rollout(map, policy, config, RolloutMode::Sample, s);
      Rng rng(derive_seed(s, {kTargetStream}));
      const auto y = sample_target(q0, rng);
      const auto first = first_visit_times(spec, t.positions);
      const int found_at = y ? first[*y] : -1;
      std::fill(score_sum.begin(), score_sum.end(), 0.0);
      double w = 1.0;
      // The time-0 scan precedes every action, so its score sum is empty.
      for (std::size_t j = 1; j < t.rewards.size(); ++j) {
        w *= gamma;
        policy.accumulate_grad_log_pi(t.features[j - 1], t.actions[j - 1], t.legal[j - 1], 1.0, score_sum);
        const double r = options.proxy_reward_scale * t.rewards[j];
        const std::size_t cell = spec.index(t.positions[j]);
        const double r_int = first[cell] == static_cast<int>(j) ? q0[cell] : 0.0;
        const double hit = found_at == static_cast<int>(j) ? 1.0 : 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          proxy[b][d] += w * r * score_sum[d];
          integrated[b][d] += w * r_int * score_sum[d];
          indicator[b][d] += w * hit * score_sum[d];
        }
      }
    }
    for (std::size_t d = 0; d < dim; ++d) {
      proxy[b][d] /= batch_size;
      integrated[b][d] /= batch_size;
      indicator[b][d] /= batch_size;
    }
  }

  auto column_means = [&](const std::vector<std::vector<double>>& est) {
    std::vector<double> m(dim, 0.0);
    for (const auto& e : est) {
      for (std::size_t d = 0; d < dim; ++d) m[d] += e[d];
    }
    for (double& v : m) v /= static_cast<double>(nb);
    return m;
  };
  auto sq_dev = [&](const std::vector<double>& e, const std::vector<double>& m) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) s += (e[d] - m[d]) * (e[d] - m[d]);
    return s;
  };
  const auto mp = column_means(proxy);
  const auto mi = column_means(indicator);
  const auto mg = column_means(integrated);
  const double denom = static_cast<double>(nb) - 1.0;

  // Paired over batches: d_b = |g_proxy,b - mean|^2 - |g_indicator,b - mean|^2 averages to
  // (n-1)/n times the difference of covariance traces.
  std::vector<double> diff(nb);
  double var_p = 0.0;
  double var_i = 0.0;
  double var_g = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const double dp = sq_dev(proxy[b], mp);
    const double di = sq_dev(indicator[b], mi);
    var_p += dp;
    var_i += di;
    var_g += sq_dev(integrated[b], mg);
    diff[b] = dp - di;
  }
  var_p /= denom;
  var_i /= denom;
  var_g /= denom;
  const auto d = mean_se(diff);
  bool variance_ok;
  double t_stat = 0.0;
  if (d.se > 0.0) {
    t_stat = d.mean / d.se;
    variance_ok = t_stat < -kOneSided95;
  } else {
    variance_ok = d.mean <= 0.0;  // degenerate: both estimators are constant across batches
  }

  // Component-wise agreement of the two estimator means.
  double worst_z = 0.0;
  bool means_ok = true;
  for (std::size_t k = 0; k < dim; ++k) {
    double sp = 0.0;
    double si = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      sp += (proxy[b][k] - mp[k]) * (proxy[b][k] - mp[k]);
      si += (indicator[b][k] - mi[k]) * (indicator[b][k] - mi[k]);
    }
    const double se = std::sqrt((sp + si) / denom / static_cast<double>(nb));
    const double gap = std::abs(mp[k] - mi[k]);
    if (se > 0.0) {
      worst_z = std::max(worst_z, gap / se);
      if (gap > 3.0 * se) means_ok = false;
    } else if (gap > kExactTolerance) {
      means_ok = false;
    }
  }

  rep.lhs = var_p;
  rep.rhs = var_i;
  rep.lhs_se = 0.0;
  rep.rhs_se = 0.0;
  rep.details["var_proxy"] = var_p;
  rep.details["var_indicator"] = var_i;
  rep.details["var_integrated"] = var_g;
  rep.details["paired_t"] = t_stat;
  rep.details["variance_ordering_ok"] = variance_ok ? 1.0 : 0.0;
  rep.details["max_mean_gap_z"] = worst_z;
  rep.details["means_agree"] = means_ok ? 1.0 : 0.0;
  rep.details["mean_norm_proxy"] = l2_norm(mp);
  rep.details["mean_norm_indicator"] = l2_norm(mi);
  rep.passed = variance_ok && means_ok;
  return rep;
}

std::string proposition_report_json(const PropositionReport& report) {
  nlohmann::json j;
  j["proposition"] = report.proposition;
  j["instance"] = report.instance;
  j["mode"] = report.mode == CheckMode::Enumerate ? "enumerate" : "montecarlo";
  j["exact"] = report.exact;
  j["lhs"] = report.lhs;
  j["rhs"] = report.rhs;
  j["lhs_se"] = report.lhs_se;
  j["rhs_se"] = report.rhs_se;
  j["details"] = report.details;
  j["passed"] = report.passed;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Timing

double TimingTable::growth_ratio(FeatureKind kind) const {
  for (std::size_t d = 0; d < designs.size(); ++d) {
    if (designs[d] == kind) return median_seconds[d].back() / median_seconds[d].front();
  }
  throw ContractViolation("design not present in timing table");
}

bool TimingTable::multires_grows_slower() const {
  return growth_ratio(FeatureKind::AllGrid) > growth_ratio(FeatureKind::MultiRes);
}

TimingTable timing_profile(const std::vector<FeatureKind>& designs, const std::vector<GridSpec>& sizes,
                           std::uint64_t policy_seed, int horizon, int repeats) {
  if (sizes.size() < 2) throw ContractViolation("timing profile needs at least two grid sizes");
  if (repeats < 1) throw ContractViolation("timing profile needs at least one repeat");
  TimingTable table;
  table.sizes = sizes;
  table.designs = designs;
  for (FeatureKind kind : designs) {
    std::vector<double> column;
    for (const GridSpec& spec : sizes) {
      const FeatureDesign design = kind == FeatureKind::MultiRes ? FeatureDesign::multires() : FeatureDesign::allgrid(spec);
      const ProbabilityMap map = generate_map(random_mixture(3, spec, policy_seed), spec);
      Rng rng(derive_seed(policy_seed, {0x74696d65ULL, static_cast<std::uint64_t>(spec.cells())}));
      std::vector<double> theta(static_cast<std::size_t>(kNumActions * design.k));
      for (double& v : theta) v = uniform(rng, -1.0, 1.0);
      const Policy policy(design, std::move(theta));
      const EnvConfig cfg{0.9, horizon, Cell{spec.width / 2, spec.height / 2}};
      std::vector<double> times;
      for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const Trajectory traj = rollout(map, policy, cfg, RolloutMode::Argmax, 0);
        const auto t1 = std::chrono::steady_clock::now();
        if (traj.positions.empty()) throw NumericalError("empty timing rollout");
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
      std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2), times.end());
      column.push_back(times[times.size() / 2]);
    }
    table.median_seconds.push_back(std::move(column));
  }
  return table;
}

std::string timing_to_csv(const TimingTable& table) {
  std::string out = "design,width,height,median_seconds\n";
  for (std::size_t d = 0; d < table.designs.size(); ++d) {
    for (std::size_t s = 0; s < table.sizes.size(); ++s) {
      out += std::string(table.designs[d] == FeatureKind::MultiRes ? "multires" : "allgrid") + "," +
             std::to_string(table.sizes[s].width) + "," + std::to_string(table.sizes[s].height) + "," +
             format_double(table.median_seconds[d][s]) + "\n";
    }
  }
  return out;
}

}  // namespace pgsearch
