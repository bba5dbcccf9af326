#include "pgsearch/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pgsearch/rng.hpp"

namespace pgsearch {

namespace {
constexpr std::uint64_t kRolloutStream = 0x726f6c6cULL;
constexpr std::uint64_t kMapStream = 0x6d6170ULL;
}  // namespace

MapSource MapSource::fixed(ProbabilityMap map) {
  MapSource s;
  s.spec_ = map.spec();
  s.fixed_ = std::move(map);
  return s;
}

MapSource MapSource::regenerated(GridSpec spec, int num_components) {
  if (num_components < 1) throw ContractViolation("regenerated map source needs at least one component");
  MapSource s;
  s.spec_ = spec;
  s.num_components_ = num_components;
  return s;
}

ProbabilityMap MapSource::map_for_iteration(std::uint64_t seed, int iteration) const {
  if (fixed_) return *fixed_;
  const auto child = derive_seed(seed, {kMapStream, static_cast<std::uint64_t>(iteration)});
  return generate_map(random_mixture(num_components_, spec_, child), spec_);
}

void TrainConfig::validate() const {
  if (iterations < 0) throw ContractViolation("iterations must be nonnegative");
  if (rollouts_per_iter < 1) throw ContractViolation("rollouts per iteration must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ContractViolation("learning rate must be positive");
  env.validate();
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double compute_baseline(std::span<const Trajectory> trajectories, double gamma) {
  if (trajectories.empty()) return 0.0;
  double s = 0.0;
  for (const auto& t : trajectories) s += discounted_return(t, gamma);
  return s / static_cast<double>(trajectories.size());
}

const char* baseline_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::PerStep: return "per-step";
    case BaselineKind::MeanReturn: return "mean-return";
    case BaselineKind::None: return "none";
  }
  return "?";
}

BaselineKind parse_baseline(const std::string& name) {
  for (BaselineKind k : {BaselineKind::PerStep, BaselineKind::MeanReturn, BaselineKind::None}) {
    if (name == baseline_name(k)) return k;
  }
  throw ContractViolation("unknown baseline '" + name + "' (expected per-step, mean-return or none)");
}

namespace {

/// to_go[t] = sum_{j >= t} gamma^j r_j over scan times j; one trailing zero.
void reward_to_go(const Trajectory& traj, double gamma, std::vector<double>& to_go) {
  to_go.assign(traj.rewards.size() + 1, 0.0);
  double w = 1.0;
  for (std::size_t j = 0; j < traj.rewards.size(); ++j) {
    to_go[j] = w * traj.rewards[j];
    w *= gamma;
  }
  for (std::size_t j = traj.rewards.size(); j-- > 0;) to_go[j] += to_go[j + 1];
}

template <typename BaselineAt>
std::vector<double> accumulate_gradient(std::span<const Trajectory> trajectories, const Policy& policy, double gamma,
                                        BaselineAt baseline_at) {
  if (trajectories.empty()) throw ContractViolation("estimate_gradient needs at least one trajectory");
  std::vector<double> grad(policy.size(), 0.0);
  std::vector<double> to_go;
  for (const auto& traj : trajectories) {
    reward_to_go(traj, gamma, to_go);
    for (std::size_t t = 0; t < traj.steps(); ++t) {
      // Action t is scanned at time t + 1, so it can only influence rewards from t + 1 on.
      const double weight = to_go[t + 1] - baseline_at(t + 1);
      if (weight == 0.0) continue;
      policy.accumulate_grad_log_pi(traj.features[t], traj.actions[t], traj.legal[t], weight, grad);
    }
  }
  const double inv_m = 1.0 / static_cast<double>(trajectories.size());
  for (double& g : grad) g *= inv_m;
  return grad;
}

}  // namespace

std::vector<double> compute_step_baselines(std::span<const Trajectory> trajectories, double gamma) {
  std::size_t len = 0;
  for (const auto& t : trajectories) len = std::max(len, t.rewards.size() + 1);
  std::vector<double> b(len, 0.0);
  if (trajectories.empty()) return b;
  std::vector<double> to_go;
  for (const auto& t : trajectories) {
    reward_to_go(t, gamma, to_go);
    for (std::size_t j = 0; j < to_go.size(); ++j) b[j] += to_go[j];
  }
  for (double& v : b) v /= static_cast<double>(trajectories.size());
  return b;
}

std::vector<double> estimate_gradient(std::span<const Trajectory> trajectories, const Policy& policy, double gamma,
                                      double baseline) {
  return accumulate_gradient(trajectories, policy, gamma, [baseline](std::size_t) { return baseline; });
}

std::vector<double> estimate_gradient(std::span<const Trajectory> trajectories, const Policy& policy, double gamma,
                                      std::span<const double> step_baseline) {
  return accumulate_gradient(trajectories, policy, gamma, [step_baseline](std::size_t t) {
    return t < step_baseline.size() ? step_baseline[t] : 0.0;
  });
}

TrainResult train(const MapSource& source, Policy policy, const TrainConfig& config, const TrainCallback& on_iteration) {
  config.validate();
  require_compatible(policy, source.spec());
  TrainLog log;
  const auto m = static_cast<std::size_t>(config.rollouts_per_iter);
  std::vector<Trajectory> batch(m);
  for (int it = 0; it < config.iterations; ++it) {
    const ProbabilityMap map = source.map_for_iteration(config.seed, it);
    for (std::size_t i = 0; i < m; ++i) {
      const auto seed = derive_seed(config.seed, {kRolloutStream, static_cast<std::uint64_t>(it), i});
      batch[i] = rollout(map, policy, config.env, RolloutMode::Sample, seed);
    }
    TrainRecord rec;
    rec.iteration = it;
    for (const auto& t : batch) {
      rec.mean_total_reward += t.total_reward();
      rec.mean_discounted_return += discounted_return(t, config.env.gamma);
    }
    rec.mean_total_reward /= static_cast<double>(m);
    rec.mean_discounted_return /= static_cast<double>(m);
    rec.baseline = compute_baseline(batch, config.env.gamma);
    std::vector<double> grad;
    switch (config.baseline) {
      case BaselineKind::PerStep:
        grad = estimate_gradient(batch, policy, config.env.gamma, compute_step_baselines(batch, config.env.gamma));
        break;
      case BaselineKind::MeanReturn: grad = estimate_gradient(batch, policy, config.env.gamma, rec.baseline); break;
      case BaselineKind::None: grad = estimate_gradient(batch, policy, config.env.gamma, 0.0); break;
    }
    rec.grad_norm = l2_norm(grad);
    if (!std::isfinite(rec.grad_norm)) {
      throw NumericalError("non-finite policy gradient at iteration " + std::to_string(it));
    }
    auto theta = policy.theta();
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += config.learning_rate * grad[i];
    log.records.push_back(rec);
    if (config.snapshot_every > 0 && (it + 1) % config.snapshot_every == 0) {
      log.snapshots.emplace_back(it + 1, std::vector<double>(theta.begin(), theta.end()));
    }
    if (on_iteration) on_iteration(rec);
  }
  return {std::move(policy), std::move(log)};
}

std::string train_log_to_csv(const TrainLog& log) {
  std::string out = "iteration,mean_total_reward,mean_discounted_return,baseline,grad_norm\n";
  for (const auto& r : log.records) {
    out += std::to_string(r.iteration) + "," + format_double(r.mean_total_reward) + "," +
           format_double(r.mean_discounted_return) + "," + format_double(r.baseline) + "," +
           format_double(r.grad_norm) + "\n";
  }
  return out;
}

void save_train_log(const TrainLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << train_log_to_csv(log);
}

}  // namespace pgsearch
