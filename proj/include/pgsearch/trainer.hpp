#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgsearch/env.hpp"
#include "pgsearch/policy.hpp"
#include "pgsearch/probmap.hpp"

namespace pgsearch {

/// Where training maps come from: one fixed map, or a fresh random mixture every iteration.
class MapSource {
 public:
  static MapSource fixed(ProbabilityMap map);
  static MapSource regenerated(GridSpec spec, int num_components);

  const GridSpec& spec() const { return spec_; }
  bool is_fixed() const { return fixed_.has_value(); }
  ProbabilityMap map_for_iteration(std::uint64_t seed, int iteration) const;

 private:
  MapSource() = default;
  GridSpec spec_;
  std::optional<ProbabilityMap> fixed_;
  int num_components_ = 0;
};

/// Baseline subtracted from the reward-to-go in the gradient estimator.
enum class BaselineKind {
  PerStep,     // batch mean of the discounted reward-to-go at each time step
  MeanReturn,  // one scalar: batch mean discounted return
  None,
};

const char* baseline_name(BaselineKind kind);
BaselineKind parse_baseline(const std::string& name);

// Features are per-cell probabilities (order 1/cells), so useful step sizes are large.
inline constexpr double kDefaultLearningRate = 5e5;

struct TrainConfig {
  int iterations = 2000;
  int rollouts_per_iter = 20;
  double learning_rate = kDefaultLearningRate;
  BaselineKind baseline = BaselineKind::PerStep;
  EnvConfig env;
  std::uint64_t seed = 0;
  int snapshot_every = 0;  // keep a copy of theta every N iterations; 0 disables

  void validate() const;
};

struct TrainRecord {
  int iteration = 0;
  double mean_total_reward = 0.0;
  double mean_discounted_return = 0.0;
  double baseline = 0.0;
  double grad_norm = 0.0;

  friend bool operator==(const TrainRecord&, const TrainRecord&) = default;
};

struct TrainLog {
  std::vector<TrainRecord> records;
  std::vector<std::pair<int, std::vector<double>>> snapshots;  // (iteration, theta)

  friend bool operator==(const TrainLog&, const TrainLog&) = default;
};

struct TrainResult {
  Policy policy;
  TrainLog log;
};

/// Observed mean discounted return of the batch.
double compute_baseline(std::span<const Trajectory> trajectories, double gamma);

/// b[t] = batch mean of sum_{j >= t} gamma^j r_j; b[0] equals compute_baseline.
std::vector<double> compute_step_baselines(std::span<const Trajectory> trajectories, double gamma);

/// Likelihood-ratio gradient with discounted reward-to-go:
/// (1/m) sum_i sum_t grad log pi(a_t | s_t) * (sum_{j > t} gamma^j r_j - baseline),
/// where r_j is the reward scanned at time j (action t lands at time t + 1).
std::vector<double> estimate_gradient(std::span<const Trajectory> trajectories, const Policy& policy, double gamma,
                                      double baseline);
/// Same estimator with a time-indexed baseline: action t is weighted by to_go(t + 1) - step_baseline[t + 1].
std::vector<double> estimate_gradient(std::span<const Trajectory> trajectories, const Policy& policy, double gamma,
                                      std::span<const double> step_baseline);

using TrainCallback = std::function<void(const TrainRecord&)>;

/// Plain gradient ascent theta += lr * gradient, one batch of rollouts per iteration.
TrainResult train(const MapSource& source, Policy policy, const TrainConfig& config,
                  const TrainCallback& on_iteration = {});

/// CSV columns iteration,mean_total_reward,mean_discounted_return,baseline,grad_norm.
std::string train_log_to_csv(const TrainLog& log);
void save_train_log(const TrainLog& log, const std::filesystem::path& path);

double l2_norm(std::span<const double> v);

}  // namespace pgsearch
