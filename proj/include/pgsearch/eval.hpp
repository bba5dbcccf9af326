#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pgsearch/baselines.hpp"
#include "pgsearch/env.hpp"
#include "pgsearch/features.hpp"
#include "pgsearch/policy.hpp"

namespace pgsearch {

// ---------------------------------------------------------------------------
// Method comparison

enum class Method { Policy, Boustrophedon, Spiral };

const char* method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

struct MethodSeries {
  Method method = Method::Policy;
  std::vector<Cell> positions;            // positions[t] scanned at time t
  std::vector<double> cumulative_total;   // sum of rewards up to and including time t
  std::vector<double> cumulative_discounted;
  std::vector<double> remaining_mass;     // map mass after the scan at time t

  double final_total() const { return cumulative_total.back(); }
  double final_discounted() const { return cumulative_discounted.back(); }
};

/// Per-method series over time 0..horizon. A method whose path ends early holds its final values.
struct ComparisonReport {
  int horizon = 0;
  double gamma = 0.0;
  Cell start;
  double initial_mass = 0.0;
  std::vector<MethodSeries> methods;

  const MethodSeries* find(Method m) const;
  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

bool operator==(const MethodSeries& a, const MethodSeries& b);

/// Runs each method from `start` on a private copy of the map. Method::Policy uses argmax
/// actions and requires `policy`.
ComparisonReport compare_methods(const ProbabilityMap& map, const std::vector<Method>& methods, Cell start,
                                 int horizon, double gamma, const Policy* policy = nullptr,
                                 double spiral_threshold = kDefaultSpiralThreshold);

/// Long format: method,step,cumulative_total,cumulative_discounted,remaining_mass,conservation_error.
std::string comparison_to_csv(const ComparisonReport& report);
std::string comparison_summary_json(const ComparisonReport& report);

// ---------------------------------------------------------------------------
// Exact enumeration over the trajectory tree

inline constexpr std::uint64_t kEnumerationBudget = 1'000'000;

/// Number of distinct legal action sequences of length `horizon` from `start`, saturating at UINT64_MAX.
std::uint64_t count_action_sequences(const GridSpec& spec, Cell start, int horizon);

/// Visits every full-length trajectory the sampling policy can produce from `start`,
/// together with its probability. Throws NumericalError when the tree exceeds `budget` leaves.
void enumerate_trajectories(const ProbabilityMap& map, const Policy& policy, Cell start, int horizon,
                            const std::function<void(double probability, const Trajectory&)>& visit,
                            std::uint64_t budget = kEnumerationBudget);

/// Exact expected discounted return under the sampling policy.
double exact_expected_return(const ProbabilityMap& map, const Policy& policy, Cell start, int horizon, double gamma);

/// First time each cell is scanned in `positions`, or -1 if never.
std::vector<int> first_visit_times(const GridSpec& spec, const std::vector<Cell>& positions);

// ---------------------------------------------------------------------------
// Proxy-reward propositions

enum class CheckMode { Enumerate, MonteCarlo };

struct PropositionReport {
  int proposition = 0;
  std::string instance;
  CheckMode mode = CheckMode::Enumerate;
  bool exact = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double lhs_se = 0.0;
  double rhs_se = 0.0;
  std::map<std::string, double> details;
  bool passed = false;
};

struct CheckOptions {
  /// Multiplies every proxy reward before it enters the checks. 1 in normal use; anything else
  /// is a deliberate corruption that the checks must detect.
  double proxy_reward_scale = 1.0;
};

/// Proxy objective E[sum_t gamma^t r_t] versus E_{tau,y}[gamma^T(y) 1(T(y) <= H)], with the target y
/// distributed as the initial map (mass missing from the grid means the target is never found).
/// Enumerate mode requires a fixed start and compares to 1e-12; Monte Carlo mode uses `samples`
/// rollouts and compares within 3 combined standard errors.
PropositionReport check_proposition1(const ProbabilityMap& map, const Policy& policy, const EnvConfig& config,
                                     CheckMode mode, int samples, std::uint64_t seed, const CheckOptions& options = {});

/// Gradient estimators sum_j gamma^j w_j sum_{t<j} grad log pi(a_t|s_t) per batch, with w the proxy reward
/// or the indicator of finding a target sampled from the initial map. Passes when the summed
/// per-component variance of the proxy estimator is below the indicator estimator's at one-sided 95%
/// confidence (paired test over batches) and the estimator means agree within 3 standard errors.
PropositionReport check_proposition2(const ProbabilityMap& map, const Policy& policy, const EnvConfig& config,
                                     int batches, int batch_size, std::uint64_t seed,
                                     const CheckOptions& options = {});

std::string proposition_report_json(const PropositionReport& report);

// ---------------------------------------------------------------------------
// Timing

struct TimingTable {
  std::vector<GridSpec> sizes;
  std::vector<FeatureKind> designs;
  std::vector<std::vector<double>> median_seconds;  // [design][size]

  /// median time at the largest size over median time at the smallest size.
  double growth_ratio(FeatureKind kind) const;
  /// AllGrid growth ratio strictly exceeds MultiRes growth ratio (needs both designs).
  bool multires_grows_slower() const;
};

/// Median-of-`repeats` wall time for one argmax rollout of `horizon` steps from the grid center,
/// with a random policy drawn from `policy_seed`, per design and size.
TimingTable timing_profile(const std::vector<FeatureKind>& designs, const std::vector<GridSpec>& sizes,
                           std::uint64_t policy_seed, int horizon, int repeats = 5);

std::string timing_to_csv(const TimingTable& table);

}  // namespace pgsearch
