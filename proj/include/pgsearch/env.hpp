#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgsearch/grid.hpp"
#include "pgsearch/probmap.hpp"

namespace pgsearch {

class Policy;

/// MDP state: robot cell plus the current (partially cleared) map.
struct SearchState {
  Cell position;
  ProbabilityMap map;
};

struct StepOutcome {
  SearchState next_state;
  double reward = 0.0;
  double found_probability = 0.0;  // probability the target was in the scanned cell; equals reward
};

struct EnvConfig {
  double gamma = 0.9;
  int horizon = 300;
  std::optional<Cell> start_cell;  // nullopt: uniform-random in-bounds start drawn from the reset seed

  void validate() const;
};

/// One episode. Index t of `positions` and `rewards` is time t; time 0 is the reset scan,
/// so both have length steps()+1. `features[t]`, `legal[t]` describe the state in which
/// `actions[t]` was taken, and that action produced `rewards[t + 1]`.
struct Trajectory {
  std::vector<Cell> positions;
  std::vector<Action> actions;
  std::vector<double> rewards;
  std::vector<std::vector<double>> features;
  std::vector<ActionSet> legal;
  int horizon = 0;

  std::size_t steps() const { return actions.size(); }
  double total_reward() const;
};

enum class RolloutMode { Sample, Argmax };

ActionSet legal_actions(const SearchState& state);

/// Moves one cell and scans it. Reward is the mass of the entered cell before clearing (POD = 1).
StepOutcome step(const SearchState& state, Action action);

/// In-place variant used by rollouts; returns the reward.
double step_in_place(SearchState& state, Action action);

/// Places the robot and scans the start cell. Returns the post-scan state and the start-cell mass.
struct ResetResult {
  SearchState state;
  double reward = 0.0;
};
ResetResult reset(const ProbabilityMap& map, const EnvConfig& config, std::uint64_t seed);

/// Runs up to config.horizon steps of the policy on a private copy of `map`.
Trajectory rollout(const ProbabilityMap& map, const Policy& policy, const EnvConfig& config, RolloutMode mode,
                   std::uint64_t seed);

/// Sum of gamma^t * rewards[t].
double discounted_return(std::span<const double> rewards, double gamma);
double discounted_return(const Trajectory& traj, double gamma);

/// CSV columns step,x,y,action,reward. Row 0 is the reset scan with action "none".
std::string trajectory_to_csv(std::span<const Cell> positions, std::span<const double> rewards);
void save_trajectory(const Trajectory& traj, const std::filesystem::path& path);

}  // namespace pgsearch
