#include "pgsearch/env.hpp"

#include <cmath>
#include <fstream>

#include "pgsearch/features.hpp"
#include "pgsearch/policy.hpp"
#include "pgsearch/rng.hpp"

namespace pgsearch {

void EnvConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ContractViolation("gamma must lie in (0, 1)");
  if (horizon < 0) throw ContractViolation("horizon must be nonnegative");
}

double Trajectory::total_reward() const {
  double s = 0.0;
  for (double r : rewards) s += r;
  return s;
}

ActionSet legal_actions(const SearchState& state) { return legal_actions(state.map.spec(), state.position); }

double step_in_place(SearchState& state, Action action) {
  const Cell next = moved(state.position, action);
  if (!state.map.spec().contains(next)) {
    throw ContractViolation(std::string("illegal action ") + action_name(action) + " from (" +
                            std::to_string(state.position.x) + "," + std::to_string(state.position.y) + ")");
  }
  state.position = next;
  // POD = 1: a scan that misses the target rules the cell out completely.
  return state.map.clear(next);
}

StepOutcome step(const SearchState& state, Action action) {
  StepOutcome out{state, 0.0, 0.0};
  out.reward = step_in_place(out.next_state, action);
  out.found_probability = out.reward;
  return out;
}

ResetResult reset(const ProbabilityMap& map, const EnvConfig& config, std::uint64_t seed) {
  Cell start;
  if (config.start_cell) {
    start = *config.start_cell;
    if (!map.spec().contains(start)) {
      throw ContractViolation("start cell (" + std::to_string(start.x) + "," + std::to_string(start.y) +
                              ") is outside the grid");
    }
  } else {
    Rng rng(derive_seed(seed, {0x7374617274ULL}));
    start = map.spec().cell_at(uniform_index(rng, map.spec().cells()));
  }
  ResetResult res{SearchState{start, map}, 0.0};
  res.reward = res.state.map.clear(start);
  return res;
}

Trajectory rollout(const ProbabilityMap& map, const Policy& policy, const EnvConfig& config, RolloutMode mode,
                   std::uint64_t seed) {
  config.validate();
  require_compatible(policy, map.spec());
  auto [state, r0] = reset(map, config, seed);
  Rng rng(derive_seed(seed, {0x616374ULL}));
  const auto k = static_cast<std::size_t>(policy.design().k);

  Trajectory traj;
  traj.horizon = config.horizon;
  const auto h = static_cast<std::size_t>(config.horizon);
  traj.positions.reserve(h + 1);
  traj.rewards.reserve(h + 1);
  traj.actions.reserve(h);
  traj.features.reserve(h);
  traj.legal.reserve(h);
  traj.positions.push_back(state.position);
  traj.rewards.push_back(r0);

  for (int t = 0; t < config.horizon; ++t) {
    const ActionSet legal = legal_actions(state);
    if (legal.empty()) break;  // 1x1 grid
    std::vector<double> phi(k);
    extract_state_features(state.map, state.position, policy.design(), phi);
    const Action a =
        mode == RolloutMode::Sample ? policy.sample_action(phi, legal, rng) : policy.argmax_action(phi, legal);
    const double r = step_in_place(state, a);
    traj.features.push_back(std::move(phi));
    traj.legal.push_back(legal);
    traj.actions.push_back(a);
    traj.rewards.push_back(r);
    traj.positions.push_back(state.position);
  }
  return traj;
}

double discounted_return(std::span<const double> rewards, double gamma) {
  double g = 0.0;
  double w = 1.0;
  for (double r : rewards) {
    g += w * r;
    w *= gamma;
  }
  return g;
}

double discounted_return(const Trajectory& traj, double gamma) { return discounted_return(traj.rewards, gamma); }

std::string trajectory_to_csv(std::span<const Cell> positions, std::span<const double> rewards) {
  std::string out = "step,x,y,action,reward\n";
  for (std::size_t t = 0; t < positions.size(); ++t) {
    std::string action = "none";
    if (t > 0) {
      auto a = action_between(positions[t - 1], positions[t]);
      action = a ? action_name(*a) : "jump";
    }
    out += std::to_string(t) + "," + std::to_string(positions[t].x) + "," + std::to_string(positions[t].y) + "," +
           action + "," + format_double(t < rewards.size() ? rewards[t] : 0.0) + "\n";
  }
  return out;
}

void save_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << trajectory_to_csv(traj.positions, traj.rewards);
}

}  // namespace pgsearch
