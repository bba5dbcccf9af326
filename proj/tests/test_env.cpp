#include <cmath>
#include <functional>

#include "doctest.h"
#include "pgsearch/env.hpp"
#include "pgsearch/policy.hpp"

using namespace pgsearch;

TEST_CASE("legal actions follow grid geometry") {
  const GridSpec spec(5, 5);
  CHECK(legal_actions(spec, Cell{2, 2}).size() == 4);
  CHECK(legal_actions(spec, Cell{0, 0}).size() == 2);
  CHECK(legal_actions(spec, Cell{0, 0}).contains(Action::East));
  CHECK(legal_actions(spec, Cell{0, 0}).contains(Action::South));
  CHECK(legal_actions(GridSpec(2, 1), Cell{0, 0}).size() == 1);
  CHECK(legal_actions(GridSpec(1, 1), Cell{0, 0}).empty());
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) CHECK_FALSE(legal_actions(spec, Cell{x, y}).empty());
  }
}

TEST_CASE("step moves, rewards, and clears") {
  auto map = ProbabilityMap::zeros(GridSpec(10, 10));
  map.set(Cell{6, 5}, 0.2);
  const SearchState s{Cell{5, 5}, map};
  const auto out = step(s, Action::East);
  CHECK(out.next_state.position == Cell{6, 5});
  CHECK(out.reward == 0.2);
  CHECK(out.found_probability == out.reward);
  CHECK(out.next_state.map.at(Cell{6, 5}) == 0.0);
  CHECK(s.map.at(Cell{6, 5}) == 0.2);  // input untouched

  const auto again = step(step(out.next_state, Action::West).next_state, Action::East);
  CHECK(again.reward == 0.0);

  CHECK_THROWS_AS(step(SearchState{Cell{0, 0}, map}, Action::North), ContractViolation);
}

TEST_CASE("two-step discounted return on a hand-built 3x3 map") {
  // 0.1 0.2 0.0
  // 0.0 0.3 0.1
  // 0.1 0.0 0.2
  const ProbabilityMap map(GridSpec(3, 3), {0.1, 0.2, 0.0, 0.0, 0.3, 0.1, 0.1, 0.0, 0.2});
  EnvConfig cfg{0.9, 2, Cell{1, 1}};
  auto [s, r0] = reset(map, cfg, 0);
  const auto a = step(s, Action::North);  // (1,0): 0.2
  const auto b = step(a.next_state, Action::West);  // (0,0): 0.1
  const std::vector<double> rewards{r0, a.reward, b.reward};
  // Hand computation: 0.3 + 0.9 * 0.2 + 0.81 * 0.1 = 0.561
  CHECK(discounted_return(rewards, 0.9) == doctest::Approx(0.561).epsilon(1e-14));
}

TEST_CASE("reset scans the start cell") {
  auto map = ProbabilityMap::zeros(GridSpec(4, 4));
  map.set(Cell{1, 2}, 0.05);
  EnvConfig cfg{0.9, 10, Cell{1, 2}};
  const auto r = reset(map, cfg, 0);
  CHECK(r.reward == 0.05);
  CHECK(r.state.map.at(Cell{1, 2}) == 0.0);

  cfg.start_cell.reset();
  CHECK(reset(map, cfg, 123).state.position == reset(map, cfg, 123).state.position);

  cfg.start_cell = Cell{4, 0};
  CHECK_THROWS_AS(reset(map, cfg, 0), ContractViolation);
}

TEST_CASE("random starts cover the grid") {
  const auto map = ProbabilityMap::zeros(GridSpec(3, 2));
  EnvConfig cfg{0.9, 1, std::nullopt};
  std::vector<int> hits(6, 0);
  for (std::uint64_t s = 0; s < 600; ++s) ++hits[map.spec().index(reset(map, cfg, s).state.position)];
  for (int h : hits) CHECK(h > 50);
}

TEST_CASE("discounted_return arithmetic") {
  CHECK(discounted_return(std::vector<double>{1.0, 0.0, 0.5}, 0.9) == doctest::Approx(1.405).epsilon(1e-15));
  CHECK(discounted_return(std::vector<double>{0.0, 0.0, 0.0}, 0.9) == 0.0);
}

TEST_CASE("rollout contracts") {
  const GridSpec spec(6, 6);
  const auto map = generate_map(GaussianMixture({{{2, 3}, {1.5, 1.5}, 1.0}}), spec);
  const Policy uniform(FeatureDesign::multires());

  SUBCASE("horizon 0 keeps only the reset scan") {
    const auto t = rollout(map, uniform, EnvConfig{0.9, 0, Cell{2, 3}}, RolloutMode::Sample, 1);
    CHECK(t.steps() == 0);
    REQUIRE(t.rewards.size() == 1);
    CHECK(t.rewards[0] == map.at(Cell{2, 3}));
  }
  SUBCASE("argmax rollouts are deterministic") {
    std::vector<double> theta(96);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = std::sin(1.0 + static_cast<double>(i)) * 50.0;
    const Policy p(FeatureDesign::multires(), theta);
    const EnvConfig cfg{0.9, 30, Cell{0, 0}};
    const auto a = rollout(map, p, cfg, RolloutMode::Argmax, 1);
    const auto b = rollout(map, p, cfg, RolloutMode::Argmax, 2);
    CHECK(a.positions == b.positions);
    CHECK(a.rewards == b.rewards);
  }
  SUBCASE("sample rollouts are seed-deterministic and respect invariants") {
    const EnvConfig cfg{0.9, 40, std::nullopt};
    const auto a = rollout(map, uniform, cfg, RolloutMode::Sample, 17);
    const auto b = rollout(map, uniform, cfg, RolloutMode::Sample, 17);
    CHECK(a.positions == b.positions);
    CHECK(a.steps() == 40);
    CHECK(a.features.size() == a.steps());
    CHECK(a.legal.size() == a.steps());
    CHECK(a.rewards.size() == a.steps() + 1);
    CHECK(a.total_reward() <= 1.0 + 1e-9);
    // Revisits earn nothing and every reward is the map value at first visit.
    std::vector<bool> seen(spec.cells(), false);
    for (std::size_t t = 0; t < a.positions.size(); ++t) {
      const auto idx = spec.index(a.positions[t]);
      CHECK(a.rewards[t] == (seen[idx] ? 0.0 : map.at(idx)));
      seen[idx] = true;
    }
  }
}

TEST_CASE("mass conservation and monotonicity along random walks") {
  const GridSpec spec(7, 5);
  const auto map = generate_map(GaussianMixture({{{1, 1}, {2, 1}, 0.3}, {{5, 4}, {1, 2}, 0.7}}), spec);
  const Policy uniform(FeatureDesign::multires());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = rollout(map, uniform, EnvConfig{0.9, 60, std::nullopt}, RolloutMode::Sample, seed);
    SearchState s{t.positions[0], map};
    double prev = remaining_mass(s.map);
    s.map.clear(s.position);
    CHECK(prev - remaining_mass(s.map) == doctest::Approx(t.rewards[0]).epsilon(1e-15));
    prev = remaining_mass(s.map);
    for (std::size_t i = 0; i < t.steps(); ++i) {
      const double r = step_in_place(s, t.actions[i]);
      const double now = remaining_mass(s.map);
      CHECK(r == t.rewards[i + 1]);
      CHECK(std::abs((prev - now) - r) <= 1e-15);
      CHECK(now <= prev);
      prev = now;
    }
  }
}

namespace {

// Exhaustive expectation of the discounted return for a uniform random walk, independent of the policy code.
double uniform_walk_expectation(const ProbabilityMap& map, Cell pos, int steps_left, double gamma, int t) {
  if (steps_left == 0) return 0.0;
  const auto legal = legal_actions(map.spec(), pos);
  const double p = 1.0 / legal.size();
  double total = 0.0;
  for (Action a : kAllActions) {
    if (!legal.contains(a)) continue;
    ProbabilityMap next = map;
    const Cell to = moved(pos, a);
    const double r = next.clear(to);
    total += p * (std::pow(gamma, t + 1) * r + uniform_walk_expectation(next, to, steps_left - 1, gamma, t + 1));
  }
  return total;
}

}  // namespace

TEST_CASE("uniform policy rollouts average to the exhaustive expectation") {
  const GridSpec spec(4, 4);
  std::vector<double> q(16);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = (static_cast<double>((i * 7) % 5) + 1.0) / 56.0;
  const ProbabilityMap map(spec, q);
  const Cell start{1, 2};
  ProbabilityMap after = map;
  const double r0 = after.clear(start);
  const double exact = r0 + uniform_walk_expectation(after, start, 6, 0.9, 0);

  const Policy uniform(FeatureDesign::multires());
  const EnvConfig cfg{0.9, 6, start};
  const int n = 10000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = discounted_return(rollout(map, uniform, cfg, RolloutMode::Sample, static_cast<std::uint64_t>(i)), 0.9);
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1));
  CHECK(std::abs(mean - exact) <= 3.0 * se);
}

TEST_CASE("trajectory CSV layout") {
  const std::vector<Cell> pos{{0, 0}, {1, 0}, {1, 1}};
  const std::vector<double> rew{0.5, 0.25, 0.0};
  CHECK(trajectory_to_csv(pos, rew) == "step,x,y,action,reward\n0,0,0,none,0.5\n1,1,0,E,0.25\n2,1,1,S,0\n");
}
