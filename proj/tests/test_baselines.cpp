#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "pgsearch/baselines.hpp"
#include "pgsearch/rng.hpp"

using namespace pgsearch;

namespace {

std::set<std::size_t> visited(const GridSpec& spec, const std::vector<Cell>& cells) {
  std::set<std::size_t> s;
  for (Cell c : cells) s.insert(spec.index(c));
  return s;
}

}  // namespace

TEST_CASE("boustrophedon on 3x3 from a corner") {
  const GridSpec spec(3, 3);
  const auto p = boustrophedon_path(spec, Cell{0, 0}, 20);
  const std::vector<Cell> expected{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1}, {0, 1}, {0, 2}, {1, 2}, {2, 2}};
  CHECK(p.cells == expected);
  CHECK(p.steps() == 8);
  CHECK(boustrophedon_path(spec, Cell{1, 1}, 0).cells == std::vector<Cell>{{1, 1}});
}

TEST_CASE("boustrophedon covers 30x30 exactly once from every corner") {
  const GridSpec spec(30, 30);
  for (Cell corner : {Cell{0, 0}, Cell{29, 0}, Cell{0, 29}, Cell{29, 29}}) {
    const auto p = boustrophedon_path(spec, corner, 100000);
    CHECK(p.cells.size() == 900);
    CHECK(visited(spec, p.cells).size() == 900);
    CHECK(is_connected_path(spec, p.cells));
  }
}

TEST_CASE("boustrophedon from interior starts still covers everything") {
  const GridSpec spec(7, 5);
  for (std::size_t i = 0; i < spec.cells(); ++i) {
    const auto p = boustrophedon_path(spec, spec.cell_at(i), 1000);
    CHECK(is_connected_path(spec, p.cells));
    CHECK(visited(spec, p.cells).size() == spec.cells());
    CHECK(p.cells.front() == spec.cell_at(i));
  }
  const auto truncated = boustrophedon_path(spec, Cell{3, 2}, 6);
  CHECK(truncated.steps() == 6);
}

TEST_CASE("spiral around a sharp central peak") {
  const GridSpec spec(21, 21);
  const auto map = generate_map(GaussianMixture({{{10, 10}, {1.0, 1.0}, 1.0}}), spec);
  const auto p = spiral_path(map, Cell{10, 10}, 50);
  REQUIRE(p.cells.size() >= 9);
  std::set<std::size_t> first9;
  for (std::size_t i = 0; i < 9; ++i) first9.insert(spec.index(p.cells[i]));
  std::set<std::size_t> ring;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) ring.insert(spec.index(Cell{10 + dx, 10 + dy}));
  }
  CHECK(first9 == ring);
  CHECK(p.cells[1] == Cell{10, 9});  // first move is North
  CHECK(p.cells[2] == Cell{11, 9});  // then clockwise
}

TEST_CASE("spiral on an empty map circles the start") {
  const GridSpec spec(9, 9);
  const auto p = spiral_path(ProbabilityMap::zeros(spec), Cell{4, 4}, 200);
  CHECK(p.cells.front() == Cell{4, 4});
  std::set<std::size_t> first9;
  for (std::size_t i = 0; i < 9; ++i) first9.insert(spec.index(p.cells[i]));
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) CHECK(first9.count(spec.index(Cell{4 + dx, 4 + dy})) == 1);
  }
  CHECK(p.steps() == 200);
  CHECK(is_connected_path(spec, p.cells));
  CHECK(visited(spec, p.cells).size() == 81);
}

TEST_CASE("spiral visits the heavier mode first") {
  const GridSpec spec(40, 40);
  const double threshold = kDefaultSpiralThreshold;
  const GaussianMixture heavy({{{10, 10}, {2, 2}, 1.0}});
  const GaussianMixture light({{{30, 28}, {2, 2}, 1.0}});
  const auto map = generate_map(GaussianMixture({{{10, 10}, {2, 2}, 0.6}, {{30, 28}, {2, 2}, 0.4}}), spec);
  const auto p = spiral_path(map, Cell{0, 39}, 400, threshold);
  REQUIRE(is_connected_path(spec, p.cells));

  // Simulate the emitted path against the heavy mode alone.
  auto heavy_map = generate_map(heavy, spec);
  int cleared_at = -1;
  int light_peak_at = -1;
  double cleared = 0.0;
  for (std::size_t t = 0; t < p.cells.size(); ++t) {
    cleared += heavy_map.clear(p.cells[t]);
    if (cleared_at < 0 && cleared >= 1.0 - threshold) cleared_at = static_cast<int>(t);
    if (light_peak_at < 0 && p.cells[t] == Cell{30, 28}) light_peak_at = static_cast<int>(t);
  }
  REQUIRE(cleared_at >= 0);
  REQUIRE(light_peak_at >= 0);
  CHECK(light_peak_at > cleared_at);
}

TEST_CASE("planned paths are connected and in bounds") {
  Rng rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const GridSpec spec(1 + static_cast<int>(uniform_index(rng, 25)), 1 + static_cast<int>(uniform_index(rng, 25)));
    const auto map = generate_map(random_mixture(1 + static_cast<int>(uniform_index(rng, 3)), spec, rng()), spec);
    const Cell start = spec.cell_at(uniform_index(rng, spec.cells()));
    const int horizon = static_cast<int>(uniform_index(rng, 400));
    const double thr = uniform(rng, 0.0, 0.2);
    const auto b = boustrophedon_path(spec, start, horizon);
    const auto s = spiral_path(map, start, horizon, thr);
    CHECK(is_connected_path(spec, b.cells));
    CHECK(is_connected_path(spec, s.cells));
    CHECK(static_cast<int>(b.steps()) <= horizon);
    CHECK(static_cast<int>(s.steps()) <= horizon);
    CHECK(b.cells.front() == start);
    CHECK(s.cells.front() == start);
    if (spec.cells() > 1) CHECK(static_cast<int>(s.steps()) == horizon);
  }
}

TEST_CASE("execute_path conservation") {
  const GridSpec spec(12, 9);
  const auto map = generate_map(random_mixture(3, spec, 8), spec);
  SUBCASE("full coverage collects all mass") {
    const auto res = execute_path(map, boustrophedon_path(spec, Cell{0, 0}, 10000), 0.9);
    CHECK(std::abs(res.total_reward - 1.0) <= 1e-9);
    CHECK(remaining_mass(res.final_map) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("empty path") {
    const auto res = execute_path(map, PlannedPath{}, 0.9);
    CHECK(res.total_reward == 0.0);
    CHECK(res.discounted_return == 0.0);
    CHECK(res.rewards.empty());
  }
  SUBCASE("any path conserves mass") {
    for (int h : {0, 5, 50, 200}) {
      const auto res = execute_path(map, spiral_path(map, Cell{6, 4}, h), 0.9);
      CHECK(std::abs(res.total_reward + remaining_mass(res.final_map) - 1.0) <= 1e-9);
      CHECK(res.discounted_return <= res.total_reward + 1e-15);
    }
  }
  SUBCASE("non-adjacent cells are rejected") {
    PlannedPath bad{{Cell{0, 0}, Cell{2, 0}}};
    CHECK_THROWS_AS(execute_path(map, bad, 0.9), ContractViolation);
  }
}

TEST_CASE("spiral beats the lawnmower on a symmetric unimodal map") {
  const GridSpec spec(30, 30);
  const auto map = generate_map(GaussianMixture({{{15, 15}, {3, 3}, 1.0}}), spec);
  for (Cell start : {Cell{0, 0}, Cell{29, 0}, Cell{15, 15}, Cell{5, 20}}) {
    const double spiral = execute_path(map, spiral_path(map, start, 300), 0.9).discounted_return;
    const double lawn = execute_path(map, boustrophedon_path(spec, start, 300), 0.9).discounted_return;
    CHECK(spiral >= lawn);
  }
}
