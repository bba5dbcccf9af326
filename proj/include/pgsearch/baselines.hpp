#pragma once

#include <vector>

#include "pgsearch/grid.hpp"
#include "pgsearch/probmap.hpp"

namespace pgsearch {

/// Sequence of 4-adjacent in-bounds cells, starting at the start cell.
struct PlannedPath {
  std::vector<Cell> cells;

  std::size_t steps() const { return cells.empty() ? 0 : cells.size() - 1; }
};

/// True when every cell is in bounds and each consecutive pair is 4-adjacent.
bool is_connected_path(const GridSpec& spec, const std::vector<Cell>& cells);

/// Lawnmower sweep. Entry leg runs along the start row to its nearer end, then along that
/// column to the nearer edge row; from that corner the grid is covered by full row passes in
/// alternating directions. Truncated to `horizon` moves.
PlannedPath boustrophedon_path(const GridSpec& spec, Cell start, int horizon);

inline constexpr double kDefaultSpiralThreshold = 0.05;

/// Informed spiral search: head for the highest remaining mass cell, spiral outward around it
/// (clockwise, first move North) until the next ring holds less than
/// `mass_threshold` times the initial total mass, then re-target. Truncated to `horizon` moves.
PlannedPath spiral_path(const ProbabilityMap& map, Cell start, int horizon,
                        double mass_threshold = kDefaultSpiralThreshold);

/// Shortest 4-connected path that first moves along the row (x), then along the column (y).
/// Excludes `from`, includes `to`.
std::vector<Cell> manhattan_leg(Cell from, Cell to);

struct PathResult {
  double total_reward = 0.0;
  double discounted_return = 0.0;
  std::vector<double> rewards;  // rewards[t] scanned at time t; rewards[0] is the start cell
  ProbabilityMap final_map;
};

/// Walks a path through the environment's scan-and-clear rule.
/// An empty path yields zero rewards and an unchanged map.
PathResult execute_path(const ProbabilityMap& map, const PlannedPath& path, double gamma);

}  // namespace pgsearch
