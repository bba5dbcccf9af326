#include "pgsearch/baselines.hpp"

#include <cstdlib>

#include "pgsearch/env.hpp"

namespace pgsearch {

bool is_connected_path(const GridSpec& spec, const std::vector<Cell>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!spec.contains(cells[i])) return false;
    if (i > 0 && !action_between(cells[i - 1], cells[i])) return false;
  }
  return true;
}

std::vector<Cell> manhattan_leg(Cell from, Cell to) {
  std::vector<Cell> leg;
  Cell c = from;
  while (c.x != to.x) {
    c.x += to.x > c.x ? 1 : -1;
    leg.push_back(c);
  }
  while (c.y != to.y) {
    c.y += to.y > c.y ? 1 : -1;
    leg.push_back(c);
  }
  return leg;
}

namespace {

/// Appends cells until the move budget runs out.
class PathBuilder {
 public:
  PathBuilder(Cell start, int horizon) : horizon_(horizon) { path_.cells.push_back(start); }

  bool full() const { return static_cast<int>(path_.steps()) >= horizon_; }
  Cell current() const { return path_.cells.back(); }

  /// Returns false once the budget is exhausted.
  bool push(Cell c) {
    if (full()) return false;
    path_.cells.push_back(c);
    return true;
  }

  bool go_to(Cell target) {
    for (Cell c : manhattan_leg(current(), target)) {
      if (!push(c)) return false;
    }
    return true;
  }

  PlannedPath take() { return std::move(path_); }
  const PlannedPath& path() const { return path_; }

 private:
  int horizon_;
  PlannedPath path_;
};

}  // namespace

PlannedPath boustrophedon_path(const GridSpec& spec, Cell start, int horizon) {
  if (!spec.contains(start)) throw ContractViolation("boustrophedon start is outside the grid");
  PathBuilder b(start, horizon);
  const int x_end = start.x <= spec.width - 1 - start.x ? 0 : spec.width - 1;
  const int y_end = start.y <= spec.height - 1 - start.y ? 0 : spec.height - 1;
  if (!b.go_to({x_end, start.y}) || !b.go_to({x_end, y_end})) return b.take();

  const int ydir = y_end == 0 ? 1 : -1;
  int x_target = x_end == 0 ? spec.width - 1 : 0;
  for (int row = 0; row < spec.height; ++row) {
    const int y = y_end + ydir * row;
    if (row > 0 && !b.push({b.current().x, y})) break;
    if (!b.go_to({x_target, y})) break;
    x_target = x_target == 0 ? spec.width - 1 : 0;
  }
  return b.take();
}

namespace {

double ring_mass(const ProbabilityMap& m, Cell center, int r) {
  const auto& spec = m.spec();
  double s = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    const int y = center.y + dy;
    if (y < 0 || y >= spec.height) continue;
    const int step = (dy == -r || dy == r) ? 1 : 2 * r;
    for (int dx = -r; dx <= r; dx += step) {
      const int x = center.x + dx;
      if (x >= 0 && x < spec.width) s += m.at(Cell{x, y});
    }
  }
  return s;
}

bool ring_off_grid(const GridSpec& spec, Cell center, int r) {
  return center.x - r < 0 && center.x + r >= spec.width && center.y - r < 0 && center.y + r >= spec.height;
}

Cell argmax_cell(const ProbabilityMap& m) {
  std::size_t best = 0;
  const auto v = m.values();
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return m.spec().cell_at(best);
}

}  // namespace

PlannedPath spiral_path(const ProbabilityMap& map, Cell start, int horizon, double mass_threshold) {
  const auto& spec = map.spec();
  if (!spec.contains(start)) throw ContractViolation("spiral start is outside the grid");
  if (!(mass_threshold >= 0.0)) throw ContractViolation("spiral mass threshold must be nonnegative");
  PathBuilder b(start, horizon);
  if (spec.cells() == 1) return b.take();

  ProbabilityMap m = map;
  const double initial_mass = remaining_mass(map);
  const double stop_mass = mass_threshold * initial_mass;
  // The first hotspot is chosen on the map as given, so a start on the peak spirals in place.
  bool first = true;
  while (!b.full()) {
    Cell center;
    bool exhausted = false;
    if (first) {
      center = argmax_cell(m);
      exhausted = remaining_mass(m) <= 0.0;
      if (exhausted) center = start;
      m.clear(start);
      first = false;
    } else {
      exhausted = remaining_mass(m) <= 0.0;
      center = exhausted ? b.current() : argmax_cell(m);
    }
    const std::size_t before = b.path().cells.size();
    auto visit = [&](Cell c) {
      if (!b.go_to(c)) return false;
      m.clear(c);
      return true;
    };
    // The leg walk also clears the transit cells it passes through.
    for (Cell c : manhattan_leg(b.current(), center)) {
      if (!b.push(c)) break;
      m.clear(c);
    }
    if (b.full()) break;

    // Square spiral legs N1 E1 S2 W2 N3 E3 ...; each new Chebyshev ring is checked before entry.
    Cell p = center;
    int ring = 0;
    bool stop = false;
    for (int leg = 0; !stop; ++leg) {
      const int len = leg / 2 + 1;
      const Action dir = kAllActions[static_cast<std::size_t>(leg % 4)];
      for (int s = 0; s < len; ++s) {
        p = moved(p, dir);
        const int d = std::max(std::abs(p.x - center.x), std::abs(p.y - center.y));
        if (d > ring) {
          ring = d;
          if (ring_off_grid(spec, center, ring) || (!exhausted && ring_mass(m, center, ring) < stop_mass)) {
            stop = true;
            break;
          }
        }
        if (!spec.contains(p)) continue;
        if (!visit(p)) {
          stop = true;
          break;
        }
      }
    }
    if (b.path().cells.size() == before && !exhausted) {
      // Nothing moved: the hotspot was the current cell and its first ring is below threshold.
      // Clearing guarantees the next argmax differs, so the loop still makes progress.
      m.clear(center);
    }
  }
  return b.take();
}

PathResult execute_path(const ProbabilityMap& map, const PlannedPath& path, double gamma) {
  PathResult res;
  res.final_map = map;
  if (path.cells.empty()) return res;
  const auto& spec = map.spec();
  if (!spec.contains(path.cells.front())) throw ContractViolation("path starts outside the grid");
  SearchState state{path.cells.front(), map};
  res.rewards.reserve(path.cells.size());
  res.rewards.push_back(state.map.clear(state.position));
  for (std::size_t i = 1; i < path.cells.size(); ++i) {
    auto a = action_between(state.position, path.cells[i]);
    if (!a || !spec.contains(path.cells[i])) {
      throw ContractViolation("path cells " + std::to_string(i - 1) + " and " + std::to_string(i) +
                              " are not adjacent");
    }
    res.rewards.push_back(step_in_place(state, *a));
  }
  for (double r : res.rewards) res.total_reward += r;
  res.discounted_return = discounted_return(res.rewards, gamma);
  res.final_map = std::move(state.map);
  return res;
}

}  // namespace pgsearch
