#include "pgsearch/grid.hpp"

#include <charconv>
#include <cmath>

namespace pgsearch {

GridSpec::GridSpec(int w, int h, double size) : width(w), height(h), cell_size(size) {
  if (w < 1 || h < 1) throw ContractViolation("grid dimensions must be at least 1x1");
  if (!(size > 0.0) || !std::isfinite(size)) throw ContractViolation("cell size must be positive");
}

GridSpec parse_size(const std::string& text) {
  const auto sep = text.find_first_of("xX");
  if (sep == std::string::npos) throw ContractViolation("size must look like WxH: '" + text + "'");
  int w = 0;
  int h = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto r1 = std::from_chars(begin, begin + sep, w);
  auto r2 = std::from_chars(begin + sep + 1, end, h);
  if (r1.ec != std::errc{} || r1.ptr != begin + sep || r2.ec != std::errc{} || r2.ptr != end) {
    throw ContractViolation("size must look like WxH: '" + text + "'");
  }
  return GridSpec(w, h);
}

std::optional<Action> action_between(Cell from, Cell to) {
  for (Action a : kAllActions) {
    if (moved(from, a) == to) return a;
  }
  return std::nullopt;
}

const char* action_name(Action a) {
  switch (a) {
    case Action::North: return "N";
    case Action::East: return "E";
    case Action::South: return "S";
    case Action::West: return "W";
  }
  return "?";
}

std::optional<Action> parse_action(const std::string& name) {
  for (Action a : kAllActions) {
    if (name == action_name(a)) return a;
  }
  return std::nullopt;
}

ActionSet legal_actions(const GridSpec& spec, Cell at) {
  ActionSet set;
  for (Action a : kAllActions) {
    if (spec.contains(moved(at, a))) set.insert(a);
  }
  return set;
}

}  // namespace pgsearch
