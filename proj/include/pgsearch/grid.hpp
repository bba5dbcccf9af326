#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace pgsearch {

/// Thrown when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Thrown for malformed input files; the message names the offending location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a numerical computation produces NaN/Inf or a check budget is exceeded.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid cell. x is the column (grows East), y is the row (grows South).
struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct GridSpec {
  int width = 1;
  int height = 1;
  double cell_size = 1.0;  // meters per cell side

  GridSpec() = default;
  GridSpec(int w, int h, double size = 1.0);

  std::size_t cells() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.x);
  }
  Cell cell_at(std::size_t idx) const {
    return Cell{static_cast<int>(idx % static_cast<std::size_t>(width)),
                static_cast<int>(idx / static_cast<std::size_t>(width))};
  }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Parses "WxH" (e.g. "30x30").
GridSpec parse_size(const std::string& text);

enum class Action : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions{Action::North, Action::East, Action::South,
                                                             Action::West};

inline constexpr int action_index(Action a) { return static_cast<int>(a); }

inline constexpr Cell offset_of(Action a) {
  switch (a) {
    case Action::North: return {0, -1};
    case Action::East: return {1, 0};
    case Action::South: return {0, 1};
    case Action::West: return {-1, 0};
  }
  return {0, 0};
}

inline constexpr Cell moved(Cell c, Action a) {
  const Cell d = offset_of(a);
  return {c.x + d.x, c.y + d.y};
}

/// Action taking `from` to the 4-adjacent cell `to`, if any.
std::optional<Action> action_between(Cell from, Cell to);

const char* action_name(Action a);
std::optional<Action> parse_action(const std::string& name);

/// Subset of the four actions, stored as a bitmask in canonical order.
class ActionSet {
 public:
  constexpr ActionSet() = default;
  static constexpr ActionSet all() { return ActionSet(0xF); }

  constexpr bool contains(Action a) const { return (bits_ >> action_index(a)) & 1U; }
  constexpr void insert(Action a) { bits_ = static_cast<std::uint8_t>(bits_ | (1U << action_index(a))); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const {
    int n = 0;
    for (int i = 0; i < kNumActions; ++i) n += (bits_ >> i) & 1;
    return n;
  }
  constexpr std::uint8_t bits() const { return bits_; }
  friend constexpr bool operator==(ActionSet, ActionSet) = default;

 private:
  constexpr explicit ActionSet(std::uint8_t bits) : bits_(bits) {}
  std::uint8_t bits_ = 0;
};

/// Actions whose target cell stays inside the grid.
ActionSet legal_actions(const GridSpec& spec, Cell at);

}  // namespace pgsearch
