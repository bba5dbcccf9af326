#include "pgsearch/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace pgsearch {

namespace {

// tan(22.5 degrees). Irrational, so no integer offset lies exactly on a sector boundary.
constexpr double kTanEighth = 0.41421356237309504880;

/// Slot of every offset in [-(w-1), w-1] x [-(h-1), h-1]; rebuilt when the grid shape changes.
struct SlotTable {
  int rx = -1;
  int ry = -1;
  std::vector<signed char> slots;

  int side_x() const { return 2 * rx + 1; }

  void ensure(int width, int height) {
    if (rx == width - 1 && ry == height - 1) return;
    rx = width - 1;
    ry = height - 1;
    slots.assign(static_cast<std::size_t>(side_x()) * static_cast<std::size_t>(2 * ry + 1), -1);
    for (int dy = -ry; dy <= ry; ++dy) {
      for (int dx = -rx; dx <= rx; ++dx) {
        slots[static_cast<std::size_t>(dy + ry) * static_cast<std::size_t>(side_x()) +
              static_cast<std::size_t>(dx + rx)] = static_cast<signed char>(multires_slot(dx, dy));
      }
    }
  }
};

void extract_multires(const ProbabilityMap& map, Cell at, std::span<double> out) {
  thread_local SlotTable table;
  const auto& spec = map.spec();
  table.ensure(spec.width, spec.height);
  std::array<double, kMultiResDim> sum{};
  std::array<int, kMultiResDim> count{};
  const auto values = map.values();
  const auto side = static_cast<std::size_t>(table.side_x());
  for (int y = 0; y < spec.height; ++y) {
    const signed char* slot_row = table.slots.data() + static_cast<std::size_t>(y - at.y + table.ry) * side +
                                  static_cast<std::size_t>(table.rx - at.x);
    const double* q_row = values.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(spec.width);
    for (int x = 0; x < spec.width; ++x) {
      const int s = slot_row[x];
      if (s < 0) continue;
      sum[static_cast<std::size_t>(s)] += q_row[x];
      ++count[static_cast<std::size_t>(s)];
    }
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(kMultiResDim); ++i) {
    out[i] = count[i] > 0 ? sum[i] / count[i] : 0.0;
  }
}

void extract_allgrid(const ProbabilityMap& map, Cell at, int radius, std::span<double> out) {
  const auto& spec = map.spec();
  const int side = 2 * radius + 1;
  std::fill(out.begin(), out.end(), 0.0);
  const auto values = map.values();
  for (int y = 0; y < spec.height; ++y) {
    const int dy = y - at.y;
    if (dy < -radius || dy > radius) continue;
    for (int x = 0; x < spec.width; ++x) {
      const int dx = x - at.x;
      if (dx < -radius || dx > radius) continue;
      out[static_cast<std::size_t>((dy + radius) * side + (dx + radius))] = values[spec.index({x, y})];
    }
  }
}

}  // namespace

FeatureDesign FeatureDesign::multires() { return FeatureDesign{FeatureKind::MultiRes, kMultiResDim, 0}; }

FeatureDesign FeatureDesign::allgrid(const GridSpec& spec) {
  const int r = std::max(spec.width, spec.height) - 1;
  return FeatureDesign{FeatureKind::AllGrid, (2 * r + 1) * (2 * r + 1), r};
}

bool FeatureDesign::compatible_with(const GridSpec& spec) const {
  if (kind == FeatureKind::MultiRes) return k == kMultiResDim;
  // A larger window still holds every offset of a smaller grid.
  return window_radius >= std::max(spec.width, spec.height) - 1 && k == (2 * window_radius + 1) * (2 * window_radius + 1);
}

std::string FeatureDesign::name() const { return kind == FeatureKind::MultiRes ? "multires" : "allgrid"; }

FeatureDesign parse_design(const std::string& name, const GridSpec& spec) {
  if (name == "multires") return FeatureDesign::multires();
  if (name == "allgrid") return FeatureDesign::allgrid(spec);
  throw ContractViolation("unknown feature design '" + name + "' (expected multires or allgrid)");
}

int feature_dim(const FeatureDesign& design, const GridSpec& spec) {
  if (design.kind == FeatureKind::MultiRes) return kMultiResDim;
  const int side = 2 * std::max(spec.width, spec.height) - 1;
  return side * side;
}

int multires_sector(int dx, int dy) {
  const double east = dx;
  const double north = -dy;
  const double ae = std::abs(east);
  const double an = std::abs(north);
  if (ae < kTanEighth * an) return north > 0 ? 0 : 4;
  if (an < kTanEighth * ae) return east > 0 ? 2 : 6;
  if (east > 0) return north > 0 ? 1 : 3;
  return north > 0 ? 7 : 5;
}

int multires_annulus(int dx, int dy) {
  const int d = std::max(std::abs(dx), std::abs(dy));
  if (d <= kInnerAnnulusMax) return 0;
  if (d <= kMiddleAnnulusMax) return 1;
  return 2;
}

void extract_state_features(const ProbabilityMap& map, Cell at, const FeatureDesign& design, std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(design.k)) throw ContractViolation("feature buffer has wrong size");
  if (!design.compatible_with(map.spec())) throw ContractViolation("feature design does not fit this grid");
  if (design.kind == FeatureKind::MultiRes) {
    extract_multires(map, at, out);
  } else {
    extract_allgrid(map, at, design.window_radius, out);
  }
}

std::vector<double> extract_state_features(const SearchState& state, const FeatureDesign& design) {
  std::vector<double> phi(static_cast<std::size_t>(design.k));
  extract_state_features(state.map, state.position, design, phi);
  return phi;
}

std::vector<double> extract_sa_features(std::span<const double> phi_s, Action action) {
  std::vector<double> phi_sa(phi_s.size() * kNumActions, 0.0);
  std::copy(phi_s.begin(), phi_s.end(), phi_sa.begin() + static_cast<std::ptrdiff_t>(phi_s.size()) * action_index(action));
  return phi_sa;
}

}  // namespace pgsearch
