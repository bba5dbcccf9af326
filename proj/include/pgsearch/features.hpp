#pragma once

#include <span>
#include <string>
#include <vector>

#include "pgsearch/env.hpp"
#include "pgsearch/grid.hpp"
#include "pgsearch/probmap.hpp"

namespace pgsearch {

enum class FeatureKind { AllGrid, MultiRes };

// Multi-resolution geometry: three square annuli around the robot, split into eight
// direction sectors each. Annulus boundaries are Chebyshev distances.
inline constexpr int kMultiResSectors = 8;
inline constexpr int kMultiResAnnuli = 3;
inline constexpr int kMultiResDim = kMultiResSectors * kMultiResAnnuli;
inline constexpr int kInnerAnnulusMax = 1;   // annulus 0: distance 1
inline constexpr int kMiddleAnnulusMax = 4;  // annulus 1: distances 2..4, annulus 2: 5 and beyond

/// Which state featurization a policy was trained with. Stored alongside theta.
struct FeatureDesign {
  FeatureKind kind = FeatureKind::MultiRes;
  int k = kMultiResDim;
  int window_radius = 0;  // AllGrid only: window side is 2 * window_radius + 1

  static FeatureDesign multires();
  /// Window large enough to hold every relative offset of `spec`.
  static FeatureDesign allgrid(const GridSpec& spec);

  /// Whether extracting this design on `spec` yields exactly k features.
  bool compatible_with(const GridSpec& spec) const;
  std::string name() const;

  friend bool operator==(const FeatureDesign&, const FeatureDesign&) = default;
};

FeatureDesign parse_design(const std::string& name, const GridSpec& spec);

int feature_dim(const FeatureDesign& design, const GridSpec& spec);

/// Sector of a nonzero offset: 0 = N, then clockwise through NE, E, SE, S, SW, W, NW.
/// dy follows row indices, so North is dy < 0.
int multires_sector(int dx, int dy);

/// Annulus of a nonzero offset (0, 1 or 2).
int multires_annulus(int dx, int dy);

/// Feature slot of an offset (annulus-major, then sector); -1 for the robot's own cell.
inline int multires_slot(int dx, int dy) {
  if (dx == 0 && dy == 0) return -1;
  return multires_annulus(dx, dy) * kMultiResSectors + multires_sector(dx, dy);
}

/// Writes the k state features for a robot at `at` into `out` (size k).
void extract_state_features(const ProbabilityMap& map, Cell at, const FeatureDesign& design, std::span<double> out);
std::vector<double> extract_state_features(const SearchState& state, const FeatureDesign& design);

/// phi_s copied into the block of `action`, zeros in the other three blocks.
std::vector<double> extract_sa_features(std::span<const double> phi_s, Action action);

}  // namespace pgsearch
