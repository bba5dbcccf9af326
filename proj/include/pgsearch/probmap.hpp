#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pgsearch/grid.hpp"

namespace pgsearch {

struct GaussianComponent {
  std::pair<double, double> mean;   // (x, y) in cell coordinates; cell (i, j) has its center at (i, j)
  std::pair<double, double> sigma;  // per-axis standard deviation, in cells
  double weight = 1.0;
};

/// Axis-aligned Gaussian mixture. Weights are normalized to sum to one on construction.
class GaussianMixture {
 public:
  explicit GaussianMixture(std::vector<GaussianComponent> components);

  const std::vector<GaussianComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }

  /// Mixture density at a continuous point.
  double density(double x, double y) const;

 private:
  std::vector<GaussianComponent> components_;
};

/// Thrown by generate_map when the mixture puts no numerically visible mass on the grid.
class EmptyDensityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-cell target probability mass, row-major. Not necessarily normalized once cells are cleared.
class ProbabilityMap {
 public:
  ProbabilityMap() = default;
  /// Validates that `values` has one nonnegative finite entry per cell.
  ProbabilityMap(GridSpec spec, std::vector<double> values);
  static ProbabilityMap zeros(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  std::span<const double> values() const { return q_; }

  double at(Cell c) const { return q_[spec_.index(c)]; }
  double at(std::size_t idx) const { return q_[idx]; }

  /// Sets a cell's mass to zero and returns the mass that was there.
  double clear(Cell c) {
    double& v = q_[spec_.index(c)];
    const double found = v;
    v = 0.0;
    return found;
  }

  void set(Cell c, double value);

  friend bool operator==(const ProbabilityMap&, const ProbabilityMap&) = default;

 private:
  GridSpec spec_;
  std::vector<double> q_;
};

/// Evaluates the mixture at every cell center and normalizes to unit mass.
/// `seed` is reserved for optional jitter and does not affect the result.
ProbabilityMap generate_map(const GaussianMixture& mixture, const GridSpec& spec, std::uint64_t seed = 0);

/// Means uniform in [0, width) x [0, height), sigmas uniform in [width/15, width/5],
/// weights drawn from a flat Dirichlet.
GaussianMixture random_mixture(int num_components, const GridSpec& spec, std::uint64_t seed);

double remaining_mass(const ProbabilityMap& map);

/// Plain CSV, one grid row per line, no header. Values written in shortest round-trip form.
void save_map(const ProbabilityMap& map, const std::filesystem::path& path);
ProbabilityMap load_map(const std::filesystem::path& path, double cell_size = 1.0);
std::string map_to_csv(const ProbabilityMap& map);
ProbabilityMap map_from_csv(const std::string& text, double cell_size = 1.0);

/// {"components": [{"mean": [x, y], "sigma": [sx, sy], "weight": w}, ...]}
void save_mixture(const GaussianMixture& mixture, const std::filesystem::path& path);
GaussianMixture load_mixture(const std::filesystem::path& path);
std::string mixture_to_json(const GaussianMixture& mixture);
GaussianMixture mixture_from_json(const std::string& text);

/// Normalized ring of mass: a Gaussian profile in the distance from `center`, peaking at `radius`.
/// Not representable by a small Gaussian mixture; used as a non-Gaussian test scenario.
ProbabilityMap ring_map(const GridSpec& spec, std::pair<double, double> center, double radius, double width);

std::string format_double(double v);

}  // namespace pgsearch
