#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pgsearch/features.hpp"
#include "pgsearch/grid.hpp"
#include "pgsearch/rng.hpp"

namespace pgsearch {

/// Probabilities in canonical action order; illegal actions hold 0.
using ActionDistribution = std::array<double, kNumActions>;

/// Gibbs policy over linear state-action features:
/// pi(a|s) proportional to exp(theta . phi_sa), restricted to legal actions.
/// theta is laid out as four k-blocks in canonical action order.
class Policy {
 public:
  /// Zero parameters, i.e. uniform over legal actions.
  explicit Policy(FeatureDesign design);
  Policy(FeatureDesign design, std::vector<double> theta);

  const FeatureDesign& design() const { return design_; }
  std::span<const double> theta() const { return theta_; }
  std::span<double> theta() { return theta_; }
  std::size_t size() const { return theta_.size(); }

  /// theta_block(a) . phi_s, the logit of action a.
  double logit(std::span<const double> phi_s, Action a) const;

  ActionDistribution action_probs(std::span<const double> phi_s, ActionSet legal) const;

  /// Score function phi_sa - sum_b pi(b|s) phi_sb, length 4k.
  std::vector<double> grad_log_pi(std::span<const double> phi_s, Action action, ActionSet legal) const;
  /// Adds scale * grad_log_pi into `accum` without allocating.
  void accumulate_grad_log_pi(std::span<const double> phi_s, Action action, ActionSet legal, double scale,
                              std::span<double> accum) const;

  Action sample_action(std::span<const double> phi_s, ActionSet legal, Rng& rng) const;
  Action sample_action(std::span<const double> phi_s, ActionSet legal, std::uint64_t seed) const;
  Action argmax_action(std::span<const double> phi_s, ActionSet legal) const;

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  FeatureDesign design_;
  std::vector<double> theta_;
};

/// Draws from a distribution by inverse CDF over canonical order.
Action sample_from(const ActionDistribution& probs, ActionSet legal, double u);

/// Highest-probability legal action; ties go to the earlier action in canonical order.
Action argmax_from(const ActionDistribution& probs, ActionSet legal);

/// {"design": {"kind": ..., "k": ..., "window_radius": ...}, "theta": [...]}
std::string policy_to_json(const Policy& policy);
Policy policy_from_json(const std::string& text);
void save_policy(const Policy& policy, const std::filesystem::path& path);
Policy load_policy(const std::filesystem::path& path);

/// Throws ContractViolation when the policy's design cannot featurize `spec`.
void require_compatible(const Policy& policy, const GridSpec& spec);

}  // namespace pgsearch
