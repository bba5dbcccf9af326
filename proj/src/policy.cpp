#include "pgsearch/policy.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace pgsearch {

Policy::Policy(FeatureDesign design) : design_(design), theta_(static_cast<std::size_t>(kNumActions * design.k), 0.0) {}

Policy::Policy(FeatureDesign design, std::vector<double> theta) : design_(design), theta_(std::move(theta)) {
  if (theta_.size() != static_cast<std::size_t>(kNumActions * design_.k)) {
    throw ContractViolation("theta has length " + std::to_string(theta_.size()) + ", expected 4 x " +
                            std::to_string(design_.k));
  }
}

double Policy::logit(std::span<const double> phi_s, Action a) const {
  const auto k = static_cast<std::size_t>(design_.k);
  const double* block = theta_.data() + k * static_cast<std::size_t>(action_index(a));
  double z = 0.0;
  for (std::size_t i = 0; i < k; ++i) z += block[i] * phi_s[i];
  return z;
}

ActionDistribution Policy::action_probs(std::span<const double> phi_s, ActionSet legal) const {
  if (legal.empty()) throw ContractViolation("action_probs needs at least one legal action");
  if (phi_s.size() != static_cast<std::size_t>(design_.k)) throw ContractViolation("state features have wrong size");
  std::array<double, kNumActions> z{};
  double zmax = -std::numeric_limits<double>::infinity();
  for (Action a : kAllActions) {
    if (!legal.contains(a)) continue;
    z[action_index(a)] = logit(phi_s, a);
    zmax = std::max(zmax, z[action_index(a)]);
  }
  ActionDistribution p{};
  double norm = 0.0;
  for (Action a : kAllActions) {
    if (!legal.contains(a)) continue;
    p[action_index(a)] = std::exp(z[action_index(a)] - zmax);
    norm += p[action_index(a)];
  }
  for (double& v : p) v /= norm;
  return p;
}

void Policy::accumulate_grad_log_pi(std::span<const double> phi_s, Action action, ActionSet legal, double scale,
                                    std::span<double> accum) const {
  if (!legal.contains(action)) throw ContractViolation("grad_log_pi: action is not legal");
  const ActionDistribution p = action_probs(phi_s, legal);
  const auto k = static_cast<std::size_t>(design_.k);
  for (Action b : kAllActions) {
    if (!legal.contains(b)) continue;
    const double coef = scale * ((b == action ? 1.0 : 0.0) - p[action_index(b)]);
    if (coef == 0.0) continue;
    double* block = accum.data() + k * static_cast<std::size_t>(action_index(b));
    for (std::size_t i = 0; i < k; ++i) block[i] += coef * phi_s[i];
  }
}

std::vector<double> Policy::grad_log_pi(std::span<const double> phi_s, Action action, ActionSet legal) const {
  std::vector<double> g(theta_.size(), 0.0);
  accumulate_grad_log_pi(phi_s, action, legal, 1.0, g);
  return g;
}

Action sample_from(const ActionDistribution& probs, ActionSet legal, double u) {
  double cdf = 0.0;
  Action last = Action::North;
  for (Action a : kAllActions) {
    if (!legal.contains(a)) continue;
    last = a;
    cdf += probs[action_index(a)];
    if (u < cdf) return a;
  }
  return last;  // rounding left cdf slightly below 1
}

Action argmax_from(const ActionDistribution& probs, ActionSet legal) {
  Action best = Action::North;
  double best_p = -1.0;
  for (Action a : kAllActions) {
    if (legal.contains(a) && probs[action_index(a)] > best_p) {
      best = a;
      best_p = probs[action_index(a)];
    }
  }
  return best;
}

Action Policy::sample_action(std::span<const double> phi_s, ActionSet legal, Rng& rng) const {
  return sample_from(action_probs(phi_s, legal), legal, uniform01(rng));
}

Action Policy::sample_action(std::span<const double> phi_s, ActionSet legal, std::uint64_t seed) const {
  Rng rng(seed);
  return sample_action(phi_s, legal, rng);
}

Action Policy::argmax_action(std::span<const double> phi_s, ActionSet legal) const {
  if (legal.empty()) throw ContractViolation("argmax_action needs at least one legal action");
  // Comparing logits avoids ties created by exp() underflow.
  Action best = Action::North;
  double best_z = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (Action a : kAllActions) {
    if (!legal.contains(a)) continue;
    const double z = logit(phi_s, a);
    if (!found || z > best_z) {
      best = a;
      best_z = z;
      found = true;
    }
  }
  return best;
}

std::string policy_to_json(const Policy& policy) {
  nlohmann::json j;
  const auto& d = policy.design();
  j["design"] = {{"kind", d.name()}, {"k", d.k}, {"window_radius", d.window_radius}};
  j["theta"] = std::vector<double>(policy.theta().begin(), policy.theta().end());
  return j.dump() + "\n";
}

Policy policy_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("policy file is not valid JSON: ") + e.what());
  }
  if (!j.contains("design") || !j["design"].is_object()) throw ParseError("policy file needs a 'design' object");
  if (!j.contains("theta") || !j["theta"].is_array()) throw ParseError("policy file needs a 'theta' array");
  const auto& jd = j["design"];
  if (!jd.contains("kind") || !jd["kind"].is_string()) throw ParseError("design.kind must be a string");
  if (!jd.contains("k") || !jd["k"].is_number_integer()) throw ParseError("design.k must be an integer");
  FeatureDesign d;
  const auto kind = jd["kind"].get<std::string>();
  d.k = jd["k"].get<int>();
  d.window_radius = jd.value("window_radius", 0);
  if (kind == "multires") {
    d.kind = FeatureKind::MultiRes;
    if (d.k != kMultiResDim) throw ParseError("multires design must have k = 24");
  } else if (kind == "allgrid") {
    d.kind = FeatureKind::AllGrid;
    const int side = 2 * d.window_radius + 1;
    if (d.window_radius < 0 || d.k != side * side) throw ParseError("allgrid design k does not match window_radius");
  } else {
    throw ParseError("unknown design kind '" + kind + "'");
  }
  std::vector<double> theta;
  theta.reserve(j["theta"].size());
  for (const auto& v : j["theta"]) {
    if (!v.is_number()) throw ParseError("theta entries must be numbers");
    theta.push_back(v.get<double>());
  }
  if (theta.size() != static_cast<std::size_t>(kNumActions * d.k)) {
    throw ParseError("theta has length " + std::to_string(theta.size()) + ", expected " +
                     std::to_string(kNumActions * d.k));
  }
  return Policy(d, std::move(theta));
}

void save_policy(const Policy& policy, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << policy_to_json(policy);
}

Policy load_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return policy_from_json(ss.str());
}

void require_compatible(const Policy& policy, const GridSpec& spec) {
  if (!policy.design().compatible_with(spec)) {
    throw ContractViolation("policy design " + policy.design().name() + " (k=" + std::to_string(policy.design().k) +
                            ") does not fit a " + std::to_string(spec.width) + "x" + std::to_string(spec.height) +
                            " grid");
  }
}

}  // namespace pgsearch
