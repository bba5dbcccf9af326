// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "pgsearch/baselines.hpp"
#include "pgsearch/eval.hpp"
#include "pgsearch/features.hpp"
#include "pgsearch/policy.hpp"
#include "pgsearch/probmap.hpp"
#include "pgsearch/rng.hpp"
#include "pgsearch/trainer.hpp"

using namespace pgsearch;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int id, bool ok, const std::string& title, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr int kSeeds = 5;
constexpr int kSeedsNeeded = 4;
constexpr double kGamma = 0.9;
constexpr int kHorizon = 300;
const Cell kCompareStart{0, 0};

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  Rng rng(101);
  int instances = 0;
  int passed = 0;
  double worst = 0.0;
  for (int i = 0; i < 24; ++i) {
    const GridSpec spec(1 + static_cast<int>(uniform_index(rng, 3)), 1 + static_cast<int>(uniform_index(rng, 3)));
    const auto map = generate_map(random_mixture(1 + static_cast<int>(uniform_index(rng, 3)), spec, rng()), spec);
    Policy policy(FeatureDesign::multires());
    if (i % 2 == 1) {
      for (double& t : policy.theta()) t = uniform(rng, -2.0, 2.0);
    }
    EnvConfig env;
    env.gamma = uniform(rng, 0.5, 0.99);
    env.horizon = 1 + static_cast<int>(uniform_index(rng, 5));
    env.start_cell = spec.cell_at(uniform_index(rng, spec.cells()));
    const auto rep = check_proposition1(map, policy, env, CheckMode::Enumerate, 0, 0);
    ++instances;
    worst = std::max(worst, std::abs(rep.lhs - rep.rhs));
    if (rep.exact && std::abs(rep.lhs - rep.rhs) <= 1e-12) ++passed;
  }
  const double secs = seconds_since(t0);
  verdict(1, passed == instances && instances >= 20 && secs < 60.0, "Proposition 1 exactness",
          fmt("%d/%d instances (grid <= 3x3, H <= 5) equal, max |lhs-rhs| = %.3g, %.2f s", passed, instances, worst,
              secs));
}

void criterion2() {
  const auto t0 = Clock::now();
  const GridSpec spec(5, 5);
  const auto map = generate_map(random_mixture(2, spec, 202), spec);
  EnvConfig env;
  env.gamma = kGamma;
  env.horizon = 8;
  const auto rep = check_proposition2(map, Policy(FeatureDesign::multires()), env, 200, 20, 203);
  const double secs = seconds_since(t0);
  verdict(2, rep.passed && secs < 300.0, "Proposition 2 variance ordering",
          fmt("var proxy %.4g < var indicator %.4g (paired t = %.2f), max mean gap %.2f SE, %.2f s",
              rep.details.at("var_proxy"), rep.details.at("var_indicator"), rep.details.at("paired_t"),
              rep.details.at("max_mean_gap_z"), secs));
}

// ---------------------------------------------------------------------------

// Direct log-softmax over the legal set, independent of the policy class.
double log_pi(const std::vector<double>& theta, const std::vector<double>& phi, Action a, ActionSet legal) {
  const std::size_t k = phi.size();
  auto logit = [&](Action b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < k; ++i) s += theta[action_index(b) * k + i] * phi[i];
    return static_cast<double>(s);
  };
  double z = 0.0;
  for (Action b : kAllActions) {
    if (legal.contains(b)) z += std::exp(logit(b));
  }
  return logit(a) - std::log(z);
}

void criterion3() {
  Rng rng(303);
  const auto design = FeatureDesign::multires();
  const std::size_t k = kMultiResDim;
  double worst_rel = 0.0;
  double worst_norm = 0.0;
  double worst_score = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    std::vector<double> theta(4 * k);
    std::vector<double> phi(k);
    for (auto& t : theta) t = uniform(rng, -1.0, 1.0);
    for (auto& p : phi) p = uniform(rng, 0.0, 1.0);
    ActionSet legal;
    while (legal.empty()) {
      for (Action b : kAllActions) {
        if (uniform01(rng) < 0.7) legal.insert(b);
      }
    }
    std::vector<Action> options;
    for (Action b : kAllActions) {
      if (legal.contains(b)) options.push_back(b);
    }
    const Action a = options[uniform_index(rng, options.size())];
    const Policy policy(design, theta);

    const auto grad = policy.grad_log_pi(phi, a, legal);
    const double h = 1e-5;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      auto up = theta;
      auto down = theta;
      up[i] += h;
      down[i] -= h;
      const double fd = (log_pi(up, phi, a, legal) - log_pi(down, phi, a, legal)) / (2 * h);
      worst_rel = std::max(worst_rel, std::abs(grad[i] - fd) / std::max(std::abs(grad[i]), 1e-3));
    }

    std::vector<double> big(theta);
    for (auto& t : big) t *= 50.0;
    for (const auto& th : {theta, big}) {
      const Policy p(design, th);
      const auto probs = p.action_probs(phi, legal);
      double total = 0.0;
      for (double v : probs) total += v;
      worst_norm = std::max(worst_norm, std::abs(total - 1.0));
      std::vector<double> expect(4 * k, 0.0);
      for (Action b : options) {
        const auto g = p.grad_log_pi(phi, b, legal);
        for (std::size_t i = 0; i < g.size(); ++i) expect[i] += probs[action_index(b)] * g[i];
      }
      for (double e : expect) worst_score = std::max(worst_score, std::abs(e));
    }
  }
  verdict(3, worst_rel <= 1e-6 && worst_norm <= 1e-12 && worst_score <= 1e-12, "Gradient correctness",
          fmt("100 pairs: max relative FD error %.3g, max |sum pi - 1| %.3g, max |E[score]| %.3g", worst_rel,
              worst_norm, worst_score));
}

// ---------------------------------------------------------------------------

struct Trained {
  Policy policy;
  double first10 = 0.0;
  double last10 = 0.0;
  double seconds = 0.0;
};

std::vector<Trained> train_seeds() {
  const GridSpec spec(30, 30);
  std::vector<Trained> out;
  for (int s = 0; s < kSeeds; ++s) {
    const auto map = generate_map(random_mixture(3, spec, derive_seed(404, {static_cast<std::uint64_t>(s)})), spec);
    TrainConfig cfg;
    cfg.env.gamma = kGamma;
    cfg.env.horizon = kHorizon;
    cfg.rollouts_per_iter = 20;
    cfg.seed = derive_seed(405, {static_cast<std::uint64_t>(s)});
    const auto t0 = Clock::now();
    auto result = train(MapSource::fixed(map), Policy(FeatureDesign::multires()), cfg);
    Trained t{result.policy};
    t.seconds = seconds_since(t0);
    const auto& rec = result.log.records;
    for (int i = 0; i < 10; ++i) {
      t.first10 += rec[i].mean_discounted_return / 10.0;
      t.last10 += rec[rec.size() - 1 - i].mean_discounted_return / 10.0;
    }
    std::printf("  seed %d: first-10 %.5f, last-10 %.5f, ratio %.2f, %.1f s\n", s, t.first10, t.last10,
                t.last10 / t.first10, t.seconds);
    std::fflush(stdout);
    out.push_back(std::move(t));
  }
  return out;
}

void criterion4(const std::vector<Trained>& runs) {
  int good = 0;
  double slowest = 0.0;
  for (const auto& r : runs) {
    if (r.last10 >= 1.5 * r.first10) ++good;
    slowest = std::max(slowest, r.seconds);
  }
  verdict(4, good >= kSeedsNeeded && slowest < 900.0, "Learning progress",
          fmt("%d/%d seeds reach last-10 >= 1.5 x first-10 on 30x30, slowest seed %.1f s", good, kSeeds, slowest));
}

// ---------------------------------------------------------------------------

std::vector<ComparisonReport> all_reports;

ProbabilityMap two_gaussian_scenario() {
  const GridSpec spec(30, 30);
  return generate_map(GaussianMixture({{{8, 8}, {3, 3}, 0.5}, {{22, 20}, {3, 3}, 0.5}}), spec);
}

ProbabilityMap ring_scenario() { return ring_map(GridSpec(30, 30), {15, 15}, 9, 1.5); }

void criterion5(const std::vector<Trained>& runs) {
  const auto gauss = two_gaussian_scenario();
  const auto ring = ring_scenario();
  const std::vector<Method> methods{Method::Policy, Method::Boustrophedon, Method::Spiral};
  int good = 0;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    const auto a = compare_methods(gauss, methods, kCompareStart, kHorizon, kGamma, &runs[s].policy);
    const auto b = compare_methods(ring, methods, kCompareStart, kHorizon, kGamma, &runs[s].policy);
    const double pa = a.find(Method::Policy)->final_discounted();
    const double ba = a.find(Method::Boustrophedon)->final_discounted();
    const double sa = a.find(Method::Spiral)->final_discounted();
    const double pb = b.find(Method::Policy)->final_discounted();
    const double bb = b.find(Method::Boustrophedon)->final_discounted();
    const double sb = b.find(Method::Spiral)->final_discounted();
    const bool ok = pa > ba && pb > bb && pb >= sb;
    if (ok) ++good;
    std::printf("  seed %zu: two-gaussian policy %.5f lawnmower %.5f spiral %.5f | ring policy %.5f lawnmower %.5f "
                "spiral %.5f%s\n",
                s, pa, ba, sa, pb, bb, sb, ok ? "" : "  <- ordering violated");
    all_reports.push_back(a);
    all_reports.push_back(b);
  }
  verdict(5, good >= kSeedsNeeded, "Method ordering",
          fmt("%d/%d seeds: policy > lawnmower on both scenarios and policy >= spiral on the ring (H=%d, start %d,%d)",
              good, kSeeds, kHorizon, kCompareStart.x, kCompareStart.y));
}

// ---------------------------------------------------------------------------

void criterion6() {
  double worst = 0.0;
  double max_total = 0.0;
  int revisit_violations = 0;
  std::size_t series = 0;
  for (const auto& rep : all_reports) {
    for (const auto& m : rep.methods) {
      ++series;
      std::vector<std::pair<int, int>> visited;
      for (std::size_t t = 0; t < m.positions.size(); ++t) {
        worst = std::max(worst, std::abs(m.cumulative_total[t] + m.remaining_mass[t] - 1.0));
        max_total = std::max(max_total, m.cumulative_total[t]);
        const auto key = std::make_pair(m.positions[t].x, m.positions[t].y);
        const bool again = std::find(visited.begin(), visited.end(), key) != visited.end();
        if (t > 0 && again && m.cumulative_total[t] != m.cumulative_total[t - 1]) ++revisit_violations;
        if (!again) visited.push_back(key);
      }
    }
  }
  verdict(6, series > 0 && worst <= 1e-9 && max_total <= 1.0 + 1e-9 && revisit_violations == 0,
          "Conservation suite",
          fmt("%zu series: max |collected + remaining - 1| = %.3g, max collected %.12f, %d paid revisits", series,
              worst, max_total, revisit_violations));
}

// ---------------------------------------------------------------------------

void criterion7() {
  bool dims_ok = true;
  bool partition_ok = true;
  std::string dims;
  for (int n : {15, 30, 50, 60, 100}) {
    const GridSpec spec(n, n);
    const auto map = generate_map(random_mixture(2, spec, 707), spec);
    const auto phi = extract_state_features(SearchState{Cell{n / 3, n / 2}, map}, FeatureDesign::multires());
    dims += std::to_string(n) + "x" + std::to_string(n) + ":" + std::to_string(phi.size()) + " ";
    dims_ok = dims_ok && phi.size() == 24;

    // Each single-cell indicator must light exactly one feature (none for the robot's own cell).
    std::vector<double> phi_buf(kMultiResDim);
    for (Cell robot : {Cell{0, 0}, Cell{n / 2, n / 2}, Cell{n - 1, n / 3}}) {
      auto probe = ProbabilityMap::zeros(spec);
      for (std::size_t c = 0; c < spec.cells(); ++c) {
        const Cell cell = spec.cell_at(c);
        probe.set(cell, 1.0);
        extract_state_features(probe, robot, FeatureDesign::multires(), phi_buf);
        int lit = 0;
        for (double v : phi_buf) lit += v > 0.0;
        partition_ok = partition_ok && lit == (cell == robot ? 0 : 1);
        probe.set(cell, 0.0);
      }
    }
  }
  const auto table = timing_profile({FeatureKind::MultiRes, FeatureKind::AllGrid},
                                    {GridSpec(15, 15), GridSpec(30, 30), GridSpec(60, 60)}, 708, kHorizon, 5);
  const double gm = table.growth_ratio(FeatureKind::MultiRes);
  const double ga = table.growth_ratio(FeatureKind::AllGrid);
  verdict(7, dims_ok && partition_ok && ga > gm, "Feature design properties",
          fmt("dims {%s} partition %s, 15->60 growth: allgrid %.2f vs multires %.2f (median of 5)", dims.c_str(),
              partition_ok ? "exact" : "BROKEN", ga, gm));
}

// ---------------------------------------------------------------------------

double uniform_random_return(const ProbabilityMap& map, Cell start, int rollouts) {
  EnvConfig env;
  env.gamma = kGamma;
  env.horizon = kHorizon;
  env.start_cell = start;
  const Policy uniform_policy(FeatureDesign::multires());
  double sum = 0.0;
  for (int i = 0; i < rollouts; ++i) {
    sum += discounted_return(rollout(map, uniform_policy, env, RolloutMode::Sample, derive_seed(809, {static_cast<std::uint64_t>(i)})),
                             kGamma);
  }
  return sum / rollouts;
}

void criterion8(const std::vector<Trained>& runs) {
  const GridSpec big(50, 50);
  const auto gmm50 = generate_map(random_mixture(3, big, 801), big);
  const auto annulus = ring_map(GridSpec(40, 40), {20, 20}, 12, 2.0);
  const double rand_gmm = uniform_random_return(gmm50, kCompareStart, 500);
  const double rand_ring = uniform_random_return(annulus, kCompareStart, 500);
  const auto path = std::filesystem::temp_directory_path() / "pgsearch_acceptance_policy.json";
  int good = 0;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    save_policy(runs[s].policy, path);
    const Policy loaded = load_policy(path);
    EnvConfig env;
    env.gamma = kGamma;
    env.horizon = kHorizon;
    env.start_cell = kCompareStart;
    const auto ta = rollout(gmm50, loaded, env, RolloutMode::Argmax, 0);
    const auto tb = rollout(annulus, loaded, env, RolloutMode::Argmax, 0);
    const double ra = discounted_return(ta, kGamma);
    const double rb = discounted_return(tb, kGamma);
    const bool ok = loaded == runs[s].policy && ta.steps() == kHorizon && tb.steps() == kHorizon && ra > rand_gmm &&
                    rb > rand_ring;
    if (ok) ++good;
    std::printf("  seed %zu: 50x50 gmm %.5f (random %.5f) | 40x40 ring %.5f (random %.5f)%s\n", s, ra, rand_gmm, rb,
                rand_ring, ok ? "" : "  <- not better than random");
  }
  std::filesystem::remove(path);
  verdict(8, good == kSeeds, "Transfer without retraining",
          fmt("%d/%d trained policies reload, run %d steps and beat the uniform-random policy on a 50x50 mixture and "
              "a 40x40 ring",
              good, kSeeds, kHorizon));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  std::printf("  training %d seeds on 30x30 mixtures (m=20, gamma=%.1f, H=%d, multires)\n", kSeeds, kGamma, kHorizon);
  const auto runs = train_seeds();
  criterion4(runs);
  criterion5(runs);
  criterion6();
  criterion7();
  criterion8(runs);
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
