#include "gtppo/baselines/compare.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gtppo/baselines/lqr.hpp"

namespace gtppo::baselines {

std::vector<State2> sample_initial_states(const env::EnvConfig& cfg, int n, std::uint64_t seed) {
  if (n < 0) throw ConfigError("number of cases must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u0(cfg.state_low[0], cfg.state_high[0]);
  std::uniform_real_distribution<double> u1(cfg.state_low[1], cfg.state_high[1]);
  std::vector<State2> out;
  for (int i = 0; i < n; ++i) {
    const double a = u0(rng);
    const double b = u1(rng);
    out.push_back({a, b});
  }
  return out;
}

std::string baseline_name(const env::EnvConfig& cfg) {
  if (cfg.phases.size() == 1 && cfg.system == env::SystemId::di) return "lqr";
  if (cfg.phases.size() == 1 && cfg.system == env::SystemId::vdp) return "shooting";
  throw ConfigError("compare supports the single-phase di and vdp environments, not '" + cfg.id + "'");
}

Trajectory baseline_rollout(const env::EnvConfig& cfg, const State2& x0, const ShootingOptions& opt) {
  if (baseline_name(cfg) == "lqr") return simulate_lqr(x0, lqr_for(cfg), cfg);
  return vdp_optimize(x0, cfg, opt).trajectory;
}

CompareSummary summarize(const std::vector<CompareCase>& cases) {
  CompareSummary s;
  s.n_cases = static_cast<int>(cases.size());
  double sum = 0.0;
  for (const auto& c : cases) {
    if (c.success) ++s.successes;
    if (!c.baseline_ok) continue;
    if (s.n_included == 0) {
      s.min_ratio = s.max_ratio = c.ratio;
    } else {
      s.min_ratio = std::min(s.min_ratio, c.ratio);
      s.max_ratio = std::max(s.max_ratio, c.ratio);
    }
    sum += c.ratio;
    ++s.n_included;
  }
  s.mean_ratio = s.n_included > 0 ? sum / s.n_included : 0.0;
  return s;
}

CompareReport compare(const env::EnvConfig& cfg, const PolicyRollout& policy, int n_cases, std::uint64_t seed,
                      const ShootingOptions& opt) {
  CompareReport rep;
  rep.env_id = cfg.id;
  rep.baseline = baseline_name(cfg);
  const auto starts = sample_initial_states(cfg, n_cases, seed);
  for (int i = 0; i < n_cases; ++i) {
    CompareCase c;
    c.id = i;
    c.x0 = starts[i];
    const Trajectory p = policy(c.x0);
    c.policy_cost = p.cost;
    c.success = p.success;
    try {
      c.baseline_cost = baseline_rollout(cfg, c.x0, opt).cost;
    } catch (const std::exception& e) {
      c.baseline_ok = false;
      c.note = std::string("baseline failed: ") + e.what();
    }
    if (c.baseline_ok && !(std::isfinite(c.baseline_cost) && c.baseline_cost > 0.0)) {
      c.baseline_ok = false;
      c.note = "baseline cost is not positive";
    }
    c.ratio = c.baseline_ok ? c.policy_cost / c.baseline_cost : 0.0;
    rep.cases.push_back(std::move(c));
  }
  rep.summary = summarize(rep.cases);
  return rep;
}

}  // namespace gtppo::baselines
