#include "curvcheck/sampling.hpp"

#include <cmath>
#include <random>
#include <string>

namespace curvcheck {

namespace {

// Empty string when p is usable, else the reason it is not.
std::string reject_reason(const ManifoldConfig& cfg, const std::vector<double>& p) {
  if (cfg.chart.exclusion) {
    const double e = eval_value(*cfg.chart.exclusion, p);
    if (!(std::abs(e) >= kExclusionMargin)) return "too close to the exclusion locus";
  }
  try {
    const MetricAt m = metric_at(cfg.metric, p);
    if (!(m.condition <= kSamplingCondition)) return "metric condition number " + std::to_string(m.condition);
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<std::vector<double>> sample_points(const ManifoldConfig& cfg, std::size_t count, std::uint64_t seed) {
  if (!cfg.sampling.points.empty()) {
    for (const auto& p : cfg.sampling.points) {
      const std::string why = reject_reason(cfg, p);
      if (!why.empty()) throw SamplingError("explicit sample point rejected: " + why);
    }
    return cfg.sampling.points;
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out;
  const std::size_t max_attempts = 10 * count;
  for (std::size_t attempt = 0; out.size() < count; ++attempt) {
    if (attempt >= max_attempts) {
      throw SamplingError("found only " + std::to_string(out.size()) + " of " + std::to_string(count) +
                          " valid points in " + std::to_string(max_attempts) + " attempts");
    }
    std::vector<double> p;
    for (const auto& [lo, hi] : cfg.sampling.box) p.push_back(lo + (hi - lo) * unit_interval(rng()));
    if (reject_reason(cfg, p).empty()) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace curvcheck
