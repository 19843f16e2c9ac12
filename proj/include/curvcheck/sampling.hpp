#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "curvcheck/config.hpp"

namespace curvcheck {

class SamplingError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Points with |exclusion| below this are rejected.
inline constexpr double kExclusionMargin = 1e-6;
/// Points where the metric condition number exceeds this are rejected.
inline constexpr double kSamplingCondition = 1e8;

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
double unit_interval(std::uint64_t bits);

/// Rejection sampling from the per-coordinate box with std::mt19937_64 seeded
/// by `seed`. Coordinate i of a point is lo_i + (hi_i - lo_i) * u, with one
/// draw per coordinate in order. Explicit points in cfg.sampling are returned as
/// given (after the same rejection checks, which then throw instead of
/// resampling). Throws SamplingError after 10 * count failed attempts.
std::vector<std::vector<double>> sample_points(const ManifoldConfig& cfg, std::size_t count, std::uint64_t seed);

}  // namespace curvcheck
