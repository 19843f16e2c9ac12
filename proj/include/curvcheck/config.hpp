#pragma once

/**
 * @file config.hpp
 * @brief Manifold configuration files and the built-in zoo.
 *
 * Configs are INI text. Sections:
 *
 *   [chart]     coords = x, y, z          exclusion = z (optional)
 *   [metric]    x,x = z^-4                lower triangle; an upper entry must match its mirror
 *   [vectors]   name = comp1, comp2, ...  contravariant components
 *   [forms]     name = comp1, comp2, ...  covariant components
 *   [frame]     name = comp1, ...         n vectors, in order (optional)
 *   [structure] x = J^x_x, J^x_y, ...     one row of J per coordinate (optional)
 *   [sampling]  x = lo, hi (per coordinate)  count = 20  seed = 1
 *               points = 1, 1, 1; 0, 0, 2    explicit points replace random sampling
 *   [soliton]   field, kind, connection, pi, p, classify_tol, residual_tol
 *   [example]   free-form key = value pairs echoed into reports
 */

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "curvcheck/connections.hpp"
#include "curvcheck/geometry.hpp"
#include "curvcheck/solitons.hpp"

namespace curvcheck {

struct ConfigIssue {
  std::string path;  // e.g. "metric.x,y"
  std::string message;
};

/// Every problem found while loading, in file order.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  ConfigError(std::string path, std::string message);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct SampleSpec {
  std::vector<std::pair<double, double>> box;  // one interval per coordinate
  std::size_t count = 20;
  std::uint64_t seed = 1;
  std::vector<std::vector<double>> points;  // explicit points; empty means sample the box
};

struct SolitonSettings {
  std::optional<std::string> field;
  SolitonKind kind = SolitonKind::Conformal;
  ConnectionKind connection = ConnectionKind::LeviCivita;
  std::optional<std::string> pi;
  double p = 0.0;
  double classify_tol = kDefaultClassifyTol;
  double residual_tol = kDefaultResidualTol;
};

template <class T>
using Named = std::vector<std::pair<std::string, T>>;

struct ManifoldConfig {
  std::string name;
  std::string source;  // the INI text as given
  Chart chart;
  MetricField metric;
  Named<VectorField> vectors;
  Named<OneFormField> forms;
  Named<VectorField> frame;
  std::optional<StructureTensorField> structure;
  SampleSpec sampling;
  SolitonSettings soliton;
  std::vector<std::pair<std::string, std::string>> example;

  std::size_t dim() const { return chart.dim(); }
  const VectorField* find_vector(const std::string& name) const;
  const OneFormField* find_form(const std::string& name) const;
  std::optional<FrameField> frame_field() const;
};

ManifoldConfig load_config(const std::string& path);
ManifoldConfig parse_config(const std::string& text, const std::string& name);

const std::vector<std::string>& zoo_names();
/// Throws ConfigError for an unknown name.
ManifoldConfig zoo_config(const std::string& name);
const std::string& zoo_source(const std::string& name);

}  // namespace curvcheck
