#pragma once

/**
 * @file invariants.hpp
 * @brief Pointwise self-checks run by the `check` and `curvature` commands.
 */

#include <span>
#include <string>
#include <vector>

#include "curvcheck/config.hpp"

namespace curvcheck {

struct InvariantResult {
  std::string module;
  std::string name;
  double defect = 0.0;  // max over points and inputs
  double tol = 0.0;
  bool pass = true;
  std::size_t evaluations = 0;
  std::string note;
};

struct CurvatureSymmetryDefects {
  double antisym_last = 0.0;   // R_lkij + R_lkji
  double antisym_first = 0.0;  // R_lkij + R_klij
  double pair = 0.0;           // R_lkij - R_ijlk
  double bianchi = 0.0;        // R^l_kij + R^l_ijk + R^l_jki
  double ricci = 0.0;          // S_ij - S_ji
};

CurvatureSymmetryDefects curvature_symmetry_defects(const CurvatureAt& c);

/// |AD - central difference| / max(|FD|, 1e-2) for gradient (FD of values)
/// and Hessian (FD of AD gradients), step h.
struct JetFdDefect {
  double grad = 0.0;
  double hess = 0.0;
  double hess_asym = 0.0;
};
JetFdDefect jet_fd_defect(const Expr& e, std::span<const double> p, double h = 1e-5);

/// Closed-form d Gamma against central differences of Gamma, same normalisation as above with floor 1.
double dgamma_fd_defect(const MetricField& g, std::span<const double> p, double h = 1e-5);

/// Every expression, geometry, connection and soliton invariant for one manifold.
std::vector<InvariantResult> run_invariants(const ManifoldConfig& cfg, std::span<const std::vector<double>> points,
                                            double p_field);

/// Only the geometry (curvature symmetry and route) subset.
std::vector<InvariantResult> run_geometry_invariants(const ManifoldConfig& cfg,
                                                     std::span<const std::vector<double>> points);

}  // namespace curvcheck
