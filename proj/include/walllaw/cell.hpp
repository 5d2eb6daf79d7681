#pragma once

#include <functional>

#include "walllaw/stokes.hpp"

namespace wl {

// Result of one local cell solve on Z_h. Mode 1 is the in-plane Stokes
// problem driven by the unit tangential force; mode 2 is the extruded
// transverse problem, which for h = h(y1) reduces to a scalar Poisson
// problem for the out-of-plane component.
struct CellResult {
  int mode = 1;
  MacGrid grid;
  FlowState flow;        // mode 1
  Array2<double> phi;    // mode 2, cell-centered
  double c = 0.0;        // c_m = int |grad w^m|^2
  std::vector<double> h_samples;  // profile fingerprint for mismatch checks
  SolveStats stats;
};

struct EffectiveMatrix {
  double k11 = 0.0, k22 = 0.0, k12 = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double cross = 0.0;  // int grad w^1 . grad w^2
  double nu = 1.0;
};

struct CellResolution {
  int nx = 64, ny = 64;
};

CellResult solve_cell_longitudinal(const std::function<double(double)>& h,
                                   const CellResolution& res, const SolverConfig& cfg);

CellResult solve_cell_transverse(const std::function<double(double)>& h,
                                 const CellResolution& res, const SolverConfig& cfg);

// K_mm = nu c_m; K_12 = nu * cross where cross pairs the shared (out-of-
// plane) component of the two cell solutions, identically zero in the
// extruded setting.
EffectiveMatrix effective_matrix(const CellResult& longitudinal,
                                 const CellResult& transverse, double nu);

// Closed-form flat-profile coefficient: c(H) = ((a+H)^3 - a^3)/3 with
// a = -(1 + H^2/2)/H; the 1D oracle for h = const = H (c(1) = 13/12).
double flat_profile_coefficient(double H);

}  // namespace wl
