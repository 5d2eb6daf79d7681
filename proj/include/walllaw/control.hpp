#pragma once

#include "walllaw/walllaw.hpp"

namespace wl {

// State of the boundary-coefficient control problem: per-Gamma2-face
// coefficient h (one tangential direction in 2D) with mass int h = m.
struct ControlState {
  double m = 0.0;
  std::vector<double> h;  // per u-column density on Gamma2
  FlowState state;
  SolveStats stats;
  std::vector<double> f_history;  // energy F per accepted iterate
  double f_value = 0.0;
  double update_residual = 0.0;  // L1 distance between h and its update map
  double mass_residual = 0.0;    // |int h - m|
  bool inactive = false;         // u vanished on Gamma2; uniform fallback
  bool converged = false;
  int iterations = 0;
};

struct ControlConfig {
  double theta = 1.0;   // damping in (0,1]
  double tol = 1e-10;   // relative L1 change of h
  int max_iters = 60;
  NsMode ns_mode = NsMode::Stokes;
  double band_delta = 0.05;  // relative tolerance band around +-M_i
};

// Damped fixed-point iteration on h_i = m |u_i| / int |u_i| with the flow
// solved through the wall law with densities 1/h_i (h = 0 faces get the
// no-slip tag). Mass is renormalized exactly after every update.
ControlState solve_control_fixed_point(double m, const BodyForce& f, double nu,
                                       double theta, double tol, int max_iters,
                                       const MacGrid& grid, const SolverConfig& cfg,
                                       NsMode mode = NsMode::Stokes);

// Global energy F(h,u) in the work normalization, so that a converged pair
// satisfies F(h, u^h) = -int f . u^h (the work identity):
//   F = nu int |grad u|^2 + sum_i int u_i^2/h_i + 2 int (u.grad)u.u - 2 int f.u
// Returns +infinity when some h_i = 0 meets a nonzero trace.
double energy_F(const std::vector<double>& h, const FlowState& state,
                const BodyForce& f, double nu, const MacGrid& grid);

struct ConcentrationRow {
  double m = 0.0;
  double f_value = 0.0;
  double work_identity_residual = 0.0;  // |F + int f.u| / (1 + |int f.u|)
  double mass_residual = 0.0;
  double band_fraction = 0.0;    // mass fraction of h/m inside K1+ u K1-
  double int_abs_u_over_m = 0.0; // int |u_1^m|/m dGamma2
  double j_m = 0.0;              // J_m(v^m)
  double tv_v = 0.0;             // int |v_1^m| dGamma2
  std::vector<double> moments;   // of h/m against 1, x, x^2
  bool failed = false;
  std::string failure;
};

struct ConcentrationReport {
  double m1 = 0.0;                 // max traction magnitude of the no-slip flow
  std::vector<int> band_faces;     // u-columns inside the K1+- bands
  double band_measure = 0.0;       // arc length of the band
  std::vector<double> traction0;   // no-slip traction per face
  std::vector<ConcentrationRow> rows;
  bool degenerate = false;         // M1 = 0 (no shear)
  bool all_ok = true;
};

// m -> 0 sweep: solves the all-no-slip limit once for M_i and the K_i+-
// bands, then runs the fixed point per m and records concentration metrics.
ConcentrationReport m_sweep(const std::vector<double>& m_list, const BodyForce& f,
                            double nu, const MacGrid& grid, const SolverConfig& cfg,
                            const ControlConfig& ctrl);

// Linearized perturbation (the Stokes problem with all-no-slip walls and
// the convective source), v^m = (u^m - u^{0,m})/m, and the functional
// J_m = (m nu/2)||grad v||^2 + (1/2) sum (int |v_i|)^2 + int t0 . v.
struct PerturbationResult {
  FlowState v;          // the scaled difference field
  double j_m = 0.0;
  double tv = 0.0;      // int |v_1| dGamma2
  SolveStats stats;
};

PerturbationResult linearized_perturbation(double m, const ControlState& um,
                                           const BodyForce& f, double nu,
                                           const MacGrid& grid,
                                           const SolverConfig& cfg,
                                           NsMode mode = NsMode::Stokes);

}  // namespace wl
