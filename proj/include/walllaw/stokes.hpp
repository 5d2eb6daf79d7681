#pragma once

#include <functional>

#include "walllaw/fields.hpp"
#include "walllaw/grid.hpp"

namespace wl {

enum class NsMode { Stokes, NavierStokes };

struct SolverConfig {
  double linear_tol = 1e-10;  // relative momentum/divergence residual
  int max_cg_iters = 4000;    // pressure-Schur CG cap
  double picard_tol = 1e-11;  // relative velocity change between iterates
  int picard_max = 80;
  double picard_damping = 1.0;  // theta in (0,1], auto-halved on growth
  bool drop_layer_advection = false;
  double div_tol_abs = 1e-10;  // pointwise divergence target

  void validate() const;
};

struct SolveStats {
  int cg_iters = 0;
  int picard_iters = 0;
  double div_residual = 0.0;       // max |div u| at exit
  double momentum_residual = 0.0;  // relative
  double seconds = 0.0;
  bool converged = true;
};

struct BodyForce {
  std::function<double(double, double)> fx, fy;
  // Optional per-face contributions added to the sampled functions (used
  // for discrete sources such as the frozen convective term).
  Array2<double> extra_u, extra_v;
};

// Linear Stokes via pressure-Schur (Uzawa): CG on the pressure complement,
// inner velocity solves by a direct SPD factorization of the viscous block.
std::pair<FlowState, SolveStats> solve_stokes(const MacGrid& grid,
                                              const ViscosityField& visc,
                                              const BoundaryCondition& bc,
                                              const BodyForce& f,
                                              const SolverConfig& cfg);

// Steady Navier-Stokes by damped Picard iteration around solve_stokes with
// the convective term frozen at the previous iterate (skew-symmetrized).
std::pair<FlowState, SolveStats> solve_navier_stokes(const MacGrid& grid,
                                                     const ViscosityField& visc,
                                                     const BoundaryCondition& bc,
                                                     const BodyForce& f,
                                                     const SolverConfig& cfg);

// Quadratic form <A u, u> of the assembled viscous operator at the given
// state, split into the nu-weighted bulk part (gradient terms plus wall
// closures, with the slip wall segment evaluated against the condensed
// trace) and the slip boundary mass part (beta * trace^2).
struct ViscousEnergySplit {
  double bulk = 0.0;
  double slip = 0.0;
  double total() const { return bulk + slip; }
};
ViscousEnergySplit viscous_quadratic_form(const FlowState& s,
                                          const ViscosityField& visc,
                                          const BoundaryCondition& bc,
                                          const MacGrid& grid);

// 2 * <N_skew(a) a, u> with the solver's skew-symmetrized advection operator;
// identically zero when u = a and boundary values vanish.
double advection_energy_pairing(const FlowState& a, const FlowState& u,
                                const MacGrid& grid,
                                const BoundaryCondition& bc,
                                const ViscosityField& visc);

// Trace extraction factors for a slip bottom: trace_i = scale_i * u(i, 0).
std::vector<double> slip_trace_scales(const MacGrid& grid, const ViscosityField& visc,
                                      const std::vector<double>& beta);

}  // namespace wl
