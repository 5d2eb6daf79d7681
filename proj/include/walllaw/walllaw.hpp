#pragma once

#include <functional>
#include <vector>

#include "walllaw/stokes.hpp"

namespace wl {

// Diagonal boundary measure density mu_11 on Gamma2 (one tangential
// direction in 2D). Infinite is an explicit tag (no-slip), Zero is free
// slip; the density is represented against arc length dx.
struct WallLawSpec {
  enum class Kind { Constant, OverH, PerFace, Infinite, Zero };
  Kind kind = Kind::Infinite;
  double value = 0.0;                    // Constant
  double nu = 1.0;                       // OverH: density nu/h(x)
  std::function<double(double)> h;       // OverH
  std::vector<double> samples;           // PerFace, one per u-column

  static WallLawSpec constant(double c);
  static WallLawSpec over_h(double nu, std::function<double(double)> h);
  static WallLawSpec per_face(std::vector<double> densities);
  static WallLawSpec infinite();
  static WallLawSpec zero();

  // Density sampled per u-column of the grid (+inf for the infinite tag).
  std::vector<double> betas(const MacGrid& g) const;
};

// Solve the limit problem on Omega: Navier-Stokes/Stokes with the diagonal
// Navier wall law on Gamma2 (traction + mu * u_t = 0, u.n = 0 hard) and
// homogeneous Dirichlet on Gamma1.
std::pair<FlowState, SolveStats> solve_limit(const BodyForce& f, double nu,
                                             const WallLawSpec& spec, NsMode mode,
                                             const MacGrid& grid,
                                             const SolverConfig& cfg);

// Limit energy nu*int |grad u|^2 + sum_i int mu_ii u_i^2 dGamma2, evaluated
// with the state's stored Gamma2 trace. Returns +infinity when the spec
// carries the infinite tag against a nonzero trace.
double g0_energy(const FlowState& s, double nu, const WallLawSpec& spec,
                 const MacGrid& grid);

// Tangential traction (Id - n@n) nu du/dn on Gamma2 per u-column, evaluated
// by a one-sided second-order fit against the stored trace (wall value).
// With n = (0,-1) this is -nu du1/dy at y = 0+.
std::vector<double> tangential_traction(const FlowState& s, double nu,
                                        const MacGrid& grid);

// First-order wall-flux traction of a no-slip solve (the discrete flux the
// assembled wall closure exerts); used by the linearized control functional.
std::vector<double> wall_traction_consistent(const FlowState& s, double nu,
                                             const MacGrid& grid);

}  // namespace wl
