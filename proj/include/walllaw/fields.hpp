#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "walllaw/common.hpp"
#include "walllaw/grid.hpp"

namespace wl {

// Staggered velocity + cell-centered zero-mean pressure.
// u: (nx+1) x ny on vertical faces, v: nx x (ny+1) on horizontal faces,
// p: nx x ny. Dirichlet faces carry their imposed values. For wall-law
// solves on Omega grids, gamma2_trace_u holds the tangential trace sample
// at y = 0 per u-column (the statically condensed wall value).
struct FlowState {
  Array2<double> u, v, p;
  std::vector<double> gamma2_trace_u;

  FlowState() = default;
  explicit FlowState(const MacGrid& g)
      : u(g.nx + 1, g.ny, 0.0), v(g.nx, g.ny + 1, 0.0), p(g.nx, g.ny, 0.0) {}
};

void require_conforming(const FlowState& s, const MacGrid& g);

struct ViscosityField {
  Array2<double> nu;  // per cell, strictly positive on fluid cells

  static ViscosityField uniform(const MacGrid& g, double value);
  // nu on Omega cells, nu*eps on layer cells (solid cells get nu).
  static ViscosityField composite(const MacGrid& g, double nu_omega, double nu_layer);
  // Average viscosity of the fluid cells adjacent to u-column i at row j.
  double at_u_face(const MacGrid& g, int i, int j) const;
};

// How the bottom edge (Gamma2) is treated by solvers on Omega grids.
enum class BottomKind { Dirichlet, Slip };

// Boundary data for a solve. Structural tags (periodic/traction-free edges)
// live in the grid; this carries the numbers: Dirichlet value functions and
// the Navier-slip densities along Gamma2. A slip density of +infinity is the
// no-slip tag, 0 is free slip.
struct BoundaryCondition {
  std::function<double(double, double)> u_value;  // null = homogeneous
  std::function<double(double, double)> v_value;
  BottomKind bottom = BottomKind::Dirichlet;
  std::vector<double> slip_beta;  // per u-column (nx+1 entries), when Slip

  double ubc(double x, double y) const { return u_value ? u_value(x, y) : 0.0; }
  double vbc(double x, double y) const { return v_value ? v_value(x, y) : 0.0; }
};

// Conservative face-difference divergence; zero on solid cells.
Array2<double> discrete_divergence(const FlowState& s, const MacGrid& g);

// Pressure gradient on faces, adjoint (up to sign and volume weights) of the
// divergence; zero on boundary and solid faces.
std::pair<Array2<double>, Array2<double>> discrete_gradient(const Array2<double>& p,
                                                            const MacGrid& g);

// Pointwise -div(nu grad u) at interior faces (componentwise), including
// slip/Dirichlet boundary closures; the action of the assembled operator.
std::pair<Array2<double>, Array2<double>> viscous_operator(const FlowState& s,
                                                           const ViscosityField& visc,
                                                           const BoundaryCondition& bc,
                                                           const MacGrid& g);

// Centered second-order (a.grad)u interpolated to faces.
std::pair<Array2<double>, Array2<double>> advection_term(const FlowState& a,
                                                         const FlowState& u,
                                                         const MacGrid& g);

// Midpoint quadrature of integral nu |grad u|^2 over the fluid region.
// Wall strips extrapolate the nearest interior gradient, so the value is a
// pure function of the stored field.
double dirichlet_energy(const FlowState& s, const ViscosityField& visc,
                        const MacGrid& g);

// Quadrature over Gamma2 (y=0) of per-u-column samples g_i, optionally
// restricted to the window [x0, x1]; exact for per-face-constant data.
double boundary_integral(const std::vector<double>& g_values, const MacGrid& g,
                         double x0 = -1e300, double x1 = 1e300);

// Arc length of Gamma2 covered by the grid.
double gamma2_length(const MacGrid& g);

// Diagnostics.
double max_abs_divergence(const FlowState& s, const MacGrid& g);
double max_abs_velocity(const FlowState& s, const MacGrid& g);
double velocity_l2(const FlowState& s, const MacGrid& g, bool omega_only = false);
double velocity_l2_sq(const FlowState& s, const MacGrid& g, bool omega_only = false);
double pressure_l2_zero_mean(const FlowState& s, const MacGrid& g,
                             bool omega_only = false);
void project_pressure_zero_mean(FlowState& s, const MacGrid& g);
double body_force_work(const FlowState& s, const MacGrid& g,
                       const std::function<double(double, double)>& fx,
                       const std::function<double(double, double)>& fy);

// Copy the Omega part (y > 0) of a composite thin-layer state onto the
// matching Omega grid (rows must coincide).
FlowState restrict_to_omega(const FlowState& s, const MacGrid& composite,
                            const MacGrid& omega);

}  // namespace wl
