#include "walllaw/walllaw.hpp"

#include <cmath>
#include <limits>

namespace wl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

WallLawSpec WallLawSpec::constant(double c) {
  require(c >= 0, "wall law: constant density must be nonnegative");
  WallLawSpec s;
  s.kind = Kind::Constant;
  s.value = c;
  return s;
}

WallLawSpec WallLawSpec::over_h(double nu, std::function<double(double)> h) {
  require(nu > 0, "wall law: nu must be positive");
  WallLawSpec s;
  s.kind = Kind::OverH;
  s.nu = nu;
  s.h = std::move(h);
  return s;
}

WallLawSpec WallLawSpec::per_face(std::vector<double> densities) {
  for (double d : densities)
    require(d >= 0 || d == kInf, "wall law: densities must be nonnegative");
  WallLawSpec s;
  s.kind = Kind::PerFace;
  s.samples = std::move(densities);
  return s;
}

WallLawSpec WallLawSpec::infinite() {
  WallLawSpec s;
  s.kind = Kind::Infinite;
  return s;
}

WallLawSpec WallLawSpec::zero() {
  WallLawSpec s;
  s.kind = Kind::Zero;
  return s;
}

std::vector<double> WallLawSpec::betas(const MacGrid& g) const {
  std::vector<double> b(g.nx + 1, 0.0);
  for (int i = 0; i <= g.nx; ++i) {
    switch (kind) {
      case Kind::Constant:
        b[i] = value;
        break;
      case Kind::OverH: {
        double hv = h(g.xf[i]);
        require(hv > 0, "wall law over_h: h must be positive on Gamma2");
        b[i] = nu / hv;
        break;
      }
      case Kind::PerFace:
        require(static_cast<int>(samples.size()) > i, "wall law per_face: too few samples");
        b[i] = samples[i];
        break;
      case Kind::Infinite:
        b[i] = kInf;
        break;
      case Kind::Zero:
        b[i] = 0.0;
        break;
    }
  }
  return b;
}

std::pair<FlowState, SolveStats> solve_limit(const BodyForce& f, double nu,
                                             const WallLawSpec& spec, NsMode mode,
                                             const MacGrid& grid,
                                             const SolverConfig& cfg) {
  require(grid.edge_bottom == EdgeTag::Gamma2, "solve_limit needs an Omega grid");
  ViscosityField visc = ViscosityField::uniform(grid, nu);
  BoundaryCondition bc;
  bc.bottom = BottomKind::Slip;
  bc.slip_beta = spec.betas(grid);
  return mode == NsMode::Stokes ? solve_stokes(grid, visc, bc, f, cfg)
                                : solve_navier_stokes(grid, visc, bc, f, cfg);
}

double g0_energy(const FlowState& s, double nu, const WallLawSpec& spec,
                 const MacGrid& grid) {
  require_conforming(s, grid);
  ViscosityField unit = ViscosityField::uniform(grid, 1.0);
  double bulk = nu * dirichlet_energy(s, unit, grid);
  int n = grid.periodic_x ? grid.nx : grid.nx + 1;
  std::vector<double> trace(grid.nx + 1, 0.0);
  if (!s.gamma2_trace_u.empty()) {
    require(static_cast<int>(s.gamma2_trace_u.size()) >= n,
            "g0_energy: trace array too short");
    trace = s.gamma2_trace_u;
  }
  auto beta = spec.betas(grid);
  std::vector<double> integrand(grid.nx + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    if (beta[i] == kInf) {
      if (std::fabs(trace[i]) > 0)
        return std::numeric_limits<double>::infinity();
      continue;
    }
    integrand[i] = beta[i] * trace[i] * trace[i];
  }
  return bulk + boundary_integral(integrand, grid);
}

std::vector<double> tangential_traction(const FlowState& s, double nu,
                                        const MacGrid& grid) {
  require_conforming(s, grid);
  require(grid.ny >= 2, "traction: need at least two rows");
  int n = grid.nx + 1;
  std::vector<double> t(n, 0.0);
  double y0 = grid.yc[0] - grid.yf[0];
  double y1 = grid.yc[1] - grid.yf[0];
  int iu_end = grid.periodic_x ? grid.nx : grid.nx + 1;
  for (int i = 0; i < iu_end; ++i) {
    double w = s.gamma2_trace_u.empty() ? 0.0 : s.gamma2_trace_u[i];
    double u0 = s.u(i, 0), u1 = s.u(i, 1);
    // quadratic through (0,w), (y0,u0), (y1,u1): u'(0)
    double slope =
        ((u0 - w) * y1 * y1 - (u1 - w) * y0 * y0) / (y0 * y1 * (y1 - y0));
    t[i] = -nu * slope;
  }
  if (grid.periodic_x) t[grid.nx] = t[0];
  return t;
}

std::vector<double> wall_traction_consistent(const FlowState& s, double nu,
                                             const MacGrid& grid) {
  require_conforming(s, grid);
  int n = grid.nx + 1;
  std::vector<double> t(n, 0.0);
  int iu_end = grid.periodic_x ? grid.nx : grid.nx + 1;
  for (int i = 0; i < iu_end; ++i)
    t[i] = -2.0 * nu * s.u(i, 0) / grid.dy[0];
  if (grid.periodic_x) t[grid.nx] = t[0];
  return t;
}

}  // namespace wl
