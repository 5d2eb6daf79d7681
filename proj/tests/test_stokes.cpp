#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "walllaw/stokes.hpp"

using namespace wl;

namespace {

constexpr double kPi = 3.14159265358979323846;

MacGrid channel_grid(int nx, int ny) {
  DomainSpec s;
  s.lx = 1.0;
  s.periodic_x = true;
  return build_domain_grid(s, nx, ny, 1.0);
}

MacGrid box_grid(int n) {
  DomainSpec s;
  s.lx = 1.0;
  return build_domain_grid(s, n, n, 1.0);
}

// Manufactured Stokes: u = sin(pi x) sin(pi y), v = cos(pi x) cos(pi y),
// p = cos(pi x) sin(pi y); f = -nu lap(u) + grad p.
struct Manufactured {
  double nu = 1.0;
  double ue(double x, double y) const { return std::sin(kPi * x) * std::sin(kPi * y); }
  double ve(double x, double y) const { return std::cos(kPi * x) * std::cos(kPi * y); }
  double pe(double x, double y) const { return std::cos(kPi * x) * std::sin(kPi * y); }
  BodyForce force() const {
    double nu_ = nu;
    BodyForce f;
    f.fx = [nu_](double x, double y) {
      return 2 * kPi * kPi * nu_ * std::sin(kPi * x) * std::sin(kPi * y) -
             kPi * std::sin(kPi * x) * std::sin(kPi * y);
    };
    f.fy = [nu_](double x, double y) {
      return 2 * kPi * kPi * nu_ * std::cos(kPi * x) * std::cos(kPi * y) +
             kPi * std::cos(kPi * x) * std::cos(kPi * y);
    };
    return f;
  }
  BoundaryCondition bc() const {
    BoundaryCondition b;
    b.u_value = [this](double x, double y) { return ue(x, y); };
    b.v_value = [this](double x, double y) { return ve(x, y); };
    return b;
  }
  double solve_l2_error(int n, const SolverConfig& cfg, int* cg = nullptr) const {
    MacGrid g = box_grid(n);
    ViscosityField visc = ViscosityField::uniform(g, nu);
    auto [s, stats] = solve_stokes(g, visc, bc(), force(), cfg);
    if (cg) *cg = stats.cg_iters;
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) {
        double d = s.u(i, j) - ue(g.xf[i], g.yc[j]);
        acc += d * d * g.u_col_width(i) * g.dy[j];
      }
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double d = s.v(i, j) - ve(g.xc[i], g.yf[j]);
        acc += d * d * g.dx[i] * 0.5 * (g.dy[j - 1] + g.dy[j]);
      }
    return std::sqrt(acc);
  }
};

}  // namespace

TEST_CASE("zero forcing with no-slip walls gives the zero state") {
  MacGrid g = box_grid(16);
  ViscosityField visc = ViscosityField::uniform(g, 1.0);
  BoundaryCondition bc;
  bc.bottom = BottomKind::Dirichlet;
  BodyForce f;
  SolverConfig cfg;
  auto [s, stats] = solve_stokes(g, visc, bc, f, cfg);
  CHECK(max_abs_velocity(s, g) <= 1e-14);
  for (double p : s.p.raw()) CHECK(std::fabs(p) <= 1e-12);
  CHECK(stats.converged);
}

TEST_CASE("plane Poiseuille channel") {
  MacGrid g = channel_grid(12, 48);
  double nu = 1.0;
  ViscosityField visc = ViscosityField::uniform(g, nu);
  BoundaryCondition bc;  // no-slip top and bottom via Gamma0 Dirichlet closure
  bc.bottom = BottomKind::Dirichlet;
  BodyForce f;
  f.fx = [nu](double, double) { return 2 * nu; };
  SolverConfig cfg;
  auto [s, stats] = solve_stokes(g, visc, bc, f, cfg);
  double err = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double exact = g.yc[j] * (1 - g.yc[j]);
    for (int i = 0; i < g.nx; ++i) err = std::max(err, std::fabs(s.u(i, j) - exact));
  }
  CHECK(err <= 4.0 / (48.0 * 48.0));
  CHECK(max_abs_divergence(s, g) <= 1e-8 * (1 + max_abs_velocity(s, g)));
}

TEST_CASE("slip Poiseuille matches the two-point BVP oracle") {
  // -u'' = 2 on (0,1), u(1) = 0, u'(0) = u(0)/h with h = 1:
  // u = -y^2 + y/2 + 1/2, trace u(0) = 1/2.
  MacGrid g = channel_grid(12, 64);
  ViscosityField visc = ViscosityField::uniform(g, 1.0);
  BoundaryCondition bc;
  bc.bottom = BottomKind::Slip;
  bc.slip_beta.assign(g.nx + 1, 1.0);
  BodyForce f;
  f.fx = [](double, double) { return 2.0; };
  SolverConfig cfg;
  auto [s, stats] = solve_stokes(g, visc, bc, f, cfg);
  REQUIRE(!s.gamma2_trace_u.empty());
  for (int i = 0; i < g.nx; ++i)
    CHECK(s.gamma2_trace_u[i] == doctest::Approx(0.5).epsilon(1e-6));
  double err = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double y = g.yc[j], exact = -y * y + 0.5 * y + 0.5;
    for (int i = 0; i < g.nx; ++i) err = std::max(err, std::fabs(s.u(i, j) - exact));
  }
  CHECK(err <= 1e-4);
}

TEST_CASE("navier-stokes: zero forcing converges immediately") {
  MacGrid g = box_grid(12);
  ViscosityField visc = ViscosityField::uniform(g, 1.0);
  BoundaryCondition bc;
  bc.bottom = BottomKind::Dirichlet;
  BodyForce f;
  SolverConfig cfg;
  auto [s, stats] = solve_navier_stokes(g, visc, bc, f, cfg);
  CHECK(max_abs_velocity(s, g) <= 1e-14);
  CHECK(stats.picard_iters == 1);
}

TEST_CASE("navier-stokes: tiny forcing stays within 1e-8 of Stokes") {
  MacGrid g = box_grid(16);
  ViscosityField visc = ViscosityField::uniform(g, 1.0);
  BoundaryCondition bc;
  bc.bottom = BottomKind::Dirichlet;
  BodyForce f;
  f.fx = [](double x, double y) { return 1e-6 * std::sin(3 * x + y); };
  SolverConfig cfg;
  auto [s1, st1] = solve_stokes(g, visc, bc, f, cfg);
  auto [s2, st2] = solve_navier_stokes(g, visc, bc, f, cfg);
  double diff = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      diff = std::max(diff, std::fabs(s1.u(i, j) - s2.u(i, j)));
  CHECK(diff <= 1e-8);
}

TEST_CASE("navier-stokes equals Stokes for unidirectional Poiseuille data") {
  MacGrid g = channel_grid(12, 32);
  ViscosityField visc = ViscosityField::uniform(g, 1.0);
  BoundaryCondition bc;
  bc.bottom = BottomKind::Dirichlet;
  BodyForce f;
  f.fx = [](double, double) { return 2.0; };
  SolverConfig cfg;
  auto [s1, st1] = solve_stokes(g, visc, bc, f, cfg);
  auto [s2, st2] = solve_navier_stokes(g, visc, bc, f, cfg);
  double diff = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      diff = std::max(diff, std::fabs(s1.u(i, j) - s2.u(i, j)));
  CHECK(diff <= 1e-9);
}

TEST_CASE("manufactured solution converges at order >= 1.8") {
  Manufactured m;
  SolverConfig cfg;
  double e16 = m.solve_l2_error(16, cfg);
  double e32 = m.solve_l2_error(32, cfg);
  double order = std::log2(e16 / e32);
  CHECK(order >= 1.8);
}

TEST_CASE("energy balance: quadratic form equals the body-force work") {
  MacGrid g = box_grid(24);
  ViscosityField visc = ViscosityField::uniform(g, 1.0);
  BoundaryCondition bc;
  bc.bottom = BottomKind::Dirichlet;
  BodyForce f;
  f.fx = [](double x, double y) { return std::sin(2 * x) + y; };
  f.fy = [](double x, double) { return std::cos(x); };
  SolverConfig cfg;
  auto [s, stats] = solve_stokes(g, visc, bc, f, cfg);
  double quad = viscous_quadratic_form(s, visc, bc, g).total();
  double work = body_force_work(s, g, f.fx, f.fy);
  CHECK(std::fabs(quad - work) <= 1e-9 * (1 + std::fabs(work)));
  // the field quadrature agrees to discretization order
  double energy = dirichlet_energy(s, visc, g);
  CHECK(std::fabs(energy - work) <= 0.05 * std::fabs(work));
}

TEST_CASE("solves are deterministic") {
  MacGrid g = box_grid(16);
  ViscosityField visc = ViscosityField::uniform(g, 1.0);
  BoundaryCondition bc;
  bc.bottom = BottomKind::Dirichlet;
  BodyForce f;
  f.fx = [](double x, double y) { return std::sin(5 * x * y); };
  SolverConfig cfg;
  auto [s1, st1] = solve_stokes(g, visc, bc, f, cfg);
  auto [s2, st2] = solve_stokes(g, visc, bc, f, cfg);
  CHECK(s1.u.raw() == s2.u.raw());
  CHECK(s1.v.raw() == s2.v.raw());
  CHECK(s1.p.raw() == s2.p.raw());
}

TEST_CASE("iteration cap raises a convergence error") {
  MacGrid g = box_grid(16);
  ViscosityField visc = ViscosityField::uniform(g, 1.0);
  BoundaryCondition bc;
  bc.bottom = BottomKind::Dirichlet;
  BodyForce f;
  f.fx = [](double x, double y) { return std::sin(3 * x) * y; };
  SolverConfig cfg;
  cfg.max_cg_iters = 1;
  CHECK_THROWS_AS(solve_stokes(g, visc, bc, f, cfg), ConvergenceError);
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  cfg.linear_tol = 2.0;
  CHECK_THROWS_AS(cfg.validate(), ParamError);
  SolverConfig cfg2;
  cfg2.picard_damping = 0.0;
  CHECK_THROWS_AS(cfg2.validate(), ParamError);
}
