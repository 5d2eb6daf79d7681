#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "walllaw/walllaw.hpp"

using namespace wl;

namespace {

MacGrid channel(int nx, int ny) {
  DomainSpec s;
  s.lx = 1.0;
  s.periodic_x = true;
  return build_domain_grid(s, nx, ny, 1.0);
}

BodyForce fx_const(double c) {
  BodyForce f;
  f.fx = [c](double, double) { return c; };
  return f;
}

double max_udiff(const FlowState& a, const FlowState& b, const MacGrid& g) {
  double m = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) m = std::max(m, std::fabs(a.u(i, j) - b.u(i, j)));
  return m;
}

}  // namespace

TEST_CASE("infinite tag equals the all-no-slip solve") {
  MacGrid g = channel(12, 32);
  SolverConfig cfg;
  auto [s1, st1] = solve_limit(fx_const(2.0), 1.0, WallLawSpec::infinite(),
                               NsMode::Stokes, g, cfg);
  ViscosityField visc = ViscosityField::uniform(g, 1.0);
  BoundaryCondition bc;
  bc.bottom = BottomKind::Dirichlet;
  auto [s2, st2] = solve_stokes(g, visc, bc, fx_const(2.0), cfg);
  CHECK(max_udiff(s1, s2, g) <= 1e-11);
  for (int i = 0; i <= g.nx; ++i) CHECK(s1.gamma2_trace_u[i] == 0.0);
}

TEST_CASE("over_h slip Poiseuille trace and profile") {
  MacGrid g = channel(12, 128);
  SolverConfig cfg;
  auto spec = WallLawSpec::over_h(1.0, [](double) { return 1.0; });
  auto [s, st] = solve_limit(fx_const(2.0), 1.0, spec, NsMode::Stokes, g, cfg);
  for (int i = 0; i < g.nx; ++i)
    CHECK(std::fabs(s.gamma2_trace_u[i] - 0.5) <= 1e-5);
  double err = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double y = g.yc[j], exact = -y * y + 0.5 * y + 0.5;
    for (int i = 0; i < g.nx; ++i) err = std::max(err, std::fabs(s.u(i, j) - exact));
  }
  CHECK(err <= 5.0 / (128.0 * 128.0));
}

TEST_CASE("free slip has vanishing wall shear") {
  MacGrid g = channel(12, 64);
  SolverConfig cfg;
  auto [s, st] = solve_limit(fx_const(2.0), 1.0, WallLawSpec::zero(),
                             NsMode::Stokes, g, cfg);
  auto t = tangential_traction(s, 1.0, g);
  for (int i = 0; i < g.nx; ++i) CHECK(std::fabs(t[i]) <= 1e-2);
  // exact solution -y^2 + 2y has du/dy(0) = 2 under no slip; free slip kills it
  CHECK(std::fabs(s.u(3, 0) - s.gamma2_trace_u[3]) <= 1e-6);
}

TEST_CASE("g0 energy") {
  MacGrid g = channel(12, 64);
  SolverConfig cfg;
  FlowState zero(g);
  zero.gamma2_trace_u.assign(g.nx + 1, 0.0);
  CHECK(g0_energy(zero, 1.0, WallLawSpec::constant(2.0), g) == 0.0);

  auto [s, st] = solve_limit(fx_const(2.0), 1.0, WallLawSpec::zero(),
                             NsMode::Stokes, g, cfg);
  ViscosityField unit = ViscosityField::uniform(g, 1.0);
  CHECK(g0_energy(s, 1.0, WallLawSpec::zero(), g) ==
        doctest::Approx(dirichlet_energy(s, unit, g)).epsilon(1e-15));

  // constant(c) with a known trace: bulk + c * int g^2 by independent quadrature
  double c = 3.0;
  auto spec = WallLawSpec::constant(c);
  auto [s2, st2] = solve_limit(fx_const(2.0), 1.0, spec, NsMode::Stokes, g, cfg);
  double trace_sq = 0.0;
  for (int i = 0; i < g.nx; ++i)
    trace_sq += s2.gamma2_trace_u[i] * s2.gamma2_trace_u[i] * g.u_col_width(i);
  double expected = dirichlet_energy(s2, unit, g) + c * trace_sq;
  CHECK(g0_energy(s2, 1.0, spec, g) == doctest::Approx(expected).epsilon(1e-10));

  // infinite tag with a nonzero trace is the distinguished infinite value
  FlowState fake(g);
  fake.gamma2_trace_u.assign(g.nx + 1, 0.1);
  CHECK(std::isinf(g0_energy(fake, 1.0, WallLawSpec::infinite(), g)));
}

TEST_CASE("tangential traction closed forms") {
  MacGrid g = channel(12, 96);
  SolverConfig cfg;
  // no-slip Poiseuille u = y(1-y), nu = 1: traction = -nu u'(0) = -1
  auto [s0, st0] = solve_limit(fx_const(2.0), 1.0, WallLawSpec::infinite(),
                               NsMode::Stokes, g, cfg);
  auto t0 = tangential_traction(s0, 1.0, g);
  for (int i = 0; i < g.nx; ++i) CHECK(t0[i] == doctest::Approx(-1.0).epsilon(1e-4));

  // slip Poiseuille: u'(0) = 1/2, traction = -1/2
  auto spec = WallLawSpec::over_h(1.0, [](double) { return 1.0; });
  auto [s1, st1] = solve_limit(fx_const(2.0), 1.0, spec, NsMode::Stokes, g, cfg);
  auto t1 = tangential_traction(s1, 1.0, g);
  for (int i = 0; i < g.nx; ++i) CHECK(t1[i] == doctest::Approx(-0.5).epsilon(1e-4));
}

TEST_CASE("wall-law residual: traction + mu u = 0 discretely") {
  MacGrid g = channel(12, 64);
  SolverConfig cfg;
  auto spec = WallLawSpec::constant(2.5);
  auto [s, st] = solve_limit(fx_const(2.0), 1.0, spec, NsMode::Stokes, g, cfg);
  auto t = tangential_traction(s, 1.0, g);
  for (int i = 0; i < g.nx; ++i) {
    double residual = t[i] + 2.5 * s.gamma2_trace_u[i];
    CHECK(std::fabs(residual) <= 2.0 / 64.0);  // O(spacing) envelope
  }
}

TEST_CASE("limit consistency: large constants approach the no-slip solve") {
  MacGrid g = channel(12, 48);
  SolverConfig cfg;
  auto [ns, st0] = solve_limit(fx_const(2.0), 1.0, WallLawSpec::infinite(),
                               NsMode::Stokes, g, cfg);
  double prev = 1e300;
  for (double mu : {1e2, 1e4, 1e6}) {
    auto [s, st] = solve_limit(fx_const(2.0), 1.0, WallLawSpec::constant(mu),
                               NsMode::Stokes, g, cfg);
    FlowState diff(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i) diff.u(i, j) = s.u(i, j) - ns.u(i, j);
    double err = velocity_l2(diff, g);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev <= 1e-6);
}

TEST_CASE("normal velocity vanishes exactly on Gamma2") {
  MacGrid g = channel(12, 48);
  SolverConfig cfg;
  auto spec = WallLawSpec::constant(1.0);
  BodyForce f;
  f.fx = [](double x, double) { return 1.0 + std::sin(6.28 * x); };
  f.fy = [](double x, double) { return std::cos(6.28 * x); };
  auto [s, st] = solve_limit(f, 1.0, spec, NsMode::Stokes, g, cfg);
  for (int i = 0; i < g.nx; ++i) CHECK(s.v(i, 0) == 0.0);
}

TEST_CASE("dissipativity: the slip term removes energy") {
  // with the chosen sign convention the converged solve satisfies
  // nu |grad u|^2 + int mu u^2 = work, hence work >= bulk part alone
  MacGrid g = channel(12, 48);
  SolverConfig cfg;
  auto spec = WallLawSpec::constant(1.0);
  auto [s, st] = solve_limit(fx_const(2.0), 1.0, spec, NsMode::Stokes, g, cfg);
  ViscosityField visc = ViscosityField::uniform(g, 1.0);
  BoundaryCondition bc;
  bc.bottom = BottomKind::Slip;
  bc.slip_beta.assign(g.nx + 1, 1.0);
  auto split = viscous_quadratic_form(s, visc, bc, g);
  double work = body_force_work(s, g, [](double, double) { return 2.0; }, {});
  CHECK(split.slip > 0.0);
  CHECK(std::fabs(split.total() - work) <= 1e-9 * (1 + std::fabs(work)));
}
