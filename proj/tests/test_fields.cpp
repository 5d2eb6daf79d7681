#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "walllaw/fields.hpp"
#include "walllaw/stokes.hpp"

using namespace wl;

namespace {

constexpr double kPi = 3.14159265358979323846;

MacGrid unit_grid(int n, double grading = 1.0) {
  DomainSpec s;
  s.lx = 1.0;
  return build_domain_grid(s, n, n, grading);
}

FlowState sampled(const MacGrid& g, double (*fu)(double, double),
                  double (*fv)(double, double)) {
  FlowState s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) s.u(i, j) = fu(g.xf[i], g.yc[j]);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s.v(i, j) = fv(g.xc[i], g.yf[j]);
  return s;
}

double vdot(const FlowState& a, const FlowState& b, const MacGrid& g) {
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      acc += a.u(i, j) * b.u(i, j) * g.u_col_width(i) * g.dy[j];
  for (int j = 0; j <= g.ny; ++j) {
    double w = (j > 0 ? 0.5 * g.dy[j - 1] : 0.0) + (j < g.ny ? 0.5 * g.dy[j] : 0.0);
    for (int i = 0; i < g.nx; ++i) acc += a.v(i, j) * b.v(i, j) * g.dx[i] * w;
  }
  return acc;
}

}  // namespace

TEST_CASE("divergence of a constant field vanishes") {
  MacGrid g = unit_grid(16);
  FlowState s(g);
  for (auto& v : s.u.raw()) v = 1.0;
  auto div = discrete_divergence(s, g);
  for (double d : div.raw()) CHECK(std::fabs(d) <= 1e-14);
}

TEST_CASE("divergence is exact for linear fields") {
  MacGrid g = unit_grid(16, 1.4);
  auto s = sampled(
      g, [](double x, double) { return x; }, [](double, double y) { return -y; });
  auto div = discrete_divergence(s, g);
  for (double d : div.raw()) CHECK(std::fabs(d) <= 1e-12);
}

TEST_CASE("divergence of u = (x^2, 0) equals 2x at centers") {
  MacGrid g = unit_grid(32);
  auto s = sampled(
      g, [](double x, double) { return x * x; }, [](double, double) { return 0.0; });
  auto div = discrete_divergence(s, g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      CHECK(std::fabs(div(i, j) - 2 * g.xc[i]) <= 1e-12);
}

TEST_CASE("gradient of a constant pressure vanishes") {
  MacGrid g = unit_grid(16);
  Array2<double> p(g.nx, g.ny, 3.25);
  auto [gu, gv] = discrete_gradient(p, g);
  for (double d : gu.raw()) CHECK(std::fabs(d) <= 1e-14);
  for (double d : gv.raw()) CHECK(std::fabs(d) <= 1e-14);
}

TEST_CASE("gradient of p = x is (1,0) on interior faces") {
  MacGrid g = unit_grid(16);
  Array2<double> p(g.nx, g.ny, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) p(i, j) = g.xc[i];
  auto [gu, gv] = discrete_gradient(p, g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) CHECK(gu(i, j) == doctest::Approx(1.0).epsilon(1e-12));
  for (double d : gv.raw()) CHECK(std::fabs(d) <= 1e-13);
}

TEST_CASE("summation-by-parts duality for compactly supported fields") {
  MacGrid g = unit_grid(24, 1.2);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  FlowState s(g);
  for (int j = 2; j < g.ny - 2; ++j)
    for (int i = 2; i < g.nx - 1; ++i) s.u(i, j) = U(rng);
  for (int j = 2; j < g.ny - 1; ++j)
    for (int i = 2; i < g.nx - 2; ++i) s.v(i, j) = U(rng);
  Array2<double> p(g.nx, g.ny, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) p(i, j) = U(rng);
  auto [gu, gv] = discrete_gradient(p, g);
  FlowState gp(g);
  gp.u = gu;
  gp.v = gv;
  auto div = discrete_divergence(s, g);
  double a = vdot(gp, s, g);
  double b = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) b += p(i, j) * div(i, j) * g.dx[i] * g.dy[j];
  CHECK(std::fabs(a + b) <= 1e-12 * (1 + std::fabs(a)));
}

TEST_CASE("viscous operator annihilates linear fields in the interior") {
  MacGrid g = unit_grid(16);
  auto s = sampled(
      g, [](double x, double y) { return 2 * x + 3 * y; },
      [](double x, double y) { return x - y; });
  ViscosityField visc = ViscosityField::uniform(g, 1.0);
  BoundaryCondition bc;
  auto [au, av] = viscous_operator(s, visc, bc, g);
  for (int j = 2; j < g.ny - 2; ++j)
    for (int i = 2; i < g.nx - 1; ++i) CHECK(std::fabs(au(i, j)) <= 1e-10);
  for (int j = 2; j < g.ny - 1; ++j)
    for (int i = 2; i < g.nx - 2; ++i) CHECK(std::fabs(av(i, j)) <= 1e-10);
}

TEST_CASE("viscous operator matches the analytic Laplacian at second order") {
  double prev = -1.0;
  for (int n : {16, 32, 64}) {
    MacGrid g = unit_grid(n);
    auto s = sampled(
        g, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); },
        [](double, double) { return 0.0; });
    ViscosityField visc = ViscosityField::uniform(g, 1.0);
    BoundaryCondition bc;
    auto [au, av] = viscous_operator(s, visc, bc, g);
    double err = 0.0;
    for (int j = 2; j < g.ny - 2; ++j)
      for (int i = 2; i < g.nx - 1; ++i) {
        double exact = 2 * kPi * kPi * std::sin(kPi * g.xf[i]) * std::sin(kPi * g.yc[j]);
        err = std::max(err, std::fabs(au(i, j) - exact));
      }
    if (prev > 0) CHECK(err < 0.35 * prev);  // ~ second order
    prev = err;
  }
}

TEST_CASE("viscous operator is symmetric in the volume inner product") {
  MacGrid g = unit_grid(12, 1.3);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  auto rand_interior = [&](FlowState& s) {
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx; ++i) s.u(i, j) = U(rng);
    for (int j = 1; j < g.ny; ++j)
      for (int i = 1; i < g.nx - 1; ++i) s.v(i, j) = U(rng);
  };
  FlowState a(g), b(g);
  rand_interior(a);
  rand_interior(b);
  ViscosityField visc = ViscosityField::uniform(g, 2.0);
  BoundaryCondition bc;
  auto [Aau, Aav] = viscous_operator(a, visc, bc, g);
  auto [Abu, Abv] = viscous_operator(b, visc, bc, g);
  FlowState Aa(g), Ab(g);
  Aa.u = Aau;
  Aa.v = Aav;
  Ab.u = Abu;
  Ab.v = Abv;
  double x = vdot(Aa, b, g), y = vdot(Ab, a, g);
  CHECK(std::fabs(x - y) <= 1e-12 * (1 + std::fabs(x)));
}

TEST_CASE("viscous operator rejects nonpositive viscosity") {
  MacGrid g = unit_grid(8);
  FlowState s(g);
  ViscosityField visc = ViscosityField::uniform(g, 1.0);
  visc.nu(3, 3) = 0.0;
  BoundaryCondition bc;
  CHECK_THROWS_AS(viscous_operator(s, visc, bc, g), ParamError);
}

TEST_CASE("advection vanishes for a = 0") {
  MacGrid g = unit_grid(16);
  FlowState a(g);
  auto s = sampled(
      g, [](double x, double y) { return x + y; }, [](double x, double) { return x; });
  auto [au, av] = advection_term(a, s, g);
  for (double d : au.raw()) CHECK(std::fabs(d) <= 1e-14);
  for (double d : av.raw()) CHECK(std::fabs(d) <= 1e-14);
}

TEST_CASE("advection of u = x by a = (1,0) is 1 in the interior") {
  MacGrid g = unit_grid(16);
  FlowState a(g);
  for (auto& v : a.u.raw()) v = 1.0;
  auto s = sampled(
      g, [](double x, double) { return x; }, [](double, double) { return 0.0; });
  auto [au, av] = advection_term(a, s, g);
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx; ++i) CHECK(au(i, j) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("advection is nearly skew for div-free fields vanishing on the boundary") {
  MacGrid g = unit_grid(64);
  // stream function psi = sin^2(pi x) sin^2(pi y): u = dpsi/dy, v = -dpsi/dx
  auto s = sampled(
      g,
      [](double x, double y) {
        double sx = std::sin(kPi * x);
        return 2 * kPi * sx * sx * std::sin(kPi * y) * std::cos(kPi * y);
      },
      [](double x, double y) {
        double sy = std::sin(kPi * y);
        return -2 * kPi * std::sin(kPi * x) * std::cos(kPi * x) * sy * sy;
      });
  auto [au, av] = advection_term(s, s, g);
  FlowState As(g);
  As.u = au;
  As.v = av;
  double pairing = vdot(As, s, g);
  double norm2 = vdot(s, s, g);
  CHECK(std::fabs(pairing) <= 5.0 / (64.0 * 64.0) * norm2);
}

TEST_CASE("dirichlet energy of u = (y, 0) is 1") {
  for (int n : {16, 32}) {
    MacGrid g = unit_grid(n);
    auto s = sampled(
        g, [](double, double y) { return y; }, [](double, double) { return 0.0; });
    ViscosityField visc = ViscosityField::uniform(g, 1.0);
    double e = dirichlet_energy(s, visc, g);
    CHECK(std::fabs(e - 1.0) <= 4.0 / (n * n));
  }
}

TEST_CASE("dirichlet energy is zero for the zero state and linear in nu") {
  MacGrid g = unit_grid(16);
  FlowState z(g);
  ViscosityField v1 = ViscosityField::uniform(g, 1.0);
  CHECK(dirichlet_energy(z, v1, g) == 0.0);
  auto s = sampled(
      g, [](double x, double y) { return std::sin(x + y); },
      [](double x, double y) { return std::cos(x - y); });
  ViscosityField v2 = ViscosityField::uniform(g, 2.0);
  CHECK(dirichlet_energy(s, v2, g) ==
        doctest::Approx(2.0 * dirichlet_energy(s, v1, g)).epsilon(1e-14));
}

TEST_CASE("boundary integral quadrature") {
  MacGrid g = unit_grid(16);
  std::vector<double> one(g.nx + 1, 1.0);
  CHECK(boundary_integral(one, g) == doctest::Approx(1.0).epsilon(1e-14));
  std::vector<double> c(g.nx + 1, 3.5);
  CHECK(boundary_integral(c, g) == doctest::Approx(3.5).epsilon(1e-14));
  std::vector<double> x(g.nx + 1);
  for (int i = 0; i <= g.nx; ++i) x[i] = g.xf[i];
  CHECK(std::fabs(boundary_integral(x, g) - 0.5) <= 2.0 / (16.0 * 16.0));
  CHECK_THROWS_AS(boundary_integral(x, g, 0.7, 0.2), ParamError);
}

TEST_CASE("operators are local") {
  MacGrid g = unit_grid(16);
  auto base = sampled(
      g, [](double x, double y) { return std::sin(3 * x) * y; },
      [](double x, double y) { return x * std::cos(2 * y); });
  auto pert = base;
  int pi = 8, pj = 8;
  pert.u(pi, pj) += 1.0;
  auto d0 = discrete_divergence(base, g), d1 = discrete_divergence(pert, g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (std::fabs(d0(i, j) - d1(i, j)) > 0)
        CHECK((std::abs(i - pi) <= 1 && std::abs(j - pj) <= 1));
  auto a0 = advection_term(base, base, g), a1 = advection_term(pert, pert, g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      if (std::fabs(a0.first(i, j) - a1.first(i, j)) > 0)
        CHECK((std::abs(i - pi) <= 2 && std::abs(j - pj) <= 2));
}

TEST_CASE("conformance errors") {
  MacGrid g = unit_grid(16);
  MacGrid g2 = unit_grid(8);
  FlowState s(g2);
  CHECK_THROWS_AS(discrete_divergence(s, g), ConformanceError);
  Array2<double> p(4, 4, 0.0);
  CHECK_THROWS_AS(discrete_gradient(p, g), ConformanceError);
}
