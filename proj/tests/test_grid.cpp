#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "walllaw/grid.hpp"

using namespace wl;

namespace {

DomainSpec unit_domain(double lx = 1.0) {
  DomainSpec s;
  s.lx = lx;
  return s;
}

// independent midpoint quadrature of int h_eps over (0, lx)
double integrate_profile(const LayerProfile& prof, double lx, int n = 200000) {
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += prof.h_eps((k + 0.5) * lx / n);
  return acc * lx / n;
}

}  // namespace

TEST_CASE("uniform grid") {
  MacGrid g = build_domain_grid(unit_domain(), 16, 16, 1.0);
  CHECK(g.nx == 16);
  CHECK(g.ny == 16);
  for (int i = 0; i < 16; ++i) CHECK(g.dx[i] == doctest::Approx(1.0 / 16).epsilon(1e-14));
  for (int j = 0; j < 16; ++j) CHECK(g.dy[j] == doctest::Approx(1.0 / 16).epsilon(1e-14));
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i) CHECK(g.mask(i, j) == CellKind::FluidOmega);
}

TEST_CASE("graded grid sums exactly and refines toward Gamma2") {
  MacGrid g = build_domain_grid(unit_domain(), 16, 16, 2.0);
  double sum = 0.0;
  for (double d : g.dy) sum += d;
  CHECK(std::fabs(sum - 1.0) <= 1e-12);
  CHECK(g.yf.back() == 1.0);
  CHECK(g.yf.front() == 0.0);
  for (int j = 0; j + 1 < 16; ++j) CHECK(g.dy[j] < g.dy[j + 1]);
  CHECK(g.dy[1] / g.dy[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("aspect scaling") {
  MacGrid g = build_domain_grid(unit_domain(2.0), 32, 16, 1.0);
  CHECK(g.dx[0] == doctest::Approx(1.0 / 16).epsilon(1e-14));
  CHECK(g.dy[0] == doctest::Approx(1.0 / 16).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(build_domain_grid(unit_domain(), 4, 16, 1.0), ParamError);
  CHECK_THROWS_AS(build_domain_grid(unit_domain(), 16, 16, 0.5), ParamError);
  CHECK_THROWS_AS(build_domain_grid(unit_domain(), 16, 16, 11.0), ParamError);
  CHECK_THROWS_AS(build_domain_grid(unit_domain(-1.0), 16, 16, 1.0), ParamError);
}

TEST_CASE("flat aligned layer rasterizes exactly") {
  DomainSpec s = unit_domain();
  s.has_layer = true;
  s.layer.kind = LayerKind::Fixed;
  s.layer.h = [](double) { return 1.0; };
  s.layer.eps = 0.1;
  MacGrid base = build_domain_grid(s, 16, 16, 1.0, 10);
  MacGrid g = rasterize_layer(s.layer, base);
  CHECK(g.jzero == 10);
  double area = fluid_area(g, CellKind::FluidLayer);
  CHECK(area == doctest::Approx(0.1).epsilon(1e-12));
  for (int j = 0; j < g.jzero; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(g.mask(i, j) == CellKind::FluidLayer);
  CHECK(fluid_edge_connected(g));
}

TEST_CASE("zero layer profile is degenerate") {
  DomainSpec s = unit_domain();
  s.has_layer = true;
  s.layer.h = [](double) { return 0.0; };
  s.layer.eps = 0.1;
  CHECK_THROWS_AS(build_domain_grid(s, 16, 16, 1.0, 10), DegenerateLayerError);
}

TEST_CASE("cosine bump layer area matches the quadrature oracle") {
  DomainSpec s = unit_domain();
  s.has_layer = true;
  s.layer.kind = LayerKind::Fixed;
  s.layer.h = [](double x) {
    return 0.5 + 0.5 * std::cos(2 * 3.14159265358979323846 * (x - 0.5));
  };
  s.layer.eps = 0.1;
  int nx = 64;
  MacGrid base = build_domain_grid(s, nx, 32, 1.0, 16);
  MacGrid g = rasterize_layer(s.layer, base);
  double cell_area = g.dx[0] * g.dy[0];
  double count = fluid_area(g, CellKind::FluidLayer) / cell_area;
  double expected = s.layer.eps * integrate_profile(s.layer, 1.0) / cell_area;
  CHECK(std::fabs(count - expected) <= nx);
  CHECK(fluid_edge_connected(g));
}

TEST_CASE("rasterized area converges under refinement") {
  DomainSpec s = unit_domain();
  s.has_layer = true;
  s.layer.kind = LayerKind::Fixed;
  s.layer.h = [](double x) { return 0.6 + 0.3 * std::sin(6.0 * x); };
  s.layer.eps = 0.1;
  double exact = s.layer.eps * integrate_profile(s.layer, 1.0);
  double prev_err = -1.0;
  for (int n : {16, 32, 64}) {
    MacGrid base = build_domain_grid(s, n, 16, 1.0, std::max(10, n / 2));
    MacGrid g = rasterize_layer(s.layer, base);
    double err = std::fabs(fluid_area(g, CellKind::FluidLayer) - exact);
    if (prev_err >= 0) CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("rasterization is deterministic") {
  DomainSpec s = unit_domain();
  s.has_layer = true;
  s.layer.h = [](double x) { return 0.4 + 0.2 * std::cos(3 * x); };
  s.layer.eps = 0.05;
  MacGrid a = rasterize_layer(s.layer, build_domain_grid(s, 32, 32, 1.1, 12));
  MacGrid b = rasterize_layer(s.layer, build_domain_grid(s, 32, 32, 1.1, 12));
  CHECK(a.mask.raw() == b.mask.raw());
  CHECK(a.yf == b.yf);
}

TEST_CASE("flat cell domain is the full rectangle") {
  MacGrid g = build_cell_domain([](double) { return 1.0; }, 16, 16);
  CHECK(g.periodic_x);
  CHECK(g.y_lo() == doctest::Approx(-1.0));
  CHECK(g.y_hi() == 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(g.mask(i, j) != CellKind::Solid);
}

TEST_CASE("zero cell profile is degenerate") {
  CHECK_THROWS_AS(build_cell_domain([](double) { return 0.0; }, 16, 16),
                  DegenerateLayerError);
}

TEST_CASE("tent cell domain area") {
  auto tent = [](double t) { return 0.5 * (1.0 - 2.0 * std::fabs(t)); };
  int ny = 64;
  MacGrid g = build_cell_domain(tent, 64, ny);
  double area = fluid_area(g, CellKind::FluidLayer);
  CHECK(std::fabs(area - 0.25) <= 2.0 / ny);
}

TEST_CASE("non-flat cell profile must vanish at the ends of Y") {
  CHECK_THROWS_AS(build_cell_domain([](double t) { return 1.0 + t; }, 16, 16),
                  ParamError);
}

TEST_CASE("column and row widths sum to the domain extents") {
  MacGrid g = build_domain_grid(unit_domain(3.0), 24, 40, 1.3);
  double sx = 0, sy = 0;
  for (double d : g.dx) sx += d;
  for (double d : g.dy) sy += d;
  CHECK(std::fabs(sx - 3.0) <= 3.0 * 1e-12);
  CHECK(std::fabs(sy - 1.0) <= 1e-12);
}
