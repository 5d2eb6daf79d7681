#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "walllaw/cell.hpp"

using namespace wl;

namespace {

const double kC1Flat = 13.0 / 12.0;  // 1D oracle: -phi''=1, phi(0)=0, phi(-1)=1

std::function<double(double)> flat(double H) {
  return [H](double) { return H; };
}

std::function<double(double)> tent(double H) {
  return [H](double t) { return H * (1.0 - 2.0 * std::fabs(t)); };
}

}  // namespace

TEST_CASE("flat fixture reproduces the 1D oracle value 13/12") {
  SolverConfig cfg;
  auto r = solve_cell_longitudinal(flat(1.0), CellResolution{64, 64}, cfg);
  CHECK(std::fabs(r.c - kC1Flat) / kC1Flat <= 5e-4);
}

TEST_CASE("flat fixture at height H matches the closed form") {
  SolverConfig cfg;
  double H = 0.5;
  auto r = solve_cell_longitudinal(flat(H), CellResolution{32, 64}, cfg);
  double exact = flat_profile_coefficient(H);
  CHECK(exact == doctest::Approx(((std::pow(-1.75, 3) - std::pow(-2.25, 3)) / 3.0)));
  CHECK(std::fabs(r.c - exact) / exact <= 2e-3);
}

TEST_CASE("longitudinal coefficient is Cauchy under refinement") {
  SolverConfig cfg;
  double c32 = solve_cell_longitudinal(flat(1.0), CellResolution{16, 32}, cfg).c;
  double c64 = solve_cell_longitudinal(flat(1.0), CellResolution{16, 64}, cfg).c;
  double c128 = solve_cell_longitudinal(flat(1.0), CellResolution{16, 128}, cfg).c;
  double d1 = std::fabs(c64 - c32), d2 = std::fabs(c128 - c64);
  CHECK(d2 < d1);
  CHECK(d2 <= 0.6 * d1);  // at least first-order contraction
}

TEST_CASE("transverse equals longitudinal for flat profiles") {
  SolverConfig cfg;
  for (double H : {1.0, 0.5}) {
    auto lon = solve_cell_longitudinal(flat(H), CellResolution{16, 64}, cfg);
    auto tra = solve_cell_transverse(flat(H), CellResolution{16, 64}, cfg);
    CHECK(std::fabs(lon.c - tra.c) <= 1e-9 * lon.c);
  }
}

TEST_CASE("tent profile has a positive finite transverse coefficient") {
  SolverConfig cfg;
  auto r = solve_cell_transverse(tent(0.5), CellResolution{64, 64}, cfg);
  CHECK(r.c > 0.0);
  CHECK(std::isfinite(r.c));
}

TEST_CASE("positive coefficients for nonzero boundary data") {
  SolverConfig cfg;
  auto lon = solve_cell_longitudinal(tent(0.8), CellResolution{48, 48}, cfg);
  CHECK(lon.c > 0.0);
}

TEST_CASE("effective matrix assembles K = nu diag(c1, c2) with zero cross term") {
  SolverConfig cfg;
  auto lon = solve_cell_longitudinal(flat(1.0), CellResolution{16, 64}, cfg);
  auto tra = solve_cell_transverse(flat(1.0), CellResolution{16, 64}, cfg);
  auto K = effective_matrix(lon, tra, 2.0);
  CHECK(K.k11 == doctest::Approx(2.0 * lon.c).epsilon(1e-15));
  CHECK(K.k22 == doctest::Approx(2.0 * tra.c).epsilon(1e-15));
  CHECK(K.k12 == 0.0);
  CHECK(K.cross == 0.0);
  CHECK(K.k11 >= 0.0);
  CHECK(K.k22 >= 0.0);
}

TEST_CASE("rescaling nu rescales K and leaves c unchanged") {
  SolverConfig cfg;
  auto lon = solve_cell_longitudinal(flat(1.0), CellResolution{16, 32}, cfg);
  auto tra = solve_cell_transverse(flat(1.0), CellResolution{16, 32}, cfg);
  auto K1 = effective_matrix(lon, tra, 1.0);
  auto K3 = effective_matrix(lon, tra, 3.0);
  CHECK(K3.k11 == doctest::Approx(3.0 * K1.k11).epsilon(1e-15));
  CHECK(K3.c1 == K1.c1);
}

TEST_CASE("profile mismatch is rejected") {
  SolverConfig cfg;
  auto lon = solve_cell_longitudinal(flat(1.0), CellResolution{16, 32}, cfg);
  auto tra = solve_cell_transverse(flat(0.5), CellResolution{16, 32}, cfg);
  CHECK_THROWS_AS(effective_matrix(lon, tra, 1.0), ParamError);
  CHECK_THROWS_AS(effective_matrix(tra, lon, 1.0), ParamError);
}

TEST_CASE("k11 example: nu = 2 and c1 = 13/12 give 13/6") {
  CHECK(2.0 * kC1Flat == doctest::Approx(13.0 / 6.0).epsilon(1e-15));
}
