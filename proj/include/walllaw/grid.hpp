#pragma once

#include <functional>
#include <vector>

#include "walllaw/common.hpp"

namespace wl {

enum class CellKind : unsigned char { Solid = 0, FluidOmega = 1, FluidLayer = 2 };

// Structural tag for each of the four box edges of a grid.
enum class EdgeTag : unsigned char {
  Dirichlet,    // velocity imposed (value supplied at solve time)
  Gamma2,       // the wall-law boundary y = 0 (bottom edge of Omega grids)
  Periodic,     // matched pair (left/right)
  TractionFree  // do-nothing
};

enum class LayerKind { Periodic, Fixed };

// Sampled nonnegative layer profile. For kind Periodic, h lives on the unit
// periodicity cell Y = (-1/2, 1/2) and h_eps(x) = h(x/eps wrapped into Y).
// For kind Fixed, h is a function of x directly and must be positive.
struct LayerProfile {
  LayerKind kind = LayerKind::Fixed;
  std::function<double(double)> h;
  double eps = 0.0;
  double lipschitz_bound = 0.0;

  double max_h(double lx, int samples = 4096) const;
  // h_eps(x): the layer depth scale factor at abscissa x in (0, lx).
  double h_eps(double x) const;
};

struct DomainSpec {
  double lx = 1.0;
  bool has_layer = false;
  LayerProfile layer;
  bool periodic_x = false;  // left/right periodic instead of Gamma1 walls
  // gamma1 = top (+ left/right when not periodic), gamma2 = bottom edge.
};

// Nonuniform staggered (MAC) grid with a per-cell mask.
// u lives on vertical faces (nx+1) x ny, v on horizontal faces nx x (ny+1),
// p on cell centers nx x ny. Row 0 is the lowest row.
struct MacGrid {
  int nx = 0, ny = 0;
  std::vector<double> xf, yf;  // face coordinates, sizes nx+1 / ny+1
  std::vector<double> xc, yc;  // cell centers
  std::vector<double> dx, dy;  // cell widths
  Array2<CellKind> mask;       // nx x ny
  bool periodic_x = false;
  EdgeTag edge_left = EdgeTag::Dirichlet;
  EdgeTag edge_right = EdgeTag::Dirichlet;
  EdgeTag edge_bottom = EdgeTag::Gamma2;
  EdgeTag edge_top = EdgeTag::Dirichlet;
  int jzero = 0;  // first row index at or above y = 0 (start of Omega rows)

  double lx() const { return xf.back() - xf.front(); }
  double y_lo() const { return yf.front(); }
  double y_hi() const { return yf.back(); }

  bool in_range(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
  // Cell lookup with periodic wrap in x; cells outside the box are Solid.
  CellKind cell(int i, int j) const {
    if (periodic_x) i = (i % nx + nx) % nx;
    if (!in_range(i, j)) return CellKind::Solid;
    return mask(i, j);
  }
  bool fluid(int i, int j) const { return cell(i, j) != CellKind::Solid; }
  int wrap_i(int i) const { return periodic_x ? (i % nx + nx) % nx : i; }

  double cell_volume(int i, int j) const { return dx[i] * dy[j]; }
  // Width of the control strip around u-column i (half cells on each side).
  double u_col_width(int i) const;
};

// Validation helpers (throw on violation).
void validate_grid(const MacGrid& g);
bool fluid_edge_connected(const MacGrid& g);
double fluid_area(const MacGrid& g, CellKind kind);

// Build a MAC grid covering Omega = (0,lx) x (0,1) with geometric vertical
// grading (finest rows adjacent to Gamma2 = {y=0}); mask all fluid-Omega.
// When spec.has_layer is set, `layer_rows` uniform rows are prepended below
// y = 0 covering depth eps*max(h); those cells start out Solid and are
// claimed by rasterize_layer.
MacGrid build_domain_grid(const DomainSpec& spec, int nx, int ny, double grading,
                          int layer_rows = 8);

// Mark cells whose center lies inside Sigma_eps = {-eps h_eps(x) < y < 0}
// as fluid-layer (stair-step approximation of the thin layer).
MacGrid rasterize_layer(const LayerProfile& profile, const MacGrid& grid);

// Cell domain Z_h = {x in Y, -h(x) < y < 0} on Y = (-1/2,1/2), laterally
// periodic, stair-step mask; top edge is the Dirichlet-zero plane y = 0.
MacGrid build_cell_domain(const std::function<double(double)>& h, int nx, int ny);

}  // namespace wl
