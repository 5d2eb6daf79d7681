#include "walllaw/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace wl {

double LayerProfile::max_h(double lx, int samples) const {
  double m = 0.0;
  if (kind == LayerKind::Periodic) {
    for (int k = 0; k <= samples; ++k) m = std::max(m, h(-0.5 + k * 1.0 / samples));
  } else {
    for (int k = 0; k <= samples; ++k) m = std::max(m, h(k * lx / samples));
  }
  return m;
}

double LayerProfile::h_eps(double x) const {
  if (kind == LayerKind::Fixed) return h(x);
  // wrap x/eps into Y = (-1/2, 1/2)
  double t = x / eps;
  t -= std::floor(t + 0.5);
  return h(t);
}

double MacGrid::u_col_width(int i) const {
  if (periodic_x) {
    int il = (i - 1 + nx) % nx;
    return 0.5 * (dx[il] + dx[i % nx]);
  }
  if (i == 0) return 0.5 * dx[0];
  if (i == nx) return 0.5 * dx[nx - 1];
  return 0.5 * (dx[i - 1] + dx[i]);
}

void validate_grid(const MacGrid& g) {
  require(g.nx > 0 && g.ny > 0, "grid: empty");
  require(static_cast<int>(g.xf.size()) == g.nx + 1 &&
              static_cast<int>(g.yf.size()) == g.ny + 1,
          "grid: face array sizes");
  for (int i = 0; i < g.nx; ++i)
    require(g.xf[i + 1] > g.xf[i], "grid: x faces not strictly increasing");
  for (int j = 0; j < g.ny; ++j)
    require(g.yf[j + 1] > g.yf[j], "grid: y faces not strictly increasing");
}

bool fluid_edge_connected(const MacGrid& g) {
  Array2<char> seen(g.nx, g.ny, 0);
  int si = -1, sj = -1, nfluid = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.mask(i, j) != CellKind::Solid) {
        ++nfluid;
        if (si < 0) si = i, sj = j;
      }
  if (nfluid == 0) return true;
  std::deque<std::pair<int, int>> q{{si, sj}};
  seen(si, sj) = 1;
  int count = 0;
  while (!q.empty()) {
    auto [i, j] = q.front();
    q.pop_front();
    ++count;
    const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      int ii = i + di[k], jj = j + dj[k];
      if (g.periodic_x) ii = (ii + g.nx) % g.nx;
      if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny) continue;
      if (seen(ii, jj) || g.mask(ii, jj) == CellKind::Solid) continue;
      seen(ii, jj) = 1;
      q.emplace_back(ii, jj);
    }
  }
  return count == nfluid;
}

double fluid_area(const MacGrid& g, CellKind kind) {
  double a = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.mask(i, j) == kind) a += g.dx[i] * g.dy[j];
  return a;
}

namespace {

void finish_coords(MacGrid& g) {
  g.xc.resize(g.nx);
  g.yc.resize(g.ny);
  g.dx.resize(g.nx);
  g.dy.resize(g.ny);
  for (int i = 0; i < g.nx; ++i) {
    g.dx[i] = g.xf[i + 1] - g.xf[i];
    g.xc[i] = 0.5 * (g.xf[i] + g.xf[i + 1]);
  }
  for (int j = 0; j < g.ny; ++j) {
    g.dy[j] = g.yf[j + 1] - g.yf[j];
    g.yc[j] = 0.5 * (g.yf[j] + g.yf[j + 1]);
  }
}

// Geometric row heights on (0, H), ratio g between adjacent rows, finest
// first; normalized so the partial sums land exactly on H.
std::vector<double> graded_faces(double h0_total, int n, double grading) {
  std::vector<double> w(n);
  if (grading == 1.0) {
    for (int j = 0; j < n; ++j) w[j] = 1.0;
  } else {
    double r = 1.0;
    for (int j = 0; j < n; ++j) {
      w[j] = r;
      r *= grading;
    }
  }
  double total = 0.0;
  for (double v : w) total += v;
  std::vector<double> f(n + 1);
  f[0] = 0.0;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    acc += w[j];
    f[j + 1] = h0_total * (acc / total);
  }
  f[n] = h0_total;
  return f;
}

}  // namespace

MacGrid build_domain_grid(const DomainSpec& spec, int nx, int ny, double grading,
                          int layer_rows) {
  require(spec.lx > 0, "domain: lx must be positive");
  require(nx >= 8 && ny >= 8, "grid: nx, ny must be >= 8");
  require(grading >= 1.0 && grading <= 10.0, "grid: grading must lie in [1, 10]");

  MacGrid g;
  g.periodic_x = spec.periodic_x;
  g.edge_left = g.edge_right = spec.periodic_x ? EdgeTag::Periodic : EdgeTag::Dirichlet;
  g.edge_top = EdgeTag::Dirichlet;
  g.edge_bottom = EdgeTag::Gamma2;

  g.nx = nx;
  g.xf.resize(nx + 1);
  for (int i = 0; i <= nx; ++i) g.xf[i] = spec.lx * i / nx;
  g.xf[nx] = spec.lx;

  std::vector<double> omega = graded_faces(1.0, ny, grading);

  if (!spec.has_layer) {
    g.ny = ny;
    g.yf = omega;
    g.jzero = 0;
    g.mask = Array2<CellKind>(nx, ny, CellKind::FluidOmega);
  } else {
    require(spec.layer.eps > 0, "layer: eps must be positive");
    require(layer_rows >= 8, "layer: need at least 8 rows across the layer depth");
    double depth = spec.layer.eps * spec.layer.max_h(spec.lx);
    if (depth <= 0) throw DegenerateLayerError("layer: profile is identically zero");
    g.ny = ny + layer_rows;
    g.yf.resize(g.ny + 1);
    for (int j = 0; j <= layer_rows; ++j)
      g.yf[j] = -depth + depth * j / layer_rows;
    g.yf[layer_rows] = 0.0;
    for (int j = 0; j < ny; ++j) g.yf[layer_rows + 1 + j] = omega[j + 1];
    g.jzero = layer_rows;
    g.mask = Array2<CellKind>(nx, g.ny, CellKind::Solid);
    for (int j = layer_rows; j < g.ny; ++j)
      for (int i = 0; i < nx; ++i) g.mask(i, j) = CellKind::FluidOmega;
    g.edge_bottom = EdgeTag::Dirichlet;  // outer boundary of Sigma_eps
  }
  finish_coords(g);
  validate_grid(g);
  return g;
}

MacGrid rasterize_layer(const LayerProfile& profile, const MacGrid& grid) {
  require(profile.eps > 0, "layer: eps must be positive");
  double maxh = profile.max_h(grid.lx());
  if (maxh <= 0) throw DegenerateLayerError("layer: profile is identically zero");
  double depth = profile.eps * maxh;
  require(grid.y_lo() <= -depth + 1e-12 * depth,
          "layer: grid does not extend below y=0 by eps*sup h");

  double min_dy = grid.dy[0];
  int rows_below = 0;
  for (int j = 0; j < grid.ny; ++j) {
    if (grid.yf[j + 1] <= 1e-15) {
      ++rows_below;
      min_dy = std::min(min_dy, grid.dy[j]);
    }
  }
  if (depth < min_dy)
    throw DegenerateLayerError("layer: eps*h below minimum grid spacing");
  int covering = 0;
  for (int j = 0; j < grid.ny; ++j)
    if (grid.yc[j] > -depth && grid.yc[j] < 0) ++covering;
  if (covering < 8)
    throw ResolutionError("layer: fewer than 8 cell rows across the layer depth");

  MacGrid out = grid;
  for (int j = 0; j < out.ny; ++j) {
    if (out.yc[j] >= 0) continue;
    for (int i = 0; i < out.nx; ++i) {
      double hx = profile.h_eps(out.xc[i]);
      out.mask(i, j) =
          (out.yc[j] > -profile.eps * hx) ? CellKind::FluidLayer : CellKind::Solid;
    }
  }
  if (!fluid_edge_connected(out))
    throw ResolutionError("layer: rasterized fluid region is not edge-connected");
  return out;
}

MacGrid build_cell_domain(const std::function<double(double)>& h, int nx, int ny) {
  require(nx >= 8 && ny >= 8, "cell domain: nx, ny must be >= 8");
  const int samples = 4096;
  double maxh = 0.0, minh = 1e300;
  for (int k = 0; k <= samples; ++k) {
    double v = h(-0.5 + k * 1.0 / samples);
    require(v >= -1e-14, "cell domain: h must be nonnegative");
    maxh = std::max(maxh, v);
    minh = std::min(minh, v);
  }
  if (maxh <= 0) throw DegenerateLayerError("cell domain: h is identically zero");
  bool flat = (maxh - minh) <= 1e-12 * maxh;
  if (!flat)
    require(h(-0.5) <= 1e-12 * maxh && h(0.5) <= 1e-12 * maxh,
            "cell domain: non-flat h must vanish at the ends of Y");

  MacGrid g;
  g.nx = nx;
  g.ny = ny;
  g.periodic_x = true;
  g.edge_left = g.edge_right = EdgeTag::Periodic;
  g.edge_top = EdgeTag::Dirichlet;     // {y=0}: w = 0
  g.edge_bottom = EdgeTag::Dirichlet;  // bottom surface: w = e^m
  g.jzero = ny;                        // whole domain below y = 0
  g.xf.resize(nx + 1);
  for (int i = 0; i <= nx; ++i) g.xf[i] = -0.5 + i * 1.0 / nx;
  g.xf[nx] = 0.5;
  g.yf.resize(ny + 1);
  for (int j = 0; j <= ny; ++j) g.yf[j] = -maxh + maxh * j / ny;
  g.yf[ny] = 0.0;
  finish_coords(g);

  if (maxh / ny * 8 > maxh + 1e-15)
    throw ResolutionError("cell domain: ny too small for max h");
  g.mask = Array2<CellKind>(nx, ny, CellKind::Solid);
  int nfluid = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (g.yc[j] > -h(g.xc[i])) {
        g.mask(i, j) = CellKind::FluidLayer;
        ++nfluid;
      }
  if (nfluid == 0) throw DegenerateLayerError("cell domain: empty mask");
  validate_grid(g);
  return g;
}

}  // namespace wl
