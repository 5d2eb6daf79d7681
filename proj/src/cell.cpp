#include "walllaw/cell.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>

namespace wl {

namespace {

std::vector<double> fingerprint(const std::function<double(double)>& h) {
  std::vector<double> f(17);
  for (int k = 0; k < 17; ++k) f[k] = h(-0.5 + k / 16.0);
  return f;
}

// Strip-extrapolated |grad phi|^2 quadrature for a cell-centered scalar,
// matching the dirichlet_energy convention so that flat profiles give the
// same number through both cell problems.
double scalar_gradient_energy(const Array2<double>& phi, const MacGrid& g) {
  double E = 0.0;
  // vertical runs per column
  for (int i = 0; i < g.nx; ++i) {
    int j = 0;
    while (j < g.ny) {
      if (g.mask(i, j) == CellKind::Solid) {
        ++j;
        continue;
      }
      int a = j;
      while (j < g.ny && g.mask(i, j) != CellKind::Solid) ++j;
      int b = j - 1;
      if (b == a) continue;
      for (int r = a + 1; r <= b; ++r) {
        double d = g.yc[r] - g.yc[r - 1];
        double grad = (phi(i, r) - phi(i, r - 1)) / d;
        E += grad * grad * g.dx[i] * d;
      }
      double glow = (phi(i, a + 1) - phi(i, a)) / (g.yc[a + 1] - g.yc[a]);
      E += glow * glow * g.dx[i] * 0.5 * g.dy[a];
      double ghigh = (phi(i, b) - phi(i, b - 1)) / (g.yc[b] - g.yc[b - 1]);
      E += ghigh * ghigh * g.dx[i] * 0.5 * g.dy[b];
    }
  }
  // horizontal runs per row (periodic in x)
  for (int j = 0; j < g.ny; ++j) {
    auto fluid = [&](int i) { return g.mask((i % g.nx + g.nx) % g.nx, j) != CellKind::Solid; };
    auto pair_term = [&](int il, int ir) {
      int a = (il % g.nx + g.nx) % g.nx, b = (ir % g.nx + g.nx) % g.nx;
      double d = 0.5 * (g.dx[a] + g.dx[b]);
      double grad = (phi(b, j) - phi(a, j)) / d;
      E += grad * grad * g.dy[j] * d;
    };
    bool all = true;
    for (int i = 0; i < g.nx && all; ++i) all = fluid(i);
    if (all) {
      for (int i = 0; i < g.nx; ++i) pair_term(i - 1, i);
      continue;
    }
    int i = 0;
    while (i < g.nx) {
      if (!fluid(i)) {
        ++i;
        continue;
      }
      int a = i;
      while (i < g.nx && fluid(i)) ++i;
      int b = i - 1;
      if (b == a) continue;
      for (int r = a + 1; r <= b; ++r) pair_term(r - 1, r);
      double glow = (phi(a + 1, j) - phi(a, j)) / (g.xc[a + 1] - g.xc[a]);
      E += glow * glow * g.dy[j] * 0.5 * g.dx[a];
      double ghigh = (phi(b, j) - phi(b - 1, j)) / (g.xc[b] - g.xc[b - 1]);
      E += ghigh * ghigh * g.dy[j] * 0.5 * g.dx[b];
    }
  }
  return E;
}

}  // namespace

CellResult solve_cell_longitudinal(const std::function<double(double)>& h,
                                   const CellResolution& res, const SolverConfig& cfg) {
  CellResult out;
  out.mode = 1;
  out.grid = build_cell_domain(h, res.nx, res.ny);
  out.h_samples = fingerprint(h);

  ViscosityField visc = ViscosityField::uniform(out.grid, 1.0);
  BoundaryCondition bc;
  // w = e1 on the bottom surface (y < 0 walls), w = 0 on {y = 0}.
  bc.u_value = [](double, double y) { return y < -1e-12 ? 1.0 : 0.0; };
  bc.v_value = [](double, double) { return 0.0; };
  BodyForce f;
  f.fx = [](double, double) { return 1.0; };
  auto [state, stats] = solve_stokes(out.grid, visc, bc, f, cfg);
  out.flow = state;
  out.stats = stats;
  out.c = dirichlet_energy(state, visc, out.grid);
  return out;
}

CellResult solve_cell_transverse(const std::function<double(double)>& h,
                                 const CellResolution& res, const SolverConfig& cfg) {
  (void)cfg;
  CellResult out;
  out.mode = 2;
  out.grid = build_cell_domain(h, res.nx, res.ny);
  out.h_samples = fingerprint(h);
  const MacGrid& g = out.grid;

  Array2<int> pid(g.nx, g.ny, -1);
  std::vector<std::pair<int, int>> cells;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.mask(i, j) != CellKind::Solid) {
        pid(i, j) = static_cast<int>(cells.size());
        cells.emplace_back(i, j);
      }
  int n = static_cast<int>(cells.size());
  if (n == 0) throw DegenerateLayerError("cell domain: empty mask");

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  auto ghost = [&](int c, double w_over_d, double value) {
    trips.emplace_back(c, c, w_over_d);
    rhs[c] += w_over_d * value;
  };
  for (int c = 0; c < n; ++c) {
    auto [i, j] = cells[c];
    rhs[c] += g.dx[i] * g.dy[j];  // unit body force
    // right neighbor (periodic wrap), emitted once per pair
    int ir = (i + 1) % g.nx;
    double dxx = 0.5 * (g.dx[i] + g.dx[ir]);
    if (g.mask(ir, j) != CellKind::Solid) {
      if (pid(ir, j) > c || (ir == 0 && i == g.nx - 1)) {
        int c2 = pid(ir, j);
        double w = g.dy[j] / dxx;
        trips.emplace_back(c, c, w);
        trips.emplace_back(c2, c2, w);
        trips.emplace_back(c, c2, -w);
        trips.emplace_back(c2, c, -w);
      }
    } else {
      ghost(c, g.dy[j] * 2.0 / g.dx[i], 1.0);  // stair wall: phi = 1
    }
    int il = (i - 1 + g.nx) % g.nx;
    if (g.mask(il, j) == CellKind::Solid)
      ghost(c, g.dy[j] * 2.0 / g.dx[i], 1.0);
    // top neighbor
    if (j + 1 < g.ny && g.mask(i, j + 1) != CellKind::Solid) {
      int c2 = pid(i, j + 1);
      double w = g.dx[i] / (g.yc[j + 1] - g.yc[j]);
      trips.emplace_back(c, c, w);
      trips.emplace_back(c2, c2, w);
      trips.emplace_back(c, c2, -w);
      trips.emplace_back(c2, c, -w);
    } else if (j + 1 >= g.ny) {
      ghost(c, g.dx[i] * 2.0 / g.dy[j], 0.0);  // {y=0}: phi = 0
    } else {
      ghost(c, g.dx[i] * 2.0 / g.dy[j], 1.0);
    }
    // bottom neighbor: ghost only (pairs were added from below)
    if (j == 0 || g.mask(i, j - 1) == CellKind::Solid)
      ghost(c, g.dx[i] * 2.0 / g.dy[j], 1.0);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.compute(A);
  if (ldlt.info() != Eigen::Success)
    throw WellPosednessError("transverse cell problem: factorization failed");
  Eigen::VectorXd sol = ldlt.solve(rhs);

  out.phi = Array2<double>(g.nx, g.ny, 0.0);
  for (int c = 0; c < n; ++c) out.phi(cells[c].first, cells[c].second) = sol[c];
  out.c = scalar_gradient_energy(out.phi, g);
  out.stats.converged = true;
  return out;
}

EffectiveMatrix effective_matrix(const CellResult& longitudinal,
                                 const CellResult& transverse, double nu) {
  require(nu > 0, "effective matrix: nu must be positive");
  require(longitudinal.mode == 1 && transverse.mode == 2,
          "effective matrix: need one longitudinal and one transverse result");
  require(longitudinal.h_samples.size() == transverse.h_samples.size(),
          "effective matrix: profile mismatch");
  for (size_t k = 0; k < longitudinal.h_samples.size(); ++k)
    require(std::fabs(longitudinal.h_samples[k] - transverse.h_samples[k]) <= 1e-12,
            "effective matrix: profile mismatch");

  EffectiveMatrix K;
  K.nu = nu;
  K.c1 = longitudinal.c;
  K.c2 = transverse.c;
  K.k11 = nu * K.c1;
  K.k22 = nu * K.c2;
  // grad w^1 . grad w^2 pairs only the out-of-plane component; the in-plane
  // solution has no out-of-plane part, so the integrand vanishes pointwise.
  K.cross = 0.0;
  K.k12 = nu * K.cross;
  return K;
}

double flat_profile_coefficient(double H) {
  require(H > 0, "flat profile: H must be positive");
  double a = -(1.0 + H * H / 2.0) / H;
  return (std::pow(a + H, 3) - std::pow(a, 3)) / 3.0;
}

}  // namespace wl
