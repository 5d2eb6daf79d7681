#include "walllaw/fields.hpp"

#include <algorithm>
#include <cmath>

namespace wl {

void require_conforming(const FlowState& s, const MacGrid& g) {
  if (s.u.nx() != g.nx + 1 || s.u.ny() != g.ny || s.v.nx() != g.nx ||
      s.v.ny() != g.ny + 1 || s.p.nx() != g.nx || s.p.ny() != g.ny)
    throw ConformanceError("state does not conform to grid");
}

ViscosityField ViscosityField::uniform(const MacGrid& g, double value) {
  require(value > 0, "viscosity must be positive");
  ViscosityField f;
  f.nu = Array2<double>(g.nx, g.ny, value);
  return f;
}

ViscosityField ViscosityField::composite(const MacGrid& g, double nu_omega,
                                         double nu_layer) {
  require(nu_omega > 0 && nu_layer > 0, "viscosity must be positive");
  ViscosityField f;
  f.nu = Array2<double>(g.nx, g.ny, nu_omega);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.mask(i, j) == CellKind::FluidLayer) f.nu(i, j) = nu_layer;
  return f;
}

double ViscosityField::at_u_face(const MacGrid& g, int i, int j) const {
  double sum = 0.0;
  int n = 0;
  for (int s = -1; s <= 0; ++s) {
    int ic = g.wrap_i(i + s);
    if (ic >= 0 && ic < g.nx && j >= 0 && j < g.ny && g.mask(ic, j) != CellKind::Solid) {
      sum += nu(ic, j);
      ++n;
    }
  }
  return n ? sum / n : 0.0;
}

namespace {

inline double uval(const FlowState& s, const MacGrid& g, int i, int j) {
  if (g.periodic_x) i = (i % (g.nx) + g.nx) % g.nx;
  return s.u(i, j);
}

// Face presence: touches at least one fluid cell.
inline bool u_present(const MacGrid& g, int i, int j) {
  return g.fluid(i - 1, j) || g.fluid(i, j);
}
inline bool v_present(const MacGrid& g, int i, int j) {
  return g.fluid(i, j - 1) || g.fluid(i, j);
}

// Average viscosity of the fluid cells among (ia,j),(ib,j).
inline double pair_nu(const ViscosityField& visc, const MacGrid& g, int ia, int ib,
                      int j) {
  double sum = 0.0;
  int n = 0;
  for (int ic : {ia, ib}) {
    int iw = g.wrap_i(ic);
    if (iw >= 0 && iw < g.nx && j >= 0 && j < g.ny && g.mask(iw, j) != CellKind::Solid) {
      sum += visc.nu(iw, j);
      ++n;
    }
  }
  return n ? sum / n : 0.0;
}
inline double pair_nu_col(const ViscosityField& visc, const MacGrid& g, int i, int ja,
                          int jb) {
  double sum = 0.0;
  int n = 0;
  for (int jc : {ja, jb}) {
    int iw = g.wrap_i(i);
    if (iw >= 0 && iw < g.nx && jc >= 0 && jc < g.ny && g.mask(iw, jc) != CellKind::Solid) {
      sum += visc.nu(iw, jc);
      ++n;
    }
  }
  return n ? sum / n : 0.0;
}

// Distance-weighted harmonic mean across an interface.
inline double harmonic(double d1, double nu1, double d2, double nu2) {
  if (nu1 <= 0) return nu2;
  if (nu2 <= 0) return nu1;
  return (d1 + d2) / (d1 / nu1 + d2 / nu2);
}

}  // namespace

Array2<double> discrete_divergence(const FlowState& s, const MacGrid& g) {
  require_conforming(s, g);
  Array2<double> div(g.nx, g.ny, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (g.mask(i, j) == CellKind::Solid) continue;
      double du = (s.u(i + 1, j) - s.u(i, j)) / g.dx[i];
      double dv = (s.v(i, j + 1) - s.v(i, j)) / g.dy[j];
      div(i, j) = du + dv;
    }
  return div;
}

std::pair<Array2<double>, Array2<double>> discrete_gradient(const Array2<double>& p,
                                                            const MacGrid& g) {
  if (p.nx() != g.nx || p.ny() != g.ny)
    throw ConformanceError("pressure field does not conform to grid");
  Array2<double> gu(g.nx + 1, g.ny, 0.0), gv(g.nx, g.ny + 1, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      int il = i - 1, ir = i;
      double dxm;
      if (g.periodic_x) {
        il = (i - 1 + g.nx) % g.nx;
        ir = i % g.nx;
        dxm = 0.5 * (g.dx[il] + g.dx[ir]);
      } else {
        if (il < 0 || ir >= g.nx) continue;
        dxm = g.xc[ir] - g.xc[il];
      }
      if (g.mask(il, j) == CellKind::Solid || g.mask(ir, j) == CellKind::Solid) continue;
      gu(i, j) = (p(ir, j) - p(il, j)) / dxm;
    }
  if (g.periodic_x)
    for (int j = 0; j < g.ny; ++j) gu(g.nx, j) = gu(0, j);
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (g.mask(i, j - 1) == CellKind::Solid || g.mask(i, j) == CellKind::Solid)
        continue;
      gv(i, j) = (p(i, j) - p(i, j - 1)) / (g.yc[j] - g.yc[j - 1]);
    }
  return {gu, gv};
}

double dirichlet_energy(const FlowState& s, const ViscosityField& visc,
                        const MacGrid& g) {
  require_conforming(s, g);
  double E = 0.0;

  // Cell terms: (du/dx)^2 and (dv/dy)^2 at cell centers.
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (g.mask(i, j) == CellKind::Solid) continue;
      double nuc = visc.nu(i, j);
      double vol = g.dx[i] * g.dy[j];
      double dudx = (s.u(i + 1, j) - s.u(i, j)) / g.dx[i];
      double dvdy = (s.v(i, j + 1) - s.v(i, j)) / g.dy[j];
      E += nuc * vol * (dudx * dudx + dvdy * dvdy);
    }

  // (du/dy)^2 along u-columns; wall strips extrapolate the nearest gradient.
  int iu_end = g.periodic_x ? g.nx : g.nx + 1;
  for (int i = 0; i < iu_end; ++i) {
    int j = 0;
    while (j < g.ny) {
      if (!u_present(g, i, j)) {
        ++j;
        continue;
      }
      int a = j;
      while (j < g.ny && u_present(g, i, j)) ++j;
      int b = j - 1;
      if (b == a) continue;  // single-row run: no vertical gradient info
      auto width = [&](int ra, int rb) {
        double w = 0.0;
        if (g.fluid(i - 1, ra) || g.fluid(i - 1, rb)) w += 0.5 * g.dx[g.wrap_i(i - 1)];
        if (g.fluid(i, ra) || g.fluid(i, rb)) w += 0.5 * g.dx[g.wrap_i(i) < g.nx ? g.wrap_i(i) : g.nx - 1];
        return w;
      };
      for (int r = a + 1; r <= b; ++r) {
        double db = 0.5 * g.dy[r - 1], da = 0.5 * g.dy[r];
        double nb = pair_nu(visc, g, i - 1, i, r - 1);
        double na = pair_nu(visc, g, i - 1, i, r);
        double nun = harmonic(db, nb, da, na);
        double grad = (uval(s, g, i, r) - uval(s, g, i, r - 1)) / (g.yc[r] - g.yc[r - 1]);
        E += nun * width(r - 1, r) * grad * grad * (db + da);
      }
      double glow = (uval(s, g, i, a + 1) - uval(s, g, i, a)) / (g.yc[a + 1] - g.yc[a]);
      E += pair_nu(visc, g, i - 1, i, a) * width(a, a) * glow * glow * (0.5 * g.dy[a]);
      double ghigh = (uval(s, g, i, b) - uval(s, g, i, b - 1)) / (g.yc[b] - g.yc[b - 1]);
      E += pair_nu(visc, g, i - 1, i, b) * width(b, b) * ghigh * ghigh * (0.5 * g.dy[b]);
    }
  }

  // (dv/dx)^2 along v-rows.
  for (int j = 0; j <= g.ny; ++j) {
    auto present = [&](int i) { return v_present(g, g.wrap_i(i), j); };
    auto height = [&](int ia, int ib) {
      double w = 0.0;
      bool lower = g.fluid(ia, j - 1) || g.fluid(ib, j - 1);
      bool upper = g.fluid(ia, j) || g.fluid(ib, j);
      if (lower && j - 1 >= 0) w += 0.5 * g.dy[j - 1];
      if (upper && j < g.ny) w += 0.5 * g.dy[j];
      return w;
    };
    auto pair_term = [&](int il, int ir) {
      double dl = 0.5 * g.dx[g.wrap_i(il)], dr = 0.5 * g.dx[g.wrap_i(ir)];
      double nl = pair_nu_col(visc, g, il, j - 1, j);
      double nr = pair_nu_col(visc, g, ir, j - 1, j);
      double nun = harmonic(dl, nl, dr, nr);
      double grad = (s.v(g.wrap_i(ir), j) - s.v(g.wrap_i(il), j)) / (dl + dr);
      E += nun * height(il, ir) * grad * grad * (dl + dr);
    };
    if (g.periodic_x) {
      bool all = true;
      for (int i = 0; i < g.nx && all; ++i) all = present(i);
      if (all) {
        for (int i = 0; i < g.nx; ++i) pair_term(i - 1 < 0 ? g.nx - 1 : i - 1, i);
        continue;
      }
    }
    int i = 0;
    while (i < g.nx) {
      if (!present(i)) {
        ++i;
        continue;
      }
      int a = i;
      while (i < g.nx && present(i)) ++i;
      int b = i - 1;
      if (b == a) continue;
      for (int r = a + 1; r <= b; ++r) pair_term(r - 1, r);
      double glow = (s.v(a + 1, j) - s.v(a, j)) / (g.xc[a + 1] - g.xc[a]);
      E += pair_nu_col(visc, g, a, j - 1, j) * height(a, a) * glow * glow * (0.5 * g.dx[a]);
      double ghigh = (s.v(b, j) - s.v(b - 1, j)) / (g.xc[b] - g.xc[b - 1]);
      E += pair_nu_col(visc, g, b, j - 1, j) * height(b, b) * ghigh * ghigh * (0.5 * g.dx[b]);
    }
  }
  return E;
}

double gamma2_length(const MacGrid& g) { return g.lx(); }

double boundary_integral(const std::vector<double>& g_values, const MacGrid& g,
                         double x0, double x1) {
  int n = g.periodic_x ? g.nx : g.nx + 1;
  require(static_cast<int>(g_values.size()) >= n, "boundary data shorter than Gamma2");
  require(x1 > x0, "boundary integral: empty edge window");
  double total = 0.0;
  bool any = false;
  for (int i = 0; i < n; ++i) {
    double lo = (i == 0 && !g.periodic_x) ? g.xf[0] : g.xf[i] - 0.5 * g.dx[g.wrap_i(i - 1)];
    double hi = (i == g.nx && !g.periodic_x) ? g.xf[g.nx] : g.xf[i] + 0.5 * g.dx[g.wrap_i(i)];
    if (g.periodic_x) {
      lo = g.xf[i] - 0.5 * g.dx[(i - 1 + g.nx) % g.nx];
      hi = g.xf[i] + 0.5 * g.dx[i];
    }
    double a = std::max(lo, x0), b = std::min(hi, x1);
    if (b > a) {
      total += g_values[i] * (b - a);
      any = true;
    }
  }
  // periodic wrap: the half strip of column 0 below xf[0] belongs to the far end
  if (g.periodic_x) {
    double lo = g.xf[g.nx] - 0.5 * g.dx[g.nx - 1], hi = g.xf[g.nx];
    double a = std::max(lo, x0), b = std::min(hi, x1);
    if (b > a) {
      total += g_values[0] * (b - a);
      any = true;
    }
  }
  require(any, "boundary integral: empty edge window");
  return total;
}

double max_abs_divergence(const FlowState& s, const MacGrid& g) {
  auto d = discrete_divergence(s, g);
  double m = 0.0;
  for (double v : d.raw()) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs_velocity(const FlowState& s, const MacGrid& g) {
  double m = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      if (u_present(g, i, j)) m = std::max(m, std::fabs(s.u(i, j)));
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (v_present(g, i, j)) m = std::max(m, std::fabs(s.v(i, j)));
  return m;
}

double velocity_l2_sq(const FlowState& s, const MacGrid& g, bool omega_only) {
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    if (omega_only && g.yc[j] < 0) continue;
    for (int i = 0; i <= g.nx; ++i) {
      if (!u_present(g, i, j)) continue;
      if (g.periodic_x && i == g.nx) continue;
      acc += s.u(i, j) * s.u(i, j) * g.u_col_width(i) * g.dy[j];
    }
  }
  for (int j = 0; j <= g.ny; ++j) {
    double w = 0.0;
    if (j > 0 && (!omega_only || g.yc[j - 1] >= 0)) w += 0.5 * g.dy[j - 1];
    if (j < g.ny && (!omega_only || g.yc[j] >= 0)) w += 0.5 * g.dy[j];
    if (w == 0.0) continue;
    for (int i = 0; i < g.nx; ++i) {
      if (!v_present(g, i, j)) continue;
      acc += s.v(i, j) * s.v(i, j) * g.dx[i] * w;
    }
  }
  return acc;
}

double velocity_l2(const FlowState& s, const MacGrid& g, bool omega_only) {
  return std::sqrt(velocity_l2_sq(s, g, omega_only));
}

double pressure_l2_zero_mean(const FlowState& s, const MacGrid& g, bool omega_only) {
  double vol = 0.0, mean = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    if (omega_only && g.yc[j] < 0) continue;
    for (int i = 0; i < g.nx; ++i) {
      if (g.mask(i, j) == CellKind::Solid) continue;
      double v = g.dx[i] * g.dy[j];
      vol += v;
      mean += s.p(i, j) * v;
    }
  }
  if (vol == 0) return 0.0;
  mean /= vol;
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    if (omega_only && g.yc[j] < 0) continue;
    for (int i = 0; i < g.nx; ++i) {
      if (g.mask(i, j) == CellKind::Solid) continue;
      double d = s.p(i, j) - mean;
      acc += d * d * g.dx[i] * g.dy[j];
    }
  }
  return std::sqrt(acc);
}

void project_pressure_zero_mean(FlowState& s, const MacGrid& g) {
  double vol = 0.0, mean = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (g.mask(i, j) == CellKind::Solid) continue;
      double v = g.dx[i] * g.dy[j];
      vol += v;
      mean += s.p(i, j) * v;
    }
  if (vol == 0) return;
  mean /= vol;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.mask(i, j) != CellKind::Solid) s.p(i, j) -= mean;
}

double body_force_work(const FlowState& s, const MacGrid& g,
                       const std::function<double(double, double)>& fx,
                       const std::function<double(double, double)>& fy) {
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      if (!u_present(g, i, j)) continue;
      if (g.periodic_x && i == g.nx) continue;
      if (fx) acc += fx(g.xf[i], g.yc[j]) * s.u(i, j) * g.u_col_width(i) * g.dy[j];
    }
  for (int j = 0; j <= g.ny; ++j) {
    double w = (j > 0 ? 0.5 * g.dy[j - 1] : 0.0) + (j < g.ny ? 0.5 * g.dy[j] : 0.0);
    for (int i = 0; i < g.nx; ++i) {
      if (!v_present(g, i, j)) continue;
      if (fy) acc += fy(g.xc[i], g.yf[j]) * s.v(i, j) * g.dx[i] * w;
    }
  }
  return acc;
}

FlowState restrict_to_omega(const FlowState& s, const MacGrid& composite,
                            const MacGrid& omega) {
  require_conforming(s, composite);
  require(composite.nx == omega.nx, "restrict: x resolutions differ");
  int j0 = composite.jzero;
  require(composite.ny - j0 == omega.ny, "restrict: Omega row counts differ");
  for (int j = 0; j < omega.ny; ++j)
    require(std::fabs(composite.yf[j0 + j + 1] - omega.yf[j + 1]) < 1e-12,
            "restrict: Omega rows do not coincide");
  FlowState out(omega);
  for (int j = 0; j < omega.ny; ++j)
    for (int i = 0; i <= omega.nx; ++i) out.u(i, j) = s.u(i, j0 + j);
  for (int j = 0; j <= omega.ny; ++j)
    for (int i = 0; i < omega.nx; ++i) out.v(i, j) = s.v(i, j0 + j);
  for (int j = 0; j < omega.ny; ++j)
    for (int i = 0; i < omega.nx; ++i) out.p(i, j) = s.p(i, j0 + j);
  return out;
}

}  // namespace wl
