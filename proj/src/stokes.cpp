#include "walllaw/stokes.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace wl {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class FaceClass : unsigned char { Dead, Dof, Value };

struct DofMap {
  Array2<FaceClass> ucls, vcls;
  Array2<int> udof, vdof;
  Array2<double> uval, vval;  // imposed values on Value faces
  Array2<int> pid;
  int nvel = 0, np = 0;
  std::vector<std::array<int, 3>> faces;       // dof -> {comp, i, j}
  std::vector<std::pair<int, int>> pcells;     // pressure dof -> (i, j)
  std::vector<double> fvol;                    // control volume per vel dof
};

inline bool u_present(const MacGrid& g, int i, int j) {
  return g.fluid(i - 1, j) || g.fluid(i, j);
}
inline bool v_present(const MacGrid& g, int i, int j) {
  return g.fluid(i, j - 1) || g.fluid(i, j);
}

double pair_nu_row(const ViscosityField& visc, const MacGrid& g, int i, int j) {
  // average viscosity of fluid cells (i-1,j),(i,j)
  double sum = 0.0;
  int n = 0;
  for (int s = -1; s <= 0; ++s) {
    int iw = g.wrap_i(i + s);
    if (iw >= 0 && iw < g.nx && j >= 0 && j < g.ny && g.mask(iw, j) != CellKind::Solid) {
      sum += visc.nu(iw, j);
      ++n;
    }
  }
  return n ? sum / n : 0.0;
}

double pair_nu_col(const ViscosityField& visc, const MacGrid& g, int i, int j) {
  // average viscosity of fluid cells (i,j-1),(i,j)
  double sum = 0.0;
  int n = 0;
  int iw = g.wrap_i(i);
  for (int s = -1; s <= 0; ++s) {
    int jc = j + s;
    if (iw >= 0 && iw < g.nx && jc >= 0 && jc < g.ny && g.mask(iw, jc) != CellKind::Solid) {
      sum += visc.nu(iw, jc);
      ++n;
    }
  }
  return n ? sum / n : 0.0;
}

inline double harmonic(double d1, double nu1, double d2, double nu2) {
  if (nu1 <= 0) return nu2;
  if (nu2 <= 0) return nu1;
  return (d1 + d2) / (d1 / nu1 + d2 / nu2);
}

DofMap build_dof_map(const MacGrid& g, const BoundaryCondition& bc) {
  DofMap m;
  m.ucls = Array2<FaceClass>(g.nx + 1, g.ny, FaceClass::Dead);
  m.vcls = Array2<FaceClass>(g.nx, g.ny + 1, FaceClass::Dead);
  m.udof = Array2<int>(g.nx + 1, g.ny, -1);
  m.vdof = Array2<int>(g.nx, g.ny + 1, -1);
  m.uval = Array2<double>(g.nx + 1, g.ny, 0.0);
  m.vval = Array2<double>(g.nx, g.ny + 1, 0.0);
  m.pid = Array2<int>(g.nx, g.ny, -1);

  int iu_end = g.periodic_x ? g.nx : g.nx + 1;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < iu_end; ++i) {
      bool fl = g.fluid(i - 1, j), fr = g.fluid(i, j);
      if (!fl && !fr) continue;
      if (fl && fr) {
        m.ucls(i, j) = FaceClass::Dof;
        m.udof(i, j) = m.nvel;
        m.fvol.push_back(g.u_col_width(i) * g.dy[j]);
        m.faces.push_back({0, i, j});
        ++m.nvel;
        continue;
      }
      bool outer_left = (!g.periodic_x && i == 0);
      bool outer_right = (!g.periodic_x && i == g.nx);
      EdgeTag tag = outer_left ? g.edge_left : outer_right ? g.edge_right
                                                           : EdgeTag::Dirichlet;
      if ((outer_left || outer_right) && tag == EdgeTag::TractionFree) {
        m.ucls(i, j) = FaceClass::Dof;
        m.udof(i, j) = m.nvel;
        m.fvol.push_back(g.u_col_width(i) * g.dy[j]);
        m.faces.push_back({0, i, j});
        ++m.nvel;
      } else {
        m.ucls(i, j) = FaceClass::Value;
        m.uval(i, j) = bc.ubc(g.xf[i], g.yc[j]);
      }
    }
    if (g.periodic_x) {
      m.ucls(g.nx, j) = m.ucls(0, j);
      m.udof(g.nx, j) = m.udof(0, j);
      m.uval(g.nx, j) = m.uval(0, j);
    }
  }

  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      bool fb = g.fluid(i, j - 1), ft = g.fluid(i, j);
      if (!fb && !ft) continue;
      if (fb && ft) {
        m.vcls(i, j) = FaceClass::Dof;
        m.vdof(i, j) = m.nvel;
        double wy = 0.5 * ((j > 0 ? g.dy[j - 1] : 0.0) + (j < g.ny ? g.dy[j] : 0.0));
        m.fvol.push_back(g.dx[i] * wy);
        m.faces.push_back({1, i, j});
        ++m.nvel;
        continue;
      }
      EdgeTag tag = (j == 0)      ? g.edge_bottom
                    : (j == g.ny) ? g.edge_top
                                  : EdgeTag::Dirichlet;
      if ((j == 0 || j == g.ny) && tag == EdgeTag::TractionFree) {
        m.vcls(i, j) = FaceClass::Dof;
        m.vdof(i, j) = m.nvel;
        double wy = 0.5 * ((j > 0 ? g.dy[j - 1] : 0.0) + (j < g.ny ? g.dy[j] : 0.0));
        m.fvol.push_back(g.dx[i] * wy);
        m.faces.push_back({1, i, j});
        ++m.nvel;
      } else {
        m.vcls(i, j) = FaceClass::Value;
        m.vval(i, j) = bc.vbc(g.xc[i], g.yf[j]);
      }
    }

  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.mask(i, j) != CellKind::Solid) {
        m.pid(i, j) = m.np++;
        m.pcells.emplace_back(i, j);
      }
  return m;
}

// One two-point energy term: E += w * (c1 q1 + c2 q2 - g)^2 where q are
// velocity unknowns or imposed values (already folded into g).
struct VTerm {
  int d1 = -1, d2 = -1;
  double c1 = 0.0, c2 = 0.0;
  double g = 0.0;
  double w = 0.0;
  bool slip = false;
  int slip_col = -1;
  double slip_beta = 0.0, slip_nu = 0.0, slip_dy = 0.0, width = 0.0;
};

// Enumerate every term of the discrete viscous energy, Dirichlet data folded.
template <typename Sink>
void enumerate_viscous(const MacGrid& g, const ViscosityField& visc,
                       const BoundaryCondition& bc, const DofMap& m, Sink&& sink) {
  auto fold_u = [&](int i, int j, double c, VTerm& t) {
    int iw = (g.periodic_x && i >= g.nx) ? 0 : i;
    if (m.ucls(iw, j) == FaceClass::Dof) {
      if (t.d1 < 0) {
        t.d1 = m.udof(iw, j);
        t.c1 = c;
      } else {
        t.d2 = m.udof(iw, j);
        t.c2 = c;
      }
    } else {
      t.g -= c * m.uval(iw, j);
    }
  };
  auto fold_v = [&](int i, int j, double c, VTerm& t) {
    int iw = g.wrap_i(i);
    if (m.vcls(iw, j) == FaceClass::Dof) {
      if (t.d1 < 0) {
        t.d1 = m.vdof(iw, j);
        t.c1 = c;
      } else {
        t.d2 = m.vdof(iw, j);
        t.c2 = c;
      }
    } else {
      t.g -= c * m.vval(iw, j);
    }
  };

  // Cell terms (du/dx and dv/dy).
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (g.mask(i, j) == CellKind::Solid) continue;
      if (visc.nu(i, j) <= 0) throw ParamError("viscosity must be positive on fluid cells");
      double vol = g.dx[i] * g.dy[j];
      {
        VTerm t;
        t.w = visc.nu(i, j) * vol;
        fold_u(i + 1, j, 1.0 / g.dx[i], t);
        fold_u(i, j, -1.0 / g.dx[i], t);
        sink(t);
      }
      {
        VTerm t;
        t.w = visc.nu(i, j) * vol;
        fold_v(i, j + 1, 1.0 / g.dy[j], t);
        fold_v(i, j, -1.0 / g.dy[j], t);
        sink(t);
      }
    }

  // Vertical u-gradient terms with wall/stair/slip closures.
  int iu_end = g.periodic_x ? g.nx : g.nx + 1;
  for (int i = 0; i < iu_end; ++i) {
    auto widthL = [&](int ra, int rb) {
      double w = 0.0;
      int il = g.wrap_i(i - 1), ir = g.wrap_i(i);
      if ((g.fluid(i - 1, ra) || g.fluid(i - 1, rb)) && il >= 0 && il < g.nx)
        w += 0.5 * g.dx[il];
      if ((g.fluid(i, ra) || g.fluid(i, rb)) && ir >= 0 && ir < g.nx)
        w += 0.5 * g.dx[ir];
      return w;
    };
    int j = 0;
    while (j < g.ny) {
      if (!u_present(g, i, j)) {
        ++j;
        continue;
      }
      int a = j;
      while (j < g.ny && u_present(g, i, j)) ++j;
      int b = j - 1;
      for (int r = a + 1; r <= b; ++r) {
        double db = 0.5 * g.dy[r - 1], da = 0.5 * g.dy[r];
        double nun = harmonic(db, pair_nu_row(visc, g, i, r - 1), da,
                              pair_nu_row(visc, g, i, r));
        double d = db + da;
        VTerm t;
        t.w = nun * widthL(r - 1, r) * d;
        fold_u(i, r, 1.0 / d, t);
        fold_u(i, r - 1, -1.0 / d, t);
        sink(t);
      }
      // Bottom closure of the run.
      bool bottom_edge = (a == 0);
      EdgeTag btag = bottom_edge ? g.edge_bottom : EdgeTag::Dirichlet;
      bool slip_here = bottom_edge && btag == EdgeTag::Gamma2 &&
                       bc.bottom == BottomKind::Slip;
      if (slip_here) {
        require(static_cast<int>(bc.slip_beta.size()) >= iu_end,
                "slip_beta array shorter than Gamma2 face count");
        double beta = bc.slip_beta[i];
        require(beta >= 0 || beta == kInf, "slip beta must be nonnegative");
        double nu_wall = pair_nu_row(visc, g, i, 0);
        double beta_eff = (beta == 0.0) ? 0.0
                                        : 1.0 / (1.0 / beta + g.dy[0] / (2.0 * nu_wall));
        if (beta_eff > 0) {
          VTerm t;
          t.w = beta_eff * widthL(a, a);
          fold_u(i, 0, 1.0, t);
          t.slip = true;
          t.slip_col = i;
          t.slip_beta = beta;
          t.slip_nu = nu_wall;
          t.slip_dy = g.dy[0];
          t.width = widthL(a, a);
          sink(t);
        }
      } else if (!bottom_edge || btag == EdgeTag::Dirichlet ||
                 (btag == EdgeTag::Gamma2 && bc.bottom == BottomKind::Dirichlet)) {
        double nun = pair_nu_row(visc, g, i, a);
        VTerm t;
        t.w = nun * widthL(a, a) * 2.0 / g.dy[a];
        fold_u(i, a, 1.0, t);
        t.g += bc.ubc(g.xf[g.periodic_x && i >= g.nx ? 0 : i], g.yf[a]);
        sink(t);
      }  // TractionFree: no closure
      // Top closure of the run.
      bool top_edge = (b == g.ny - 1);
      EdgeTag ttag = top_edge ? g.edge_top : EdgeTag::Dirichlet;
      if (!top_edge || ttag == EdgeTag::Dirichlet || ttag == EdgeTag::Gamma2) {
        double nun = pair_nu_row(visc, g, i, b);
        VTerm t;
        t.w = nun * widthL(b, b) * 2.0 / g.dy[b];
        fold_u(i, b, 1.0, t);
        t.g += bc.ubc(g.xf[g.periodic_x && i >= g.nx ? 0 : i], g.yf[b + 1]);
        sink(t);
      }
    }
  }

  // Horizontal v-gradient terms with wall/stair closures.
  for (int j = 0; j <= g.ny; ++j) {
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
      double nun = harmonic(dl, pair_nu_col(visc, g, il, j), dr,
                            pair_nu_col(visc, g, ir, j));
      double d = dl + dr;
      VTerm t;
      t.w = nun * height(il, ir) * d;
      fold_v(ir, j, 1.0 / d, t);
      fold_v(il, j, -1.0 / d, t);
      sink(t);
    };
    auto present = [&](int i) { return v_present(g, g.wrap_i(i), j); };
    if (g.periodic_x) {
      bool all = true;
      for (int i = 0; i < g.nx && all; ++i) all = present(i);
      if (all) {
        for (int i = 0; i < g.nx; ++i) pair_term(i == 0 ? g.nx - 1 : i - 1, i);
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
      for (int r = a + 1; r <= b; ++r) pair_term(r - 1, r);
      // Left closure.
      bool left_edge = (a == 0 && !g.periodic_x);
      EdgeTag ltag = left_edge ? g.edge_left : EdgeTag::Dirichlet;
      if (!left_edge || ltag == EdgeTag::Dirichlet) {
        double nun = pair_nu_col(visc, g, a, j);
        VTerm t;
        t.w = nun * height(a, a) * 2.0 / g.dx[a];
        fold_v(a, j, 1.0, t);
        t.g += bc.vbc(g.xf[a], g.yf[j]);
        sink(t);
      }
      // Right closure.
      bool right_edge = (b == g.nx - 1 && !g.periodic_x);
      EdgeTag rtag = right_edge ? g.edge_right : EdgeTag::Dirichlet;
      if (!right_edge || rtag == EdgeTag::Dirichlet) {
        double nun = pair_nu_col(visc, g, b, j);
        VTerm t;
        t.w = nun * height(b, b) * 2.0 / g.dx[b];
        fold_v(b, j, 1.0, t);
        t.g += bc.vbc(g.xf[b + 1], g.yf[j]);
        sink(t);
      }
    }
  }
}

struct Assembled {
  DofMap dofs;
  SpMat A;        // nvel x nvel, SPD
  VectorXd rhs;   // Dirichlet elimination contributions
  SpMat G;        // nvel x np (pressure gradient), G = -D^T
  SpMat D;        // np x nvel (integrated divergence)
  VectorXd div_bc;
  VectorXd cell_vol, precond;  // per pressure dof
};

Assembled assemble(const MacGrid& g, const ViscosityField& visc,
                   const BoundaryCondition& bc) {
  Assembled as;
  as.dofs = build_dof_map(g, bc);
  const DofMap& m = as.dofs;
  std::vector<Trip> ta;
  as.rhs = VectorXd::Zero(m.nvel);
  enumerate_viscous(g, visc, bc, m, [&](const VTerm& t) {
    if (t.d1 >= 0) {
      ta.emplace_back(t.d1, t.d1, t.w * t.c1 * t.c1);
      as.rhs[t.d1] += t.w * t.c1 * t.g;
    }
    if (t.d2 >= 0) {
      ta.emplace_back(t.d2, t.d2, t.w * t.c2 * t.c2);
      as.rhs[t.d2] += t.w * t.c2 * t.g;
    }
    if (t.d1 >= 0 && t.d2 >= 0) {
      ta.emplace_back(t.d1, t.d2, t.w * t.c1 * t.c2);
      ta.emplace_back(t.d2, t.d1, t.w * t.c1 * t.c2);
    }
  });
  as.A = SpMat(m.nvel, m.nvel);
  as.A.setFromTriplets(ta.begin(), ta.end());

  std::vector<Trip> td;
  as.div_bc = VectorXd::Zero(m.np);
  as.cell_vol = VectorXd::Zero(m.np);
  as.precond = VectorXd::Zero(m.np);
  for (int c = 0; c < m.np; ++c) {
    auto [i, j] = m.pcells[c];
    as.cell_vol[c] = g.dx[i] * g.dy[j];
    as.precond[c] = visc.nu(i, j) / as.cell_vol[c];
    auto add_u = [&](int fi, int fj, double s) {
      int iw = (g.periodic_x && fi >= g.nx) ? 0 : fi;
      if (m.ucls(iw, fj) == FaceClass::Dof)
        td.emplace_back(c, m.udof(iw, fj), s);
      else
        as.div_bc[c] -= s * m.uval(iw, fj);
    };
    auto add_v = [&](int fi, int fj, double s) {
      if (m.vcls(fi, fj) == FaceClass::Dof)
        td.emplace_back(c, m.vdof(fi, fj), s);
      else
        as.div_bc[c] -= s * m.vval(fi, fj);
    };
    add_u(i + 1, j, g.dy[j]);
    add_u(i, j, -g.dy[j]);
    add_v(i, j + 1, g.dx[i]);
    add_v(i, j, -g.dx[i]);
  }
  as.D = SpMat(m.np, m.nvel);
  as.D.setFromTriplets(td.begin(), td.end());
  as.G = -SpMat(as.D.transpose());
  return as;
}

VectorXd body_force_vector(const MacGrid& g, const DofMap& m, const BodyForce& f) {
  VectorXd b = VectorXd::Zero(m.nvel);
  for (int d = 0; d < m.nvel; ++d) {
    auto [comp, i, j] = m.faces[d];
    double val = 0.0;
    if (comp == 0) {
      if (f.fx) val += f.fx(g.xf[i], g.yc[j]);
      if (!f.extra_u.empty()) val += f.extra_u(i, j);
    } else {
      if (f.fy) val += f.fy(g.xc[i], g.yf[j]);
      if (!f.extra_v.empty()) val += f.extra_v(i, j);
    }
    b[d] = val * m.fvol[d];
  }
  return b;
}

// ---- Advection -----------------------------------------------------------

struct AdvTrip {
  int row;          // velocity dof
  int comp, i, j;   // column face
  double coef;      // volume-integrated
};

// Centered (a.grad)u stencil rows at interior faces, volume-integrated.
std::vector<AdvTrip> build_advection(const MacGrid& g, const DofMap& m,
                                     const FlowState& a, bool drop_layer) {
  std::vector<AdvTrip> trips;
  auto layer_face_u = [&](int i, int j) {
    return g.cell(i - 1, j) == CellKind::FluidLayer &&
           g.cell(i, j) == CellKind::FluidLayer;
  };
  auto layer_face_v = [&](int i, int j) {
    return g.cell(i, j - 1) == CellKind::FluidLayer &&
           g.cell(i, j) == CellKind::FluidLayer;
  };
  auto deriv3 = [](double dm, double dp, double& cm, double& c0, double& cp) {
    cm = -dp / (dm * (dm + dp));
    cp = dm / (dp * (dm + dp));
    c0 = -(cm + cp);
  };
  for (int d = 0; d < m.nvel; ++d) {
    auto [comp, i, j] = m.faces[d];
    if (comp == 0) {
      if (!(g.fluid(i - 1, j) && g.fluid(i, j))) continue;
      if (drop_layer && layer_face_u(i, j)) continue;
      double V = m.fvol[d];
      double a1 = a.u(i, j);
      int il = g.wrap_i(i - 1), ir = g.wrap_i(i);
      // interpolate v to the u-face
      double tx = g.dx[il] / (g.dx[il] + g.dx[ir]);
      double vb = (1 - tx) * a.v(il, j) + tx * a.v(ir, j);
      double vt = (1 - tx) * a.v(il, j + 1) + tx * a.v(ir, j + 1);
      double a2 = 0.5 * (vb + vt);
      // du/dx: columns i-1, i, i+1
      {
        double dm = g.dx[il], dp = g.dx[ir];
        double cm, c0, cp;
        deriv3(dm, dp, cm, c0, cp);
        trips.push_back({d, 0, i - 1, j, V * a1 * cm});
        trips.push_back({d, 0, i, j, V * a1 * c0});
        trips.push_back({d, 0, i + 1, j, V * a1 * cp});
      }
      // du/dy
      bool below = j > 0 && u_present(g, i, j - 1);
      bool above = j < g.ny - 1 && u_present(g, i, j + 1);
      if (below && above) {
        double dm = g.yc[j] - g.yc[j - 1], dp = g.yc[j + 1] - g.yc[j];
        double cm, c0, cp;
        deriv3(dm, dp, cm, c0, cp);
        trips.push_back({d, 0, i, j - 1, V * a2 * cm});
        trips.push_back({d, 0, i, j, V * a2 * c0});
        trips.push_back({d, 0, i, j + 1, V * a2 * cp});
      } else if (above) {
        double dp = g.yc[j + 1] - g.yc[j];
        trips.push_back({d, 0, i, j + 1, V * a2 / dp});
        trips.push_back({d, 0, i, j, -V * a2 / dp});
      } else if (below) {
        double dm = g.yc[j] - g.yc[j - 1];
        trips.push_back({d, 0, i, j, V * a2 / dm});
        trips.push_back({d, 0, i, j - 1, -V * a2 / dm});
      }
    } else {
      if (!(g.fluid(i, j - 1) && g.fluid(i, j))) continue;
      if (drop_layer && layer_face_v(i, j)) continue;
      double V = m.fvol[d];
      double a2 = a.v(i, j);
      double ty = g.dy[j - 1] / (g.dy[j - 1] + g.dy[j]);
      double ul = (1 - ty) * a.u(i, j - 1) + ty * a.u(i, j);
      double ur = (1 - ty) * a.u(i + 1, j - 1) + ty * a.u(i + 1, j);
      double a1 = 0.5 * (ul + ur);
      // dv/dy: rows j-1, j, j+1 (v lives at yf; spacing dy[j-1], dy[j])
      {
        double dm = g.dy[j - 1];
        double dp = (j < g.ny) ? g.dy[j] : dm;
        bool below = j >= 1 && v_present(g, i, j - 1);
        bool above = j < g.ny && v_present(g, i, j + 1);
        if (below && above) {
          double cm, c0, cp;
          deriv3(dm, dp, cm, c0, cp);
          trips.push_back({d, 1, i, j - 1, V * a2 * cm});
          trips.push_back({d, 1, i, j, V * a2 * c0});
          trips.push_back({d, 1, i, j + 1, V * a2 * cp});
        } else if (above) {
          trips.push_back({d, 1, i, j + 1, V * a2 / dp});
          trips.push_back({d, 1, i, j, -V * a2 / dp});
        } else if (below) {
          trips.push_back({d, 1, i, j, V * a2 / dm});
          trips.push_back({d, 1, i, j - 1, -V * a2 / dm});
        }
      }
      // dv/dx columns i-1, i, i+1
      bool left = v_present(g, g.wrap_i(i - 1), j) && (g.periodic_x || i > 0);
      bool right = v_present(g, g.wrap_i(i + 1), j) && (g.periodic_x || i < g.nx - 1);
      if (left && right) {
        double dm = 0.5 * (g.dx[g.wrap_i(i - 1)] + g.dx[i]);
        double dp = 0.5 * (g.dx[i] + g.dx[g.wrap_i(i + 1)]);
        double cm, c0, cp;
        deriv3(dm, dp, cm, c0, cp);
        trips.push_back({d, 1, i - 1, j, V * a1 * cm});
        trips.push_back({d, 1, i, j, V * a1 * c0});
        trips.push_back({d, 1, i + 1, j, V * a1 * cp});
      } else if (right) {
        double dp = 0.5 * (g.dx[i] + g.dx[g.wrap_i(i + 1)]);
        trips.push_back({d, 1, i + 1, j, V * a1 / dp});
        trips.push_back({d, 1, i, j, -V * a1 / dp});
      } else if (left) {
        double dm = 0.5 * (g.dx[g.wrap_i(i - 1)] + g.dx[i]);
        trips.push_back({d, 1, i, j, V * a1 / dm});
        trips.push_back({d, 1, i - 1, j, -V * a1 / dm});
      }
    }
  }
  return trips;
}

double face_value(const FlowState& s, const MacGrid& g, int comp, int i, int j) {
  if (comp == 0) {
    int iw = (g.periodic_x) ? ((i % (g.nx)) + g.nx) % g.nx : i;
    return s.u(iw, j);
  }
  int iw = g.wrap_i(i);
  return s.v(iw, j);
}

// Apply the advection rows to a full state: y[dof] = sum coef * value(face).
VectorXd apply_advection(const std::vector<AdvTrip>& trips, const MacGrid& g,
                         const FlowState& s, int nvel) {
  VectorXd y = VectorXd::Zero(nvel);
  for (const auto& t : trips) y[t.row] += t.coef * face_value(s, g, t.comp, t.i, t.j);
  return y;
}

// y[col_dof] += coef * x[row]  (transpose application over dof columns only)
VectorXd apply_advection_transpose(const std::vector<AdvTrip>& trips, const MacGrid& g,
                                   const DofMap& m, const VectorXd& x) {
  VectorXd y = VectorXd::Zero(m.nvel);
  for (const auto& t : trips) {
    int dof = -1;
    if (t.comp == 0) {
      int iw = (g.periodic_x) ? ((t.i % g.nx) + g.nx) % g.nx : t.i;
      if (m.ucls(iw, t.j) == FaceClass::Dof) dof = m.udof(iw, t.j);
    } else {
      int iw = g.wrap_i(t.i);
      if (m.vcls(iw, t.j) == FaceClass::Dof) dof = m.vdof(iw, t.j);
    }
    if (dof >= 0) y[dof] += t.coef * x[t.row];
  }
  return y;
}

VectorXd state_to_vec(const FlowState& s, const DofMap& m) {
  VectorXd x(m.nvel);
  for (int d = 0; d < m.nvel; ++d) {
    auto [comp, i, j] = m.faces[d];
    x[d] = (comp == 0) ? s.u(i, j) : s.v(i, j);
  }
  return x;
}

// Skew-symmetrized convective right-hand side at the frozen field a.
VectorXd skew_advection_rhs(const std::vector<AdvTrip>& trips, const MacGrid& g,
                            const DofMap& m, const FlowState& a) {
  VectorXd b1 = apply_advection(trips, g, a, m.nvel);
  VectorXd ad = state_to_vec(a, m);
  VectorXd b2 = apply_advection_transpose(trips, g, m, ad);
  return 0.5 * (b1 - b2);
}

void fill_state(FlowState& s, const MacGrid& g, const DofMap& m, const VectorXd& x,
                const VectorXd& p) {
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      switch (m.ucls(i, j)) {
        case FaceClass::Dof:
          s.u(i, j) = x[m.udof(i, j)];
          break;
        case FaceClass::Value:
          s.u(i, j) = m.uval(i, j);
          break;
        case FaceClass::Dead:
          s.u(i, j) = 0.0;
          break;
      }
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      switch (m.vcls(i, j)) {
        case FaceClass::Dof:
          s.v(i, j) = x[m.vdof(i, j)];
          break;
        case FaceClass::Value:
          s.v(i, j) = m.vval(i, j);
          break;
        case FaceClass::Dead:
          s.v(i, j) = 0.0;
          break;
      }
    }
  s.p.fill(0.0);
  for (int c = 0; c < m.np; ++c) {
    auto [i, j] = m.pcells[c];
    s.p(i, j) = p[c];
  }
}

struct SaddleSolver {
  const MacGrid& g;
  Assembled as;
  Eigen::SimplicialLDLT<SpMat> ldlt;

  SaddleSolver(const MacGrid& grid, const ViscosityField& visc,
               const BoundaryCondition& bc)
      : g(grid), as(assemble(grid, visc, bc)) {
    if (as.dofs.nvel == 0) throw WellPosednessError("no velocity unknowns");
    ldlt.compute(as.A);
    if (ldlt.info() != Eigen::Success)
      throw WellPosednessError("viscous block factorization failed (singular constraint set?)");
  }

  // Solve A u + G p = b, D u = div_bc. Returns (u, p) and iteration count.
  std::tuple<VectorXd, VectorXd, int, double> solve(const VectorXd& b,
                                                    const SolverConfig& cfg) const {
    const int np = as.dofs.np;
    VectorXd w = ldlt.solve(b);
    // Schur system: (G^T A^-1 G) p = div_bc + G^T A^-1 b
    VectorXd rhs = as.div_bc + as.G.transpose() * w;
    auto project = [&](VectorXd& q) { q.array() -= q.mean(); };
    project(rhs);
    VectorXd p = VectorXd::Zero(np);
    VectorXd r = rhs;  // since p = 0
    auto prec = [&](const VectorXd& q) { return (q.array() * as.precond.array()).matrix().eval(); };
    VectorXd z = prec(r);
    VectorXd d = z;
    double rz = r.dot(z);
    int it = 0;
    double div_inf = 0.0;
    auto max_div = [&](const VectorXd& res) {
      double mx = 0.0;
      for (int c = 0; c < np; ++c) mx = std::max(mx, std::fabs(res[c] / as.cell_vol[c]));
      return mx;
    };
    div_inf = max_div(r);
    double tol = cfg.div_tol_abs;
    double rz0 = rz;
    while (div_inf > tol && it < cfg.max_cg_iters) {
      VectorXd Ad = as.G.transpose() * ldlt.solve(as.G * d);
      project(Ad);
      double dAd = d.dot(Ad);
      if (dAd <= 0 || !std::isfinite(dAd)) break;
      double alpha = rz / dAd;
      p += alpha * d;
      r -= alpha * Ad;
      project(r);
      z = prec(r);
      double rz_new = r.dot(z);
      d = z + (rz_new / rz) * d;
      rz = rz_new;
      ++it;
      div_inf = max_div(r);
      if (rz <= 1e-30 * rz0) break;  // stagnation floor
    }
    VectorXd u = ldlt.solve(b - as.G * p);
    return {u, p, it, div_inf};
  }
};

std::pair<FlowState, SolveStats> run_solver(const MacGrid& grid,
                                            const ViscosityField& visc,
                                            const BoundaryCondition& bc,
                                            const BodyForce& f, const SolverConfig& cfg,
                                            bool nonlinear) {
  cfg.validate();
  auto t0 = std::chrono::steady_clock::now();
  SaddleSolver solver(grid, visc, bc);
  const DofMap& m = solver.as.dofs;
  VectorXd b0 = body_force_vector(grid, m, f) + solver.as.rhs;

  FlowState state(grid);
  SolveStats stats;
  VectorXd u, p;

  auto do_solve = [&](const VectorXd& b) {
    auto [uu, pp, it, dres] = solver.solve(b, cfg);
    stats.cg_iters += it;
    stats.div_residual = dres;
    u = uu;
    p = pp;
    if (dres > std::max(cfg.div_tol_abs, cfg.linear_tol * (1.0 + u.lpNorm<Eigen::Infinity>())))
      throw ConvergenceError("pressure-Schur CG did not reach the divergence tolerance",
                             dres, stats.cg_iters);
  };

  do_solve(b0);
  stats.picard_iters = 1;

  if (nonlinear) {
    double theta = cfg.picard_damping;
    FlowState iterate(grid);
    fill_state(iterate, grid, m, u, p);
    double prev_delta = std::numeric_limits<double>::max();
    for (int k = 1; k < cfg.picard_max; ++k) {
      auto trips = build_advection(grid, m, iterate, cfg.drop_layer_advection);
      VectorXd badv = skew_advection_rhs(trips, grid, m, iterate);
      double bscale = 1.0 + b0.lpNorm<Eigen::Infinity>();
      if (badv.lpNorm<Eigen::Infinity>() <= 1e-14 * bscale) {
        stats.converged = true;
        break;  // advection vanishes identically; current state is the NS solution
      }
      do_solve(b0 - badv);
      ++stats.picard_iters;
      VectorXd xprev = state_to_vec(iterate, m);
      double delta = 0.0, scale = 0.0;
      for (int dd = 0; dd < m.nvel; ++dd) {
        delta += (u[dd] - xprev[dd]) * (u[dd] - xprev[dd]) * m.fvol[dd];
        scale += u[dd] * u[dd] * m.fvol[dd];
      }
      delta = std::sqrt(delta) / std::max(std::sqrt(scale), 1e-300);
      if (delta > prev_delta && theta > 1e-3) theta *= 0.5;
      prev_delta = delta;
      VectorXd blend = theta * u + (1 - theta) * xprev;
      fill_state(iterate, grid, m, blend, p);
      if (delta < cfg.picard_tol) {
        fill_state(iterate, grid, m, u, p);
        break;
      }
      if (k == cfg.picard_max - 1)
        throw ConvergenceError("Picard iteration did not converge", delta,
                               stats.picard_iters);
    }
  }

  fill_state(state, grid, m, u, p);
  project_pressure_zero_mean(state, grid);

  // Fill the Gamma2 trace for slip solves.
  if (bc.bottom == BottomKind::Slip && grid.edge_bottom == EdgeTag::Gamma2) {
    auto scales = slip_trace_scales(grid, visc, bc.slip_beta);
    state.gamma2_trace_u.assign(grid.nx + 1, 0.0);
    int iu_end = grid.periodic_x ? grid.nx : grid.nx + 1;
    for (int i = 0; i < iu_end; ++i)
      state.gamma2_trace_u[i] = scales[i] * state.u(i, 0);
    if (grid.periodic_x) state.gamma2_trace_u[grid.nx] = state.gamma2_trace_u[0];
  }

  // Momentum residual (with the final advection right-hand side when nonlinear).
  VectorXd bfin = b0;
  if (nonlinear) {
    auto trips = build_advection(grid, m, state, cfg.drop_layer_advection);
    bfin -= skew_advection_rhs(trips, grid, m, state);
  }
  VectorXd x = state_to_vec(state, m);
  VectorXd pv(m.np);
  for (int c = 0; c < m.np; ++c) pv[c] = state.p(m.pcells[c].first, m.pcells[c].second);
  stats.momentum_residual = (solver.as.A * x + solver.as.G * pv - bfin).norm() /
                            (1.0 + bfin.norm());
  stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {state, stats};
}

}  // namespace

void SolverConfig::validate() const {
  require(linear_tol > 0 && linear_tol < 1, "linear_tol must lie in (0,1)");
  require(picard_tol > 0 && picard_tol < 1, "picard_tol must lie in (0,1)");
  require(max_cg_iters >= 1 && picard_max >= 1, "iteration caps must be >= 1");
  require(picard_damping > 0 && picard_damping <= 1, "damping must lie in (0,1]");
  require(div_tol_abs > 0, "div_tol_abs must be positive");
}

std::pair<FlowState, SolveStats> solve_stokes(const MacGrid& grid,
                                              const ViscosityField& visc,
                                              const BoundaryCondition& bc,
                                              const BodyForce& f,
                                              const SolverConfig& cfg) {
  return run_solver(grid, visc, bc, f, cfg, false);
}

std::pair<FlowState, SolveStats> solve_navier_stokes(const MacGrid& grid,
                                                     const ViscosityField& visc,
                                                     const BoundaryCondition& bc,
                                                     const BodyForce& f,
                                                     const SolverConfig& cfg) {
  return run_solver(grid, visc, bc, f, cfg, true);
}

ViscousEnergySplit viscous_quadratic_form(const FlowState& s,
                                          const ViscosityField& visc,
                                          const BoundaryCondition& bc,
                                          const MacGrid& grid) {
  require_conforming(s, grid);
  DofMap m = build_dof_map(grid, bc);
  auto value = [&](int dof) {
    auto [comp, i, j] = m.faces[dof];
    return comp == 0 ? s.u(i, j) : s.v(i, j);
  };
  ViscousEnergySplit split;
  enumerate_viscous(grid, visc, bc, m, [&](const VTerm& t) {
    double q = -t.g;
    if (t.d1 >= 0) q += t.c1 * value(t.d1);
    if (t.d2 >= 0) q += t.c2 * value(t.d2);
    if (!t.slip) {
      split.bulk += t.w * q * q;
      return;
    }
    // Split the condensed slip mass into wall-segment viscous part and
    // beta * trace^2: beta_eff u0^2 = nu (u0-tr)^2 * 2/dy + beta tr^2.
    double u0 = q;  // c1 = 1, g = 0 for slip terms
    double scale = (t.slip_beta == kInf)
                       ? 0.0
                       : 1.0 / (1.0 + t.slip_beta * t.slip_dy / (2.0 * t.slip_nu));
    double tr = scale * u0;
    split.bulk += t.slip_nu * t.width * (u0 - tr) * (u0 - tr) * 2.0 / t.slip_dy;
    if (t.slip_beta != kInf) split.slip += t.slip_beta * tr * tr * t.width;
  });
  return split;
}

double advection_energy_pairing(const FlowState& a, const FlowState& u,
                                const MacGrid& grid, const BoundaryCondition& bc,
                                const ViscosityField& visc) {
  (void)visc;
  DofMap m = build_dof_map(grid, bc);
  auto trips = build_advection(grid, m, a, false);
  VectorXd badv = skew_advection_rhs(trips, grid, m, a);
  VectorXd ud = state_to_vec(u, m);
  return 2.0 * badv.dot(ud);
}

std::vector<double> slip_trace_scales(const MacGrid& grid, const ViscosityField& visc,
                                      const std::vector<double>& beta) {
  int n = grid.nx + 1;
  std::vector<double> scales(n, 0.0);
  int iu_end = grid.periodic_x ? grid.nx : grid.nx + 1;
  require(static_cast<int>(beta.size()) >= iu_end, "slip beta array too short");
  for (int i = 0; i < iu_end; ++i) {
    double nu_wall = pair_nu_row(visc, grid, i, 0);
    if (beta[i] == kInf) {
      scales[i] = 0.0;
    } else if (nu_wall <= 0) {
      scales[i] = 1.0;
    } else {
      scales[i] = 1.0 / (1.0 + beta[i] * grid.dy[0] / (2.0 * nu_wall));
    }
  }
  if (grid.periodic_x) scales[grid.nx] = scales[0];
  return scales;
}

// ---- public field-level operators (declared in fields.hpp) ---------------

std::pair<Array2<double>, Array2<double>> viscous_operator(const FlowState& s,
                                                           const ViscosityField& visc,
                                                           const BoundaryCondition& bc,
                                                           const MacGrid& g) {
  require_conforming(s, g);
  Assembled as = assemble(g, visc, bc);
  const DofMap& m = as.dofs;
  VectorXd x = state_to_vec(s, m);
  VectorXd y = as.A * x - as.rhs;
  Array2<double> ou(g.nx + 1, g.ny, 0.0), ov(g.nx, g.ny + 1, 0.0);
  for (int d = 0; d < m.nvel; ++d) {
    auto [comp, i, j] = m.faces[d];
    double val = y[d] / m.fvol[d];
    if (comp == 0) {
      ou(i, j) = val;
      if (g.periodic_x && i == 0) ou(g.nx, j) = val;
    } else {
      ov(i, j) = val;
    }
  }
  return {ou, ov};
}

std::pair<Array2<double>, Array2<double>> advection_term(const FlowState& a,
                                                         const FlowState& u,
                                                         const MacGrid& g) {
  require_conforming(a, g);
  require_conforming(u, g);
  BoundaryCondition bc;  // classification only; values unused here
  DofMap m = build_dof_map(g, bc);
  auto trips = build_advection(g, m, a, false);
  VectorXd y = apply_advection(trips, g, u, m.nvel);
  Array2<double> ou(g.nx + 1, g.ny, 0.0), ov(g.nx, g.ny + 1, 0.0);
  for (int d = 0; d < m.nvel; ++d) {
    auto [comp, i, j] = m.faces[d];
    double val = y[d] / m.fvol[d];
    if (comp == 0) {
      ou(i, j) = val;
      if (g.periodic_x && i == 0) ou(g.nx, j) = val;
    } else {
      ov(i, j) = val;
    }
  }
  return {ou, ov};
}

}  // namespace wl
