#include "walllaw/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int gamma2_faces(const MacGrid& g) { return g.periodic_x ? g.nx : g.nx + 1; }

std::vector<double> face_widths(const MacGrid& g) {
  int n = gamma2_faces(g);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = g.u_col_width(i);
  return w;
}

double l1_gamma2(const std::vector<double>& vals, const std::vector<double>& w) {
  double s = 0.0;
  for (size_t i = 0; i < w.size(); ++i) s += std::fabs(vals[i]) * w[i];
  return s;
}

std::vector<double> betas_from_h(const std::vector<double>& h, int n) {
  std::vector<double> beta(n, kInf);
  for (int i = 0; i < n; ++i) beta[i] = (h[i] > 0.0) ? 1.0 / h[i] : kInf;
  return beta;
}

}  // namespace

double energy_F(const std::vector<double>& h, const FlowState& state,
                const BodyForce& f, double nu, const MacGrid& grid) {
  require_conforming(state, grid);
  int n = gamma2_faces(grid);
  require(static_cast<int>(h.size()) >= n, "energy_F: h array too short");
  std::vector<double> trace(grid.nx + 1, 0.0);
  if (!state.gamma2_trace_u.empty()) trace = state.gamma2_trace_u;

  std::vector<double> integrand(grid.nx + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    if (h[i] <= 0.0) {
      if (std::fabs(trace[i]) > 0) return kInf;
      continue;
    }
    integrand[i] = trace[i] * trace[i] / h[i];
  }
  double boundary = boundary_integral(integrand, grid);

  ViscosityField visc = ViscosityField::uniform(grid, nu);
  BoundaryCondition bc;
  bc.bottom = BottomKind::Slip;
  bc.slip_beta.assign(grid.nx + 1, kInf);
  auto beta = betas_from_h(h, n);
  for (int i = 0; i < n; ++i) bc.slip_beta[i] = beta[i];
  if (grid.periodic_x) bc.slip_beta[grid.nx] = bc.slip_beta[0];
  double bulk = viscous_quadratic_form(state, visc, bc, grid).bulk;
  double adv = advection_energy_pairing(state, state, grid, bc, visc);
  double work = body_force_work(state, grid, f.fx, f.fy);
  return bulk + boundary + adv - 2.0 * work;
}

ControlState solve_control_fixed_point(double m, const BodyForce& f, double nu,
                                       double theta, double tol, int max_iters,
                                       const MacGrid& grid, const SolverConfig& cfg,
                                       NsMode mode) {
  require(m > 0, "control: mass budget m must be positive");
  require(theta > 0 && theta <= 1, "control: damping theta must lie in (0,1]");
  require(tol > 0 && tol < 1, "control: tolerance must lie in (0,1)");
  require(max_iters >= 1, "control: max_iters must be >= 1");
  require(grid.edge_bottom == EdgeTag::Gamma2, "control needs an Omega grid");

  int n = gamma2_faces(grid);
  auto widths = face_widths(grid);
  double glen = gamma2_length(grid);

  ControlState cs;
  cs.m = m;
  cs.h.assign(n, m / glen);

  auto solve_for = [&](const std::vector<double>& h) {
    auto b = betas_from_h(h, n);
    if (grid.periodic_x) b.push_back(b[0]);
    return solve_limit(f, nu, WallLawSpec::per_face(b), mode, grid, cfg);
  };

  auto [state, stats] = solve_for(cs.h);
  cs.state = state;
  cs.stats = stats;
  cs.iterations = 1;
  double F_cur = energy_F(cs.h, cs.state, f, nu, grid);
  cs.f_history.push_back(F_cur);

  auto update_from = [&](const FlowState& st, std::vector<double>& raw) -> bool {
    raw.assign(n, 0.0);
    double I1 = 0.0;
    for (int i = 0; i < n; ++i) I1 += std::fabs(st.gamma2_trace_u[i]) * widths[i];
    if (I1 <= 1e-300) return false;  // trace vanished: update undefined
    for (int i = 0; i < n; ++i)
      raw[i] = m * std::fabs(st.gamma2_trace_u[i]) / I1;
    return true;
  };

  for (int k = 1; k < max_iters; ++k) {
    std::vector<double> raw;
    if (!update_from(cs.state, raw)) {
      cs.inactive = true;
      cs.h.assign(n, m / glen);
      cs.converged = true;
      break;
    }
    // damped blend, mass renormalized exactly
    std::vector<double> cand(n);
    for (;;) {
      for (int i = 0; i < n; ++i) cand[i] = (1 - theta) * cs.h[i] + theta * raw[i];
      double mass = l1_gamma2(cand, widths);
      for (int i = 0; i < n; ++i) cand[i] *= m / mass;
      auto [st2, stats2] = solve_for(cand);
      double F_new = energy_F(cand, st2, f, nu, grid);
      cs.stats.cg_iters += stats2.cg_iters;
      if (F_new > F_cur + 1e-12 * (1.0 + std::fabs(F_cur)) && theta > 1e-3) {
        theta *= 0.5;  // energy rose: damp and retry from the same iterate
        continue;
      }
      double change = 0.0;
      for (int i = 0; i < n; ++i)
        change += std::fabs(cand[i] - cs.h[i]) * widths[i];
      change /= m;
      cs.h = cand;
      cs.state = st2;
      F_cur = F_new;
      cs.f_history.push_back(F_cur);
      ++cs.iterations;
      cs.converged = change < tol;
      break;
    }
    if (cs.converged) break;
    if (k == max_iters - 1)
      throw ConvergenceError("control fixed point did not converge", 0.0,
                             cs.iterations);
  }

  cs.f_value = F_cur;
  cs.mass_residual = std::fabs(l1_gamma2(cs.h, widths) - m);
  std::vector<double> raw;
  if (update_from(cs.state, raw)) {
    double res = 0.0;
    for (int i = 0; i < n; ++i) res += std::fabs(cs.h[i] - raw[i]) * widths[i];
    cs.update_residual = res;
  }
  return cs;
}

PerturbationResult linearized_perturbation(double m, const ControlState& um,
                                           const BodyForce& f, double nu,
                                           const MacGrid& grid,
                                           const SolverConfig& cfg, NsMode mode) {
  require(m > 0, "perturbation: m must be positive");
  require_conforming(um.state, grid);

  BodyForce src = f;
  if (mode == NsMode::NavierStokes) {
    auto [au, av] = advection_term(um.state, um.state, grid);
    src.extra_u = au;
    src.extra_v = av;
    for (auto& v : src.extra_u.raw()) v = -v;
    for (auto& v : src.extra_v.raw()) v = -v;
  }
  auto [u0m, stats] = solve_limit(src, nu, WallLawSpec::infinite(), NsMode::Stokes,
                                  grid, cfg);

  PerturbationResult out;
  out.stats = stats;
  out.v = FlowState(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i <= grid.nx; ++i)
      out.v.u(i, j) = (um.state.u(i, j) - u0m.u(i, j)) / m;
  for (int j = 0; j <= grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      out.v.v(i, j) = (um.state.v(i, j) - u0m.v(i, j)) / m;
  out.v.gamma2_trace_u.assign(grid.nx + 1, 0.0);
  for (int i = 0; i <= grid.nx; ++i)
    out.v.gamma2_trace_u[i] = um.state.gamma2_trace_u.empty()
                                  ? 0.0
                                  : um.state.gamma2_trace_u[i] / m;

  int n = gamma2_faces(grid);
  auto widths = face_widths(grid);
  out.tv = 0.0;
  for (int i = 0; i < n; ++i)
    out.tv += std::fabs(out.v.gamma2_trace_u[i]) * widths[i];

  ViscosityField unit = ViscosityField::uniform(grid, 1.0);
  double bulk = 0.5 * m * nu * dirichlet_energy(out.v, unit, grid);
  auto t0 = wall_traction_consistent(u0m, nu, grid);
  double pairing = 0.0;
  for (int i = 0; i < n; ++i)
    pairing += t0[i] * out.v.gamma2_trace_u[i] * widths[i];
  out.j_m = bulk + 0.5 * out.tv * out.tv + pairing;
  return out;
}

ConcentrationReport m_sweep(const std::vector<double>& m_list, const BodyForce& f,
                            double nu, const MacGrid& grid, const SolverConfig& cfg,
                            const ControlConfig& ctrl) {
  require(m_list.size() >= 3, "m sweep: need at least 3 entries");
  for (size_t k = 1; k < m_list.size(); ++k)
    require(m_list[k] < m_list[k - 1], "m sweep: entries must be strictly decreasing");

  ConcentrationReport rep;
  auto [u0, stats0] = solve_limit(f, nu, WallLawSpec::infinite(), ctrl.ns_mode,
                                  grid, cfg);
  rep.traction0 = tangential_traction(u0, nu, grid);
  int n = gamma2_faces(grid);
  auto widths = face_widths(grid);
  rep.m1 = 0.0;
  for (int i = 0; i < n; ++i) rep.m1 = std::max(rep.m1, std::fabs(rep.traction0[i]));
  if (rep.m1 <= 1e-14) {
    rep.degenerate = true;
    return rep;
  }
  for (int i = 0; i < n; ++i) {
    double t = rep.traction0[i];
    if (std::fabs(t - rep.m1) <= ctrl.band_delta * rep.m1 ||
        std::fabs(t + rep.m1) <= ctrl.band_delta * rep.m1) {
      rep.band_faces.push_back(i);
      rep.band_measure += widths[i];
    }
  }

  for (double m : m_list) {
    ConcentrationRow row;
    row.m = m;
    try {
      ControlState cs = solve_control_fixed_point(m, f, nu, ctrl.theta, ctrl.tol,
                                                  ctrl.max_iters, grid, cfg,
                                                  ctrl.ns_mode);
      row.f_value = cs.f_value;
      double work = body_force_work(cs.state, grid, f.fx, f.fy);
      row.work_identity_residual =
          std::fabs(cs.f_value + work) / (1.0 + std::fabs(work));
      row.mass_residual = cs.mass_residual;
      double band_mass = 0.0;
      for (int i : rep.band_faces) band_mass += cs.h[i] * widths[i];
      row.band_fraction = band_mass / m;
      double iu = 0.0;
      for (int i = 0; i < n; ++i)
        iu += std::fabs(cs.state.gamma2_trace_u[i]) * widths[i];
      row.int_abs_u_over_m = iu / m;
      row.moments.assign(3, 0.0);
      for (int i = 0; i < n; ++i) {
        double x = grid.xf[i], hw = cs.h[i] / m * widths[i];
        row.moments[0] += hw;
        row.moments[1] += hw * x;
        row.moments[2] += hw * x * x;
      }
      auto pert = linearized_perturbation(m, cs, f, nu, grid, cfg, ctrl.ns_mode);
      row.j_m = pert.j_m;
      row.tv_v = pert.tv;
    } catch (const Error& e) {
      row.failed = true;
      row.failure = e.what();
      rep.all_ok = false;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace wl
