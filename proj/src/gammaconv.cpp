#include "walllaw/gammaconv.hpp"

#include <cmath>
#include <future>

namespace wl {

namespace {

SweepRow run_member(const SweepProblem& prob, double eps, const Resolution& res,
                    const SolverConfig& cfg, const MacGrid& omega,
                    const FlowState& limit_state, double nu, BoundsRow* bounds) {
  SweepRow row;
  row.eps = eps;
  try {
    ThinLayerProblem tl;
    tl.domain = prob.domain;
    tl.domain.has_layer = true;
    tl.domain.layer.eps = eps;
    tl.nu = prob.nu;
    tl.f = prob.f;
    tl.ns_mode = prob.ns_mode;
    ThinLayerResult r = solve_thin_layer(tl, res, cfg);
    row.cg_iters = r.stats.cg_iters;
    row.picard_iters = r.stats.picard_iters;
    row.phi_eps = phi_eps_energy(r.state, tl, r.grid);

    FlowState restricted = restrict_to_omega(r.state, r.grid, omega);
    // Gamma2 trace of u^eps: interpolate across y = 0.
    int jz = r.grid.jzero;
    restricted.gamma2_trace_u.assign(omega.nx + 1, 0.0);
    double yb = r.grid.yc[jz - 1], ya = r.grid.yc[jz];
    double t = (0.0 - yb) / (ya - yb);
    for (int i = 0; i <= omega.nx; ++i) {
      double ub = r.state.u(i, jz - 1), ua = r.state.u(i, jz);
      restricted.gamma2_trace_u[i] = ub + t * (ua - ub);
    }
    row.g_eps = g0_energy(restricted, nu, prob.spec, omega);

    FlowState diff(omega);
    for (int j = 0; j < omega.ny; ++j)
      for (int i = 0; i <= omega.nx; ++i)
        diff.u(i, j) = restricted.u(i, j) - limit_state.u(i, j);
    for (int j = 0; j <= omega.ny; ++j)
      for (int i = 0; i < omega.nx; ++i)
        diff.v(i, j) = restricted.v(i, j) - limit_state.v(i, j);
    FlowState pz_eps = restricted, pz_lim = limit_state;
    project_pressure_zero_mean(pz_eps, omega);
    project_pressure_zero_mean(pz_lim, omega);
    for (int j = 0; j < omega.ny; ++j)
      for (int i = 0; i < omega.nx; ++i)
        diff.p(i, j) = pz_eps.p(i, j) - pz_lim.p(i, j);
    row.l2_err_u = velocity_l2(diff, omega);
    row.l2_err_p = pressure_l2_zero_mean(diff, omega);

    if (bounds) {
      bounds->eps = eps;
      bounds->phi = row.phi_eps;
      bounds->u_l2_sq = velocity_l2_sq(r.state, r.grid);
      bounds->p_l2 = pressure_l2_zero_mean(r.state, r.grid);
    }
  } catch (const Error& e) {
    row.failed = true;
    row.failure = e.what();
  }
  return row;
}

}  // namespace

SweepReport run_sweep(const SweepProblem& prob, const std::vector<double>& eps_list,
                      const Resolution& res, const SolverConfig& cfg, int jobs) {
  require(eps_list.size() >= 3, "sweep: need at least 3 eps values");
  for (size_t k = 1; k < eps_list.size(); ++k)
    require(eps_list[k] < eps_list[k - 1], "sweep: eps values must be strictly decreasing");
  require(res.layer_rows >= 8, "sweep: layer must be resolved by >= 8 rows");

  SweepReport rep;
  DomainSpec omega_spec = prob.domain;
  omega_spec.has_layer = false;
  rep.omega_grid = build_domain_grid(omega_spec, res.nx, res.ny, res.grading);
  auto [u0, stats0] = solve_limit(prob.f, prob.nu, prob.spec, prob.ns_mode,
                                  rep.omega_grid, cfg);
  rep.limit_state = u0;
  rep.g0 = g0_energy(u0, prob.nu, prob.spec, rep.omega_grid);

  size_t n = eps_list.size();
  rep.rows.resize(n);
  std::vector<BoundsRow> brows(n);
  if (jobs <= 1) {
    for (size_t k = 0; k < n; ++k)
      rep.rows[k] = run_member(prob, eps_list[k], res, cfg, rep.omega_grid,
                               rep.limit_state, prob.nu, &brows[k]);
  } else {
    std::vector<std::future<SweepRow>> futs(n);
    for (size_t k = 0; k < n; ++k)
      futs[k] = std::async(std::launch::async, run_member, std::cref(prob),
                           eps_list[k], std::cref(res), std::cref(cfg),
                           std::cref(rep.omega_grid), std::cref(rep.limit_state),
                           prob.nu, &brows[k]);
    for (size_t k = 0; k < n; ++k) rep.rows[k] = futs[k].get();
  }
  for (const auto& r : rep.rows) rep.all_ok = rep.all_ok && !r.failed;
  std::vector<BoundsRow> ok_rows;
  for (size_t k = 0; k < n; ++k)
    if (!rep.rows[k].failed) ok_rows.push_back(brows[k]);
  if (ok_rows.size() >= 2) rep.bounds = check_a_priori_bounds(ok_rows);
  rep.rate = estimate_rate(rep);
  return rep;
}

RateFit estimate_rate(const std::vector<double>& eps, const std::vector<double>& err) {
  require(eps.size() == err.size(), "rate fit: size mismatch");
  require(eps.size() >= 3, "rate fit: need at least 3 samples");
  for (size_t k = 0; k < err.size(); ++k) {
    if (!(err[k] > 0) || !std::isfinite(err[k]) || !(eps[k] > 0))
      throw ParamError("rate fit: errors must be positive and finite");
  }
  size_t n = eps.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < n; ++k) {
    double x = std::log(eps[k]), y = std::log(err[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = n * sxx - sx * sx;
  require(std::fabs(denom) > 1e-30, "rate fit: degenerate abscissae");
  RateFit fit;
  fit.alpha = (n * sxy - sx * sy) / denom;
  double logc = (sy - fit.alpha * sx) / n;
  fit.c = std::exp(logc);
  double ss = 0;
  for (size_t k = 0; k < n; ++k) {
    double r = std::log(err[k]) - (logc + fit.alpha * std::log(eps[k]));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.defined = true;
  return fit;
}

RateFit estimate_rate(const SweepReport& report) {
  std::vector<double> eps, err;
  for (const auto& r : report.rows) {
    if (r.failed || !(r.l2_err_u > 0) || !std::isfinite(r.l2_err_u)) continue;
    eps.push_back(r.eps);
    err.push_back(r.l2_err_u);
  }
  if (eps.size() < 3) return RateFit{};  // undefined, flagged
  return estimate_rate(eps, err);
}

}  // namespace wl
