#pragma once

#include "walllaw/thinlayer.hpp"
#include "walllaw/walllaw.hpp"

namespace wl {

// One sweep member: the thin-layer solve at a given eps compared against
// the limit wall-law solve on the shared Omega rows.
struct SweepRow {
  double eps = 0.0;
  double phi_eps = 0.0;   // Phi^eps(u^eps) (= G^eps at u^eps, F^eps being 0)
  double g_eps = 0.0;     // limit functional G0 evaluated at u^eps|_Omega
  double l2_err_u = 0.0;  // ||u^eps - u0||_L2(Omega)
  double l2_err_p = 0.0;  // ||p^eps - p0||_L2(Omega)/R
  int cg_iters = 0;
  int picard_iters = 0;
  bool failed = false;
  std::string failure;
};

struct RateFit {
  double alpha = 0.0;
  double c = 0.0;
  double residual = 0.0;  // RMS residual of the log-log fit
  bool defined = false;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double g0 = 0.0;  // G0(u0)
  FlowState limit_state;
  MacGrid omega_grid;
  RateFit rate;
  BoundsReport bounds;
  bool all_ok = true;
};

struct SweepProblem {
  DomainSpec domain;     // layer profile carried here; eps set per member
  double nu = 1.0;
  BodyForce f;
  WallLawSpec spec;
  NsMode ns_mode = NsMode::Stokes;
};

// Solve the limit problem once, then the thin-layer problem per eps;
// compare fields and energies. eps_list must be strictly decreasing with at
// least 3 entries, each resolvable with >= 8 layer rows.
SweepReport run_sweep(const SweepProblem& prob, const std::vector<double>& eps_list,
                      const Resolution& res, const SolverConfig& cfg, int jobs = 1);

// Least-squares fit of log(err) = log(c) + alpha*log(eps).
RateFit estimate_rate(const std::vector<double>& eps, const std::vector<double>& err);
RateFit estimate_rate(const SweepReport& report);

}  // namespace wl
