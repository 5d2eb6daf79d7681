#pragma once

#include "walllaw/stokes.hpp"

namespace wl {

// The composite thin-layer problem on Omega u Gamma2 u Sigma_eps: viscosity
// nu on Omega, nu*eps in the layer, homogeneous Dirichlet on the whole
// outer boundary.
struct ThinLayerProblem {
  DomainSpec domain;  // must carry the layer profile
  double nu = 1.0;
  BodyForce f;
  NsMode ns_mode = NsMode::Stokes;

  void validate() const;
};

struct Resolution {
  int nx = 64;
  int ny = 64;          // Omega rows
  double grading = 1.0; // geometric vertical grading toward Gamma2
  int layer_rows = 10;  // uniform rows across the layer depth
};

struct ThinLayerResult {
  MacGrid grid;
  ViscosityField visc;
  FlowState state;
  SolveStats stats;
};

ThinLayerResult solve_thin_layer(const ThinLayerProblem& prob, const Resolution& res,
                                 const SolverConfig& cfg);

// Phi^eps(u) = nu int_Omega |grad u|^2 + nu*eps int_Sigma |grad u|^2,
// evaluated as dirichlet_energy with the composite viscosity weights.
double phi_eps_energy(const FlowState& s, const ThinLayerProblem& prob,
                      const MacGrid& grid);

// A-priori bound check across an eps sweep (Prop. "estim" as a bounded-
// ratio proxy): each quantity must vary by less than `max_ratio`.
struct BoundsRow {
  double eps = 0.0;
  double phi = 0.0;      // Phi^eps(u^eps)
  double u_l2_sq = 0.0;  // int |u|^2 over Omega_eps
  double p_l2 = 0.0;     // ||p||_{L2/R} over Omega_eps
};

struct BoundsReport {
  std::vector<BoundsRow> rows;
  double ratio_phi = 1.0, ratio_u = 1.0, ratio_p = 1.0;
  bool bounded = true;
  double max_ratio = 10.0;
};

BoundsReport check_a_priori_bounds(const std::vector<BoundsRow>& rows,
                                   double max_ratio = 10.0);

}  // namespace wl
