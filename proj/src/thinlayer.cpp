#include "walllaw/thinlayer.hpp"

#include <cmath>

namespace wl {

void ThinLayerProblem::validate() const {
  require(domain.has_layer, "thin layer problem needs a layer profile");
  require(domain.layer.eps > 0, "thin layer: eps must be positive");
  require(nu > 0, "thin layer: nu must be positive");
}

ThinLayerResult solve_thin_layer(const ThinLayerProblem& prob, const Resolution& res,
                                 const SolverConfig& cfg) {
  prob.validate();
  ThinLayerResult out;
  MacGrid base = build_domain_grid(prob.domain, res.nx, res.ny, res.grading,
                                   res.layer_rows);
  out.grid = rasterize_layer(prob.domain.layer, base);
  out.visc = ViscosityField::composite(out.grid, prob.nu,
                                       prob.nu * prob.domain.layer.eps);
  BoundaryCondition bc;  // homogeneous Dirichlet on the whole outer boundary
  auto solved = (prob.ns_mode == NsMode::Stokes)
                    ? solve_stokes(out.grid, out.visc, bc, prob.f, cfg)
                    : solve_navier_stokes(out.grid, out.visc, bc, prob.f, cfg);
  out.state = std::move(solved.first);
  out.stats = solved.second;
  return out;
}

double phi_eps_energy(const FlowState& s, const ThinLayerProblem& prob,
                      const MacGrid& grid) {
  ViscosityField visc =
      ViscosityField::composite(grid, prob.nu, prob.nu * prob.domain.layer.eps);
  return dirichlet_energy(s, visc, grid);
}

BoundsReport check_a_priori_bounds(const std::vector<BoundsRow>& rows,
                                   double max_ratio) {
  require(rows.size() >= 2, "a-priori bound check needs a sweep (>= 2 eps values)");
  BoundsReport rep;
  rep.rows = rows;
  rep.max_ratio = max_ratio;
  auto ratio = [](double lo, double hi) {
    if (hi <= 0) return 1.0;  // identically zero quantities stay bounded
    if (lo <= 0) lo = hi;
    return hi / lo;
  };
  double phi_lo = 1e300, phi_hi = 0, u_lo = 1e300, u_hi = 0, p_lo = 1e300, p_hi = 0;
  for (const auto& r : rows) {
    phi_lo = std::min(phi_lo, r.phi);
    phi_hi = std::max(phi_hi, r.phi);
    u_lo = std::min(u_lo, r.u_l2_sq);
    u_hi = std::max(u_hi, r.u_l2_sq);
    p_lo = std::min(p_lo, r.p_l2);
    p_hi = std::max(p_hi, r.p_l2);
  }
  rep.ratio_phi = ratio(phi_lo, phi_hi);
  rep.ratio_u = ratio(u_lo, u_hi);
  rep.ratio_p = ratio(p_lo, p_hi);
  rep.bounded = rep.ratio_phi < max_ratio && rep.ratio_u < max_ratio &&
                rep.ratio_p < max_ratio;
  return rep;
}

}  // namespace wl
