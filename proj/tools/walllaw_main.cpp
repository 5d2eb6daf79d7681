// Batch front door: subcommands wiring flat key=value configs (plus flag
// overrides) to the solvers, emitting CSV/JSON reports and SVG line plots.
//
// Exit codes: 0 success, 1 config error, 2 solver non-convergence, 3 I/O.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "walllaw/cell.hpp"
#include "walllaw/control.hpp"
#include "walllaw/expr.hpp"
#include "walllaw/gammaconv.hpp"
#include "walllaw/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Named profile shortcuts ("flat:H", "bump:A") alongside full expressions.
std::function<double(double)> parse_profile(const std::string& text) {
  if (text.rfind("flat:", 0) == 0) {
    double H = std::stod(text.substr(5));
    wl::require(H > 0, "flat profile: height must be positive");
    return [H](double) { return H; };
  }
  if (text.rfind("bump:", 0) == 0) {
    double A = std::stod(text.substr(5));
    wl::require(A > 0, "bump profile: amplitude must be positive");
    return [A](double t) {
      double c = std::cos(kPi * t);
      return A * c * c;
    };
  }
  auto ast = std::make_shared<wl::expr::ExprAst>(wl::expr::parse_expr(text));
  return [ast](double x) { return wl::expr::evaluate(*ast, x, 0.0); };
}

std::function<double(double, double)> parse_force(const std::string& text) {
  if (text.empty() || text == "0") return {};
  auto ast = std::make_shared<wl::expr::ExprAst>(wl::expr::parse_expr(text));
  return [ast](double x, double y) { return wl::expr::evaluate(*ast, x, y); };
}

struct Common {
  wl::RunConfig cfg;
  std::string out_dir;
  std::vector<std::string> formats;
  int jobs = 1;

  bool want(const std::string& f) const {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
  }
  std::string path(const std::string& name) const {
    return (fs::path(out_dir) / name).string();
  }
};

Common load_common(const std::string& config_path, const std::string& out_flag,
                   const std::string& formats_flag, int jobs_flag) {
  Common c;
  if (!config_path.empty()) c.cfg = wl::RunConfig::from_file(config_path);
  const char* env = std::getenv("WALL_LAW_OUTPUT_DIR");
  c.out_dir = !out_flag.empty() ? out_flag
              : c.cfg.has("output.dir") ? c.cfg.get("output.dir", ".")
              : env ? std::string(env)
                    : std::string(".");
  std::string fmts = !formats_flag.empty() ? formats_flag
                                           : c.cfg.get("output.formats", "csv,json");
  std::stringstream ss(fmts);
  std::string item;
  while (std::getline(ss, item, ',')) c.formats.push_back(item);
  c.jobs = jobs_flag > 0 ? jobs_flag : c.cfg.get_int("jobs", 1);
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw wl::IoError("cannot create output directory " + c.out_dir);
  return c;
}

wl::SolverConfig solver_config(const wl::RunConfig& cfg) {
  wl::SolverConfig sc;
  sc.linear_tol = cfg.get_double("solver.linear_tol", sc.linear_tol);
  sc.max_cg_iters = cfg.get_int("solver.max_cg", sc.max_cg_iters);
  sc.picard_tol = cfg.get_double("solver.picard_tol", sc.picard_tol);
  sc.picard_max = cfg.get_int("solver.picard_max", sc.picard_max);
  sc.picard_damping = cfg.get_double("solver.damping", sc.picard_damping);
  sc.drop_layer_advection = cfg.get_bool("solver.drop_layer_advection", false);
  sc.div_tol_abs = cfg.get_double("solver.div_tol", sc.div_tol_abs);
  return sc;
}

wl::WallLawSpec walllaw_spec(const std::string& text, double nu,
                             const std::function<double(double)>& h) {
  if (text == "over_h") {
    wl::require(static_cast<bool>(h), "wall law over_h needs a layer profile");
    return wl::WallLawSpec::over_h(nu, h);
  }
  if (text == "zero") return wl::WallLawSpec::zero();
  if (text == "infinite") return wl::WallLawSpec::infinite();
  if (text.rfind("constant:", 0) == 0)
    return wl::WallLawSpec::constant(std::stod(text.substr(9)));
  throw wl::ParamError("unknown wall-law spec '" + text +
                       "' (use over_h | constant:VAL | zero | infinite)");
}

int run_cell(const Common& c, const std::string& hspec, int nx, int ny) {
  auto h = parse_profile(hspec);
  wl::CellResolution res{nx, ny};
  wl::SolverConfig sc = solver_config(c.cfg);
  double nu = c.cfg.get_double("physics.nu", 1.0);
  auto lon = wl::solve_cell_longitudinal(h, res, sc);
  auto tra = wl::solve_cell_transverse(h, res, sc);
  auto K = wl::effective_matrix(lon, tra, nu);
  std::cout << "c1 = " << wl::fmt_sig(K.c1, 12) << "\n"
            << "c2 = " << wl::fmt_sig(K.c2, 12) << "\n"
            << "K  = [[" << wl::fmt_sig(K.k11, 12) << ", " << wl::fmt_sig(K.k12, 12)
            << "], [" << wl::fmt_sig(K.k12, 12) << ", " << wl::fmt_sig(K.k22, 12)
            << "]]\n";
  if (c.want("csv")) {
    std::ofstream out(c.path("cell.csv"));
    if (!out) throw wl::IoError("cannot write cell.csv");
    out << "c1,c2,k11,k22,k12\n"
        << wl::fmt_sig(K.c1, 12) << ',' << wl::fmt_sig(K.c2, 12) << ','
        << wl::fmt_sig(K.k11, 12) << ',' << wl::fmt_sig(K.k22, 12) << ','
        << wl::fmt_sig(K.k12, 12) << '\n';
  }
  if (c.want("json")) {
    json j{{"c1", K.c1},    {"c2", K.c2},  {"k11", K.k11},
           {"k22", K.k22},  {"k12", K.k12}, {"nu", nu},
           {"profile", hspec}};
    std::ofstream out(c.path("cell.json"));
    if (!out) throw wl::IoError("cannot write cell.json");
    out << j.dump(2) << '\n';
  }
  return 0;
}

wl::MacGrid omega_grid_from(const wl::RunConfig& cfg, int nx, int ny) {
  wl::DomainSpec spec;
  spec.lx = cfg.get_double("domain.lx", 1.0);
  spec.periodic_x = cfg.get_bool("domain.periodic_x", false);
  return wl::build_domain_grid(spec, nx, ny, cfg.get_double("grid.grading", 1.0));
}

int run_limit(const Common& c, const std::string& wl_spec_text) {
  const auto& cfg = c.cfg;
  double nu = cfg.get_double("physics.nu", 1.0);
  wl::MacGrid grid = omega_grid_from(cfg, cfg.get_int("grid.nx", 64),
                                     cfg.get_int("grid.ny", 64));
  std::function<double(double)> h;
  if (cfg.has("layer.h")) h = parse_profile(cfg.get("layer.h", "flat:1"));
  auto spec = walllaw_spec(wl_spec_text, nu, h);
  wl::BodyForce f{parse_force(cfg.get("physics.fx", "0")),
                  parse_force(cfg.get("physics.fy", "0")),
                  {}, {}};
  auto mode = cfg.get("solver.ns_mode", "stokes") == "navier_stokes"
                  ? wl::NsMode::NavierStokes
                  : wl::NsMode::Stokes;
  auto [state, stats] = wl::solve_limit(f, nu, spec, mode, grid, solver_config(cfg));
  double g0 = wl::g0_energy(state, nu, spec, grid);
  auto traction = wl::tangential_traction(state, nu, grid);
  std::cout << "g0_energy = " << wl::fmt_sig(g0, 12)
            << ", max|div u| = " << wl::fmt_sig(wl::max_abs_divergence(state, grid), 3)
            << ", cg_iters = " << stats.cg_iters << "\n";
  if (c.want("csv")) {
    std::ofstream out(c.path("limit.csv"));
    if (!out) throw wl::IoError("cannot write limit.csv");
    out << "x,trace_u,traction\n";
    for (int i = 0; i <= grid.nx; ++i)
      out << wl::fmt_sig(grid.xf[i], 12) << ','
          << wl::fmt_sig(state.gamma2_trace_u.empty() ? 0.0 : state.gamma2_trace_u[i], 12)
          << ',' << wl::fmt_sig(traction[i], 12) << '\n';
  }
  if (c.want("json")) {
    json j{{"g0_energy", g0},
           {"cg_iters", stats.cg_iters},
           {"picard_iters", stats.picard_iters},
           {"div_residual", stats.div_residual},
           {"momentum_residual", stats.momentum_residual}};
    std::ofstream out(c.path("limit.json"));
    if (!out) throw wl::IoError("cannot write limit.json");
    out << j.dump(2) << '\n';
  }
  return 0;
}

wl::SweepProblem sweep_problem(const wl::RunConfig& cfg, const std::string& hspec,
                               const std::string& wl_spec_text) {
  wl::SweepProblem prob;
  prob.domain.lx = cfg.get_double("domain.lx", 1.0);
  prob.domain.periodic_x = cfg.get_bool("domain.periodic_x", false);
  prob.domain.has_layer = true;
  prob.domain.layer.kind = cfg.get("layer.kind", "fixed") == "periodic"
                               ? wl::LayerKind::Periodic
                               : wl::LayerKind::Fixed;
  prob.domain.layer.h = parse_profile(hspec);
  prob.nu = cfg.get_double("physics.nu", 1.0);
  prob.f = wl::BodyForce{parse_force(cfg.get("physics.fx", "1")),
                         parse_force(cfg.get("physics.fy", "0")),
                         {}, {}};
  prob.spec = walllaw_spec(wl_spec_text, prob.nu, prob.domain.layer.h);
  prob.ns_mode = cfg.get("solver.ns_mode", "stokes") == "navier_stokes"
                     ? wl::NsMode::NavierStokes
                     : wl::NsMode::Stokes;
  return prob;
}

int run_thinlayer(const Common& c, const std::string& hspec, double eps) {
  const auto& cfg = c.cfg;
  wl::ThinLayerProblem prob;
  wl::SweepProblem base = sweep_problem(cfg, hspec, "infinite");
  prob.domain = base.domain;
  prob.domain.layer.eps = eps;
  prob.nu = base.nu;
  prob.f = base.f;
  prob.ns_mode = base.ns_mode;
  wl::Resolution res{cfg.get_int("grid.nx", 64), cfg.get_int("grid.ny", 64),
                     cfg.get_double("grid.grading", 1.0),
                     cfg.get_int("grid.layer_rows", 10)};
  auto r = wl::solve_thin_layer(prob, res, solver_config(cfg));
  double phi = wl::phi_eps_energy(r.state, prob, r.grid);
  json j{{"eps", eps},
         {"phi_eps", phi},
         {"u_l2_sq", wl::velocity_l2_sq(r.state, r.grid)},
         {"p_l2", wl::pressure_l2_zero_mean(r.state, r.grid)},
         {"max_div", wl::max_abs_divergence(r.state, r.grid)},
         {"cg_iters", r.stats.cg_iters},
         {"picard_iters", r.stats.picard_iters}};
  std::cout << "phi_eps = " << wl::fmt_sig(phi, 12)
            << ", cg_iters = " << r.stats.cg_iters << "\n";
  if (c.want("json")) {
    std::ofstream out(c.path("thinlayer.json"));
    if (!out) throw wl::IoError("cannot write thinlayer.json");
    out << j.dump(2) << '\n';
  }
  return 0;
}

int run_sweep_cmd(const Common& c, const std::string& hspec,
                  const std::string& wl_spec_text, const std::string& eps_text) {
  const auto& cfg = c.cfg;
  auto eps = eps_text.empty() ? cfg.get_list("layer.eps", {0.2, 0.1, 0.05})
                              : wl::parse_double_list(eps_text);
  wl::SweepProblem prob = sweep_problem(cfg, hspec, wl_spec_text);
  wl::Resolution res{cfg.get_int("grid.nx", 48), cfg.get_int("grid.ny", 96),
                     cfg.get_double("grid.grading", 1.0),
                     cfg.get_int("grid.layer_rows", 10)};
  auto rep = wl::run_sweep(prob, eps, res, solver_config(cfg), c.jobs);
  std::cout << "g0 = " << wl::fmt_sig(rep.g0, 12) << "\n";
  for (const auto& r : rep.rows) {
    if (r.failed) {
      std::cout << "eps = " << r.eps << ": FAILED (" << r.failure << ")\n";
      continue;
    }
    std::cout << "eps = " << r.eps << ": l2_err_u = " << wl::fmt_sig(r.l2_err_u, 6)
              << ", phi_eps = " << wl::fmt_sig(r.phi_eps, 8) << "\n";
  }
  if (rep.rate.defined)
    std::cout << "fitted rate alpha = " << wl::fmt_sig(rep.rate.alpha, 6)
              << " (residual " << wl::fmt_sig(rep.rate.residual, 3) << ")\n";
  if (c.want("csv")) wl::write_sweep_csv(c.path("sweep.csv"), rep);
  if (c.want("json")) wl::write_sweep_json(c.path("sweep.json"), rep);
  if (c.want("svg")) wl::write_sweep_svg(c.path("sweep.svg"), rep);
  return rep.all_ok ? 0 : 2;
}

int run_control(const Common& c, const std::string& m_text) {
  const auto& cfg = c.cfg;
  auto m_list = m_text.empty() ? cfg.get_list("control.m", {0.2, 0.1, 0.05})
                               : wl::parse_double_list(m_text);
  double nu = cfg.get_double("physics.nu", 1.0);
  wl::MacGrid grid = omega_grid_from(cfg, cfg.get_int("grid.nx", 64),
                                     cfg.get_int("grid.ny", 64));
  wl::BodyForce f{parse_force(cfg.get("physics.fx", "exp(-((x-0.5)/0.12)^2)")),
                  parse_force(cfg.get("physics.fy", "0")),
                  {}, {}};
  wl::ControlConfig ctrl;
  ctrl.theta = cfg.get_double("control.theta", 1.0);
  ctrl.tol = cfg.get_double("control.tol", 1e-10);
  ctrl.max_iters = cfg.get_int("control.max_iters", 60);
  ctrl.band_delta = cfg.get_double("control.delta", 0.05);
  ctrl.ns_mode = cfg.get("solver.ns_mode", "stokes") == "navier_stokes"
                     ? wl::NsMode::NavierStokes
                     : wl::NsMode::Stokes;
  auto rep = wl::m_sweep(m_list, f, nu, grid, solver_config(cfg), ctrl);
  std::cout << "M_1 = " << wl::fmt_sig(rep.m1, 8)
            << ", band measure = " << wl::fmt_sig(rep.band_measure, 6) << "\n";
  for (const auto& r : rep.rows) {
    if (r.failed) {
      std::cout << "m = " << r.m << ": FAILED (" << r.failure << ")\n";
      continue;
    }
    std::cout << "m = " << r.m << ": band fraction = " << wl::fmt_sig(r.band_fraction, 6)
              << ", int|u|/m = " << wl::fmt_sig(r.int_abs_u_over_m, 6)
              << ", J_m = " << wl::fmt_sig(r.j_m, 6) << "\n";
  }
  if (c.want("csv")) wl::write_control_csv(c.path("control.csv"), rep);
  if (c.want("json")) wl::write_control_json(c.path("control.json"), rep);
  if (c.want("svg")) wl::write_control_svg(c.path("control.svg"), rep);
  return rep.all_ok ? 0 : 2;
}

// Slip Poiseuille fixture vs the closed form u = -y^2 + y/2 + 1/2.
int run_poiseuille_check(const Common& c, int n) {
  wl::DomainSpec spec;
  spec.lx = 1.0;
  spec.periodic_x = true;
  wl::MacGrid grid = wl::build_domain_grid(spec, std::max(8, n / 8), n, 1.0);
  wl::BodyForce f{[](double, double) { return 2.0; }, {}, {}, {}};
  auto spec_wl = wl::WallLawSpec::over_h(1.0, [](double) { return 1.0; });
  auto [state, stats] = wl::solve_limit(f, 1.0, spec_wl, wl::NsMode::Stokes, grid,
                                        solver_config(c.cfg));
  double trace_err = 0.0, prof_err = 0.0;
  for (int i = 0; i < grid.nx; ++i)
    trace_err = std::max(trace_err, std::fabs(state.gamma2_trace_u[i] - 0.5));
  for (int j = 0; j < grid.ny; ++j) {
    double y = grid.yc[j], exact = -y * y + 0.5 * y + 0.5;
    for (int i = 0; i < grid.nx; ++i)
      prof_err = std::max(prof_err, std::fabs(state.u(i, j) - exact));
  }
  std::cout << "poiseuille-check n=" << n << ": |trace - 0.5| = "
            << wl::fmt_sig(trace_err, 3) << ", profile max err = "
            << wl::fmt_sig(prof_err, 3) << "\n";
  bool ok = trace_err <= 1e-3 && prof_err <= 1e-3;
  std::cout << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective Navier wall laws for thin-boundary-layer flows"};
  app.require_subcommand(1);

  std::string config_path, out_dir, formats;
  int jobs = 0;
  app.add_option("--config", config_path, "flat key=value configuration file");
  app.add_option("--out", out_dir, "output directory (default $WALL_LAW_OUTPUT_DIR)");
  app.add_option("--formats", formats, "comma list of csv,json,svg");
  app.add_option("--jobs", jobs, "parallel sweep members (default 1)");

  std::string hspec = "flat:1", wl_spec = "over_h", eps_text, m_text;
  int nx = 128, ny = 128, pn = 128;
  double eps_single = 0.1;

  auto* cell = app.add_subcommand("cell", "solve the local cell problems on Z_h");
  cell->add_option("--h", hspec, "profile: flat:H | bump:A | expression in x");
  cell->add_option("--nx", nx, "horizontal cells");
  cell->add_option("--ny", ny, "vertical cells");

  auto* limit = app.add_subcommand("limit", "solve the limit wall-law problem");
  limit->add_option("--walllaw", wl_spec, "over_h | constant:VAL | zero | infinite");

  auto* thin = app.add_subcommand("thinlayer", "solve the thin-layer problem");
  thin->add_option("--h", hspec, "layer profile");
  thin->add_option("--eps", eps_single, "layer scale eps");

  auto* sweep = app.add_subcommand("sweep", "Gamma-convergence sweep over eps");
  sweep->add_option("--h", hspec, "layer profile");
  sweep->add_option("--walllaw", wl_spec, "wall-law spec for the limit");
  sweep->add_option("--eps", eps_text, "comma list of eps values");

  auto* control = app.add_subcommand("control", "optimal-control m sweep");
  control->add_option("--m", m_text, "comma list of mass budgets");

  auto* pois = app.add_subcommand("poiseuille-check",
                                  "verify the slip Poiseuille closed form");
  pois->add_option("--n", pn, "vertical resolution");

  CLI11_PARSE(app, argc, argv);

  try {
    Common c = load_common(config_path, out_dir, formats, jobs);
    if (app.got_subcommand(cell)) return run_cell(c, hspec, nx, ny);
    if (app.got_subcommand(limit)) return run_limit(c, wl_spec);
    if (app.got_subcommand(thin)) return run_thinlayer(c, hspec, eps_single);
    if (app.got_subcommand(sweep)) return run_sweep_cmd(c, hspec, wl_spec, eps_text);
    if (app.got_subcommand(control)) return run_control(c, m_text);
    if (app.got_subcommand(pois)) return run_poiseuille_check(c, pn);
  } catch (const wl::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (residual " << e.residual << ")\n";
    return 2;
  } catch (const wl::WellPosednessError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const wl::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const wl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
