#include "walllaw/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wl {

using nlohmann::json;

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParamError("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto strip = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r\n");
      if (a == std::string::npos) return std::string();
      size_t b = s.find_last_not_of(" \t\r\n");
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParamError("config line " + std::to_string(lineno) + ": expected key=value");
    cfg.kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  return cfg;
}

std::string RunConfig::get(const std::string& key, const std::string& dflt) const {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : it->second;
}

double RunConfig::get_double(const std::string& key, double dflt) const {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  try {
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParamError("config key " + key + ": expected a number, got '" + it->second + "'");
  }
}

int RunConfig::get_int(const std::string& key, int dflt) const {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  try {
    size_t pos = 0;
    int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParamError("config key " + key + ": expected an integer, got '" + it->second + "'");
  }
}

bool RunConfig::get_bool(const std::string& key, bool dflt) const {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParamError("config key " + key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ParamError("expected a comma-separated number list, got '" + text + "'");
    }
  }
  if (out.empty()) throw ParamError("empty number list: '" + text + "'");
  return out;
}

std::vector<double> RunConfig::get_list(const std::string& key,
                                        const std::vector<double>& dflt) const {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  return parse_double_list(it->second);
}

std::string fmt_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

json rate_json(const RateFit& r) {
  return json{{"alpha", r.alpha},
              {"c", r.c},
              {"residual", r.residual},
              {"defined", r.defined}};
}

// Minimal polyline plot; log-log when requested. Presentation only.
void svg_plot(const std::string& path, const std::vector<double>& xs,
              const std::vector<double>& ys, const std::string& title, bool loglog) {
  auto out = open_out(path);
  const int W = 480, H = 360, M = 48;
  std::vector<double> px, py;
  for (size_t k = 0; k < xs.size(); ++k) {
    if (loglog && (xs[k] <= 0 || ys[k] <= 0)) continue;
    px.push_back(loglog ? std::log10(xs[k]) : xs[k]);
    py.push_back(loglog ? std::log10(ys[k]) : ys[k]);
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
      << "</text>\n";
  if (px.size() >= 2) {
    double x0 = *std::min_element(px.begin(), px.end());
    double x1 = *std::max_element(px.begin(), px.end());
    double y0 = *std::min_element(py.begin(), py.end());
    double y1 = *std::max_element(py.begin(), py.end());
    if (x1 - x0 < 1e-12) x1 = x0 + 1;
    if (y1 - y0 < 1e-12) y1 = y0 + 1;
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (size_t k = 0; k < px.size(); ++k) {
      double X = M + (px[k] - x0) / (x1 - x0) * (W - 2 * M);
      double Y = H - M - (py[k] - y0) / (y1 - y0) * (H - 2 * M);
      out << fmt_sig(X, 6) << "," << fmt_sig(Y, 6) << " ";
    }
    out << "\"/>\n";
    out << "<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W - 2 * M
        << "\" height=\"" << H - 2 * M
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void write_sweep_csv(const std::string& path, const SweepReport& rep) {
  auto out = open_out(path);
  out << "eps,phi_eps,g_eps,g0,l2_err_u,l2_err_p,cg_iters,picard_iters\n";
  for (const auto& r : rep.rows) {
    if (r.failed) continue;
    out << fmt_sig(r.eps, 12) << ',' << fmt_sig(r.phi_eps, 12) << ','
        << fmt_sig(r.g_eps, 12) << ',' << fmt_sig(rep.g0, 12) << ','
        << fmt_sig(r.l2_err_u, 12) << ',' << fmt_sig(r.l2_err_p, 12) << ','
        << r.cg_iters << ',' << r.picard_iters << '\n';
  }
}

void write_sweep_json(const std::string& path, const SweepReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row{{"eps", r.eps},
             {"phi_eps", r.phi_eps},
             {"g_eps", r.g_eps},
             {"l2_err_u", r.l2_err_u},
             {"l2_err_p", r.l2_err_p},
             {"cg_iters", r.cg_iters},
             {"picard_iters", r.picard_iters},
             {"failed", r.failed}};
    if (r.failed) row["failure"] = r.failure;
    rows.push_back(row);
  }
  json bounds{{"ratio_phi", rep.bounds.ratio_phi},
              {"ratio_u", rep.bounds.ratio_u},
              {"ratio_p", rep.bounds.ratio_p},
              {"bounded", rep.bounds.bounded}};
  json j{{"g0", rep.g0},
         {"rows", rows},
         {"rate", rate_json(rep.rate)},
         {"bounds", bounds},
         {"all_ok", rep.all_ok}};
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_sweep_svg(const std::string& path, const SweepReport& rep) {
  std::vector<double> xs, ys;
  for (const auto& r : rep.rows)
    if (!r.failed) {
      xs.push_back(r.eps);
      ys.push_back(r.l2_err_u);
    }
  svg_plot(path, xs, ys, "||u_eps - u0||_L2 vs eps (log-log)", true);
}

void write_control_csv(const std::string& path, const ConcentrationReport& rep) {
  auto out = open_out(path);
  out << "m,F_value,work_identity_residual,mass_residual,band_fraction_1,"
         "int_abs_u1_over_m,M_1\n";
  for (const auto& r : rep.rows) {
    if (r.failed) continue;
    out << fmt_sig(r.m, 12) << ',' << fmt_sig(r.f_value, 12) << ','
        << fmt_sig(r.work_identity_residual, 12) << ','
        << fmt_sig(r.mass_residual, 12) << ',' << fmt_sig(r.band_fraction, 12) << ','
        << fmt_sig(r.int_abs_u_over_m, 12) << ',' << fmt_sig(rep.m1, 12) << '\n';
  }
}

void write_control_json(const std::string& path, const ConcentrationReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row{{"m", r.m},
             {"F_value", r.f_value},
             {"work_identity_residual", r.work_identity_residual},
             {"mass_residual", r.mass_residual},
             {"band_fraction_1", r.band_fraction},
             {"int_abs_u1_over_m", r.int_abs_u_over_m},
             {"J_m", r.j_m},
             {"tv_v", r.tv_v},
             {"moments", r.moments},
             {"failed", r.failed}};
    if (r.failed) row["failure"] = r.failure;
    rows.push_back(row);
  }
  json j{{"M_1", rep.m1},
         {"band_faces", rep.band_faces},
         {"band_measure", rep.band_measure},
         {"degenerate", rep.degenerate},
         {"rows", rows},
         {"all_ok", rep.all_ok}};
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_control_svg(const std::string& path, const ConcentrationReport& rep) {
  std::vector<double> xs, ys;
  for (const auto& r : rep.rows)
    if (!r.failed) {
      xs.push_back(r.m);
      ys.push_back(r.band_fraction);
    }
  svg_plot(path, xs, ys, "band mass fraction vs m (log x)", true);
}

}  // namespace wl
