#pragma once

#include <map>
#include <string>
#include <vector>

#include "walllaw/control.hpp"
#include "walllaw/gammaconv.hpp"

namespace wl {

// Flat key=value configuration; command-line flags override file entries.
struct RunConfig {
  std::map<std::string, std::string> kv;

  static RunConfig from_file(const std::string& path);
  void set(const std::string& key, const std::string& value) { kv[key] = value; }
  bool has(const std::string& key) const { return kv.count(key) > 0; }

  std::string get(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key, double dflt) const;
  int get_int(const std::string& key, int dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& dflt) const;
};

std::vector<double> parse_double_list(const std::string& text);

// value formatted to `digits` significant digits (CSV uses 12).
std::string fmt_sig(double v, int digits);

void write_sweep_csv(const std::string& path, const SweepReport& rep);
void write_sweep_json(const std::string& path, const SweepReport& rep);
void write_sweep_svg(const std::string& path, const SweepReport& rep);

void write_control_csv(const std::string& path, const ConcentrationReport& rep);
void write_control_json(const std::string& path, const ConcentrationReport& rep);
void write_control_svg(const std::string& path, const ConcentrationReport& rep);

}  // namespace wl
