#include "hamport/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hamport {

namespace {

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string fmt_mat(const Mat& M) {
  std::string out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    if (i) out += " ; ";
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out += ' ';
      out += fmt(M(i, j));
    }
  }
  return out;
}

std::string fmt_vec(const Vec& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += fmt(v[i]);
  }
  return out;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt(v[i]);
  }
  return out;
}

std::string fmt_names(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i];
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string section, key, value;
  int line = 0;
};

std::vector<Entry> tokenize(const std::string& text) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw config_error("line " + std::to_string(lineno) +
                           ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) +
                         ": expected key = value");
    Entry e;
    e.section = section;
    e.key = trim(t.substr(0, eq));
    e.value = trim(t.substr(eq + 1));
    e.line = lineno;
    if (e.section.empty() || e.key.empty())
      throw config_error("line " + std::to_string(lineno) +
                         ": key outside a section or empty key");
    entries.push_back(e);
  }
  return entries;
}

double to_double(const Entry& e) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    throw config_error("line " + std::to_string(e.line) + ": field '" +
                       e.section + "." + e.key + "' expects a number, got '" +
                       e.value + "'");
  }
}

int to_int(const Entry& e) {
  const double v = to_double(e);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw config_error("line " + std::to_string(e.line) + ": field '" +
                       e.section + "." + e.key + "' expects an integer");
  return i;
}

std::uint64_t to_u64(const Entry& e) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    throw config_error("line " + std::to_string(e.line) + ": field '" +
                       e.section + "." + e.key + "' expects an unsigned "
                       "integer");
  }
}

bool to_bool(const Entry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw config_error("line " + std::to_string(e.line) + ": field '" +
                     e.section + "." + e.key + "' expects true/false");
}

Mat to_mat(const Entry& e) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(e.value);
  std::string rowtxt;
  while (std::getline(ss, rowtxt, ';')) {
    std::vector<double> row;
    std::stringstream rs(rowtxt);
    double v;
    while (rs >> v) row.push_back(v);
    if (!rs.eof())
      throw config_error("line " + std::to_string(e.line) +
                         ": malformed matrix entry");
    if (!row.empty()) rows.push_back(row);
  }
  if (rows.empty()) return Mat(0, 0);
  Mat M(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw config_error("line " + std::to_string(e.line) +
                         ": ragged matrix rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
  }
  return M;
}

Vec to_vec(const Entry& e) {
  const Mat M = to_mat(e);
  if (M.rows() != 1 && M.size() != 0)
    throw config_error("line " + std::to_string(e.line) +
                       ": expected a single row of numbers");
  Vec v(M.size());
  for (Eigen::Index j = 0; j < M.size(); ++j) v[j] = M(0, j);
  return v;
}

std::vector<double> to_list(const Entry& e) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Entry tmp = e;
    tmp.value = trim(item);
    out.push_back(to_double(tmp));
  }
  if (out.empty())
    throw config_error("line " + std::to_string(e.line) +
                       ": empty numeric list");
  return out;
}

std::vector<std::string> to_names(const Entry& e) {
  std::vector<std::string> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

void apply_entry(ScenarioConfig& c, const Entry& e) {
  const std::string& s = e.section;
  const std::string& k = e.key;
  auto unknown = [&]() -> void {
    throw config_error("line " + std::to_string(e.line) + ": unknown key '" +
                       s + "." + k + "'");
  };
  if (s == "model") {
    if (k == "preset") c.model.preset = e.value;
    else if (k == "custom") c.model.custom = to_bool(e);
    else if (k == "m") c.model.m = to_int(e);
    else if (k == "a") c.model.a = to_double(e);
    else if (k == "b") c.model.b = to_double(e);
    else if (k == "p0") c.model.P0 = to_mat(e);
    else if (k == "p1") c.model.P1 = to_mat(e);
    else if (k == "h_diag") c.model.h_diag = to_vec(e);
    else if (k == "wb1") c.model.Wb1 = to_mat(e);
    else if (k == "wb2") c.model.Wb2 = to_mat(e);
    else if (k == "wc") c.model.Wc = to_mat(e);
    else unknown();
  } else if (s == "controller") {
    if (k == "enabled") c.controller.enabled = to_bool(e);
    else if (k == "name") c.controller.name = e.value;
    else if (k == "mass") c.controller.mass = to_double(e);
    else if (k == "stiffness") c.controller.stiffness = to_double(e);
    else if (k == "damping") c.controller.damping = to_double(e);
    else if (k == "input_gain") c.controller.input_gain = to_double(e);
    else if (k == "feedthrough") c.controller.feedthrough = to_double(e);
    else if (k == "quartic") c.controller.quartic = to_double(e);
    else unknown();
  } else if (s == "grid") {
    if (k == "n") c.grid.n = to_int(e);
    else if (k == "dt") c.grid.dt = to_double(e);
    else if (k == "T") c.grid.T = to_double(e);
    else unknown();
  } else if (s == "disturbance") {
    if (k == "kind") c.disturbance.kind = e.value;
    else if (k == "amplitude") c.disturbance.amplitude = to_double(e);
    else if (k == "duration") c.disturbance.duration = to_double(e);
    else if (k == "rate") c.disturbance.rate = to_double(e);
    else if (k == "t0") c.disturbance.t0 = to_double(e);
    else if (k == "t1") c.disturbance.t1 = to_double(e);
    else if (k == "cell") c.disturbance.cell = to_double(e);
    else unknown();
  } else if (s == "ensemble") {
    if (k == "count") c.ensemble.count = to_int(e);
    else if (k == "seed") c.ensemble.seed = to_u64(e);
    else if (k == "x0_scale") c.ensemble.x0_scale = to_double(e);
    else unknown();
  } else if (s == "analyses") {
    if (k == "run") c.analyses = to_names(e);
    else unknown();
  } else if (s == "contraction") {
    if (k == "horizon") c.contraction.horizon = to_double(e);
    else if (k == "tau") c.contraction.tau = to_double(e);
    else unknown();
  } else if (s == "gain") {
    if (k == "amplitudes") c.gain.amplitudes = to_list(e);
    else if (k == "tail_window") c.gain.tail_window = to_double(e);
    else if (k == "horizon") c.gain.horizon = to_double(e);
    else unknown();
  } else if (s == "output") {
    if (k == "dir") c.output_dir = e.value;
    else if (k == "dump_model") c.dump_model = to_bool(e);
    else unknown();
  } else {
    throw config_error("line " + std::to_string(e.line) +
                       ": unknown section '" + s + "'");
  }
}

void validate_config(const ScenarioConfig& c) {
  for (const auto& a : c.analyses)
    if (a != "conditions" && a != "simulate" && a != "contraction" &&
        a != "gain_curve")
      throw config_error("analyses: unknown analysis '" + a + "'");
  if (c.grid.n < 16) throw config_error("grid: n must be >= 16");
  if (!(c.grid.dt > 0.0) || !(c.grid.T >= c.grid.dt))
    throw config_error("grid: need 0 < dt <= T");
  if (c.ensemble.count < 1) throw config_error("ensemble: count must be >= 1");
  const std::string& kind = c.disturbance.kind;
  if (kind != "zero" && kind != "truncated_step" && kind != "exp_decay" &&
      kind != "windowed_noise")
    throw config_error("disturbance: unknown kind '" + kind + "'");
}

}  // namespace

std::string ScenarioConfig::to_ini() const {
  std::string o;
  o += "[model]\n";
  o += "preset = " + model.preset + "\n";
  o += "custom = " + std::string(model.custom ? "true" : "false") + "\n";
  if (model.custom) {
    o += "m = " + std::to_string(model.m) + "\n";
    o += "a = " + fmt(model.a) + "\n";
    o += "b = " + fmt(model.b) + "\n";
    o += "p0 = " + fmt_mat(model.P0) + "\n";
    o += "p1 = " + fmt_mat(model.P1) + "\n";
    o += "h_diag = " + fmt_vec(model.h_diag) + "\n";
    o += "wb1 = " + fmt_mat(model.Wb1) + "\n";
    o += "wb2 = " + fmt_mat(model.Wb2) + "\n";
    o += "wc = " + fmt_mat(model.Wc) + "\n";
  }
  o += "\n[controller]\n";
  o += "enabled = " + std::string(controller.enabled ? "true" : "false") + "\n";
  if (controller.enabled) {
    o += "name = " + controller.name + "\n";
    o += "mass = " + fmt(controller.mass) + "\n";
    o += "stiffness = " + fmt(controller.stiffness) + "\n";
    o += "damping = " + fmt(controller.damping) + "\n";
    o += "input_gain = " + fmt(controller.input_gain) + "\n";
    o += "feedthrough = " + fmt(controller.feedthrough) + "\n";
    o += "quartic = " + fmt(controller.quartic) + "\n";
  }
  o += "\n[grid]\n";
  o += "n = " + std::to_string(grid.n) + "\n";
  o += "dt = " + fmt(grid.dt) + "\n";
  o += "T = " + fmt(grid.T) + "\n";
  o += "\n[disturbance]\n";
  o += "kind = " + disturbance.kind + "\n";
  o += "amplitude = " + fmt(disturbance.amplitude) + "\n";
  o += "duration = " + fmt(disturbance.duration) + "\n";
  o += "rate = " + fmt(disturbance.rate) + "\n";
  o += "t0 = " + fmt(disturbance.t0) + "\n";
  o += "t1 = " + fmt(disturbance.t1) + "\n";
  o += "cell = " + fmt(disturbance.cell) + "\n";
  o += "\n[ensemble]\n";
  o += "count = " + std::to_string(ensemble.count) + "\n";
  o += "seed = " + std::to_string(ensemble.seed) + "\n";
  o += "x0_scale = " + fmt(ensemble.x0_scale) + "\n";
  o += "\n[analyses]\n";
  o += "run = " + fmt_names(analyses) + "\n";
  o += "\n[contraction]\n";
  o += "horizon = " + fmt(contraction.horizon) + "\n";
  o += "tau = " + fmt(contraction.tau) + "\n";
  o += "\n[gain]\n";
  o += "amplitudes = " + fmt_list(gain.amplitudes) + "\n";
  o += "tail_window = " + fmt(gain.tail_window) + "\n";
  o += "horizon = " + fmt(gain.horizon) + "\n";
  o += "\n[output]\n";
  o += "dir = " + output_dir + "\n";
  o += "dump_model = " + std::string(dump_model ? "true" : "false") + "\n";
  return o;
}

ScenarioConfig parse_config(const std::string& ini_text) {
  ScenarioConfig cfg;
  for (const Entry& e : tokenize(ini_text)) apply_entry(cfg, e);
  validate_config(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ScenarioConfig apply_overrides(
    const ScenarioConfig& cfg,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  ScenarioConfig out = cfg;
  for (const auto& [path, value] : overrides) {
    const auto dot = path.find('.');
    if (dot == std::string::npos)
      throw config_error("override '" + path + "' must be section.key");
    Entry e;
    e.section = path.substr(0, dot);
    e.key = path.substr(dot + 1);
    e.value = value;
    e.line = 0;
    apply_entry(out, e);
  }
  validate_config(out);
  return out;
}

}  // namespace hamport
