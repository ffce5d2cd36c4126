#include "franson/model.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace franson {

std::string to_string(Mode m) { return m == Mode::BS ? "bs" : "pbs"; }

Mode mode_from_string(const std::string& s) {
  if (s == "bs" || s == "BS") return Mode::BS;
  if (s == "pbs" || s == "PBS") return Mode::PBS;
  throw std::invalid_argument("unknown mode '" + s + "' (expected bs|pbs)");
}

Detector detector_from_channel(int ch) {
  if (ch < 1 || ch > 4) throw std::invalid_argument("detector channel out of range: " + std::to_string(ch));
  return static_cast<Detector>(ch);
}

std::string to_string(Detector d) { return "D" + std::to_string(static_cast<int>(d)); }

namespace {

void require_finite_nonneg(double v, const char* name) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " is not finite");
  if (v < 0.0) throw std::invalid_argument(std::string(name) + " is negative");
}

}  // namespace

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  require_finite_nonneg(cfg.f0, "f0");
  require_finite_nonneg(cfg.sigma_f, "sigma_f");
  require_finite_nonneg(cfg.f_center, "f_center");
  require_finite_nonneg(cfg.delta_l, "delta_l");
  require_finite_nonneg(cfg.laser_linewidth, "laser_linewidth");
  require_finite_nonneg(cfg.pair_rate, "pair_rate");
  require_finite_nonneg(cfg.singles_rate, "singles_rate");
  require_finite_nonneg(cfg.t_res, "t_res");
  require_finite_nonneg(cfg.dead_time, "dead_time");
  require_finite_nonneg(cfg.window, "window");
  require_finite_nonneg(cfg.duration, "duration");
  if (!std::isfinite(cfg.theta0)) throw std::invalid_argument("theta0 is not finite");
  if (cfg.sigma_f <= 0.0) throw std::invalid_argument("sigma_f must be > 0");
  if (cfg.delta_l <= 0.0) throw std::invalid_argument("delta_l must be > 0");

  std::vector<std::string> warnings;
  // Dephasing regime: path difference many effective coherence lengths.
  const double dephasing_ratio = cfg.delta_l * cfg.sigma_f / kSpeedOfLight;
  if (dephasing_ratio < 10.0) {
    std::ostringstream os;
    os << "regime delta_l >> c/sigma_f violated with margin: delta_l*sigma_f/c = "
       << dephasing_ratio << " < 10";
    warnings.push_back(os.str());
  }
  // Single-photon interference regime: path difference inside the laser
  // coherence length.
  const double coherence_ratio = cfg.delta_l * cfg.laser_linewidth / kSpeedOfLight;
  if (coherence_ratio > 0.1) {
    std::ostringstream os;
    os << "regime delta_l << l_c violated with margin: delta_l*linewidth/c = "
       << coherence_ratio << " > 0.1";
    warnings.push_back(os.str());
  }
  return warnings;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& v, const std::string& key, const std::string& origin) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing junk");
    return d;
  } catch (const std::exception&) {
    throw std::runtime_error(origin + ": bad numeric value for '" + key + "': " + v);
  }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key, const std::string& origin) {
  try {
    size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    std::uint64_t u = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing junk");
    return u;
  } catch (const std::exception&) {
    throw std::runtime_error(origin + ": bad integer value for '" + key + "': " + v);
  }
}

std::string parse_string(const std::string& v, const std::string& key, const std::string& origin) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
    return v.substr(1, v.size() - 2);
  throw std::runtime_error(origin + ": value for '" + key + "' must be a quoted string: " + v);
}

}  // namespace

ExperimentConfig parse_config_toml(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip comment (naive: '#' inside a quoted string is not supported in
    // this flat subset)
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
    if (seen.count(key))
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    seen[key] = lineno;

    const std::string where = origin + ":" + std::to_string(lineno);
    if (key == "f0") cfg.f0 = parse_double(value, key, where);
    else if (key == "sigma_f") cfg.sigma_f = parse_double(value, key, where);
    else if (key == "f_center") cfg.f_center = parse_double(value, key, where);
    else if (key == "delta_l") cfg.delta_l = parse_double(value, key, where);
    else if (key == "laser_linewidth") cfg.laser_linewidth = parse_double(value, key, where);
    else if (key == "pair_rate") cfg.pair_rate = parse_double(value, key, where);
    else if (key == "singles_rate") cfg.singles_rate = parse_double(value, key, where);
    else if (key == "t_res") cfg.t_res = parse_double(value, key, where);
    else if (key == "dead_time") cfg.dead_time = parse_double(value, key, where);
    else if (key == "window") cfg.window = parse_double(value, key, where);
    else if (key == "theta0") cfg.theta0 = parse_double(value, key, where);
    else if (key == "mode") cfg.mode = mode_from_string(parse_string(value, key, where));
    else if (key == "seed") cfg.seed = parse_u64(value, key, where);
    else if (key == "duration") cfg.duration = parse_double(value, key, where);
    else throw std::runtime_error(where + ": unknown key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig load_config_toml(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config_toml(buf.str(), path);
}

std::string config_to_toml(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "f0 = " << cfg.f0 << "\n"
     << "sigma_f = " << cfg.sigma_f << "\n"
     << "f_center = " << cfg.f_center << "\n"
     << "delta_l = " << cfg.delta_l << "\n"
     << "laser_linewidth = " << cfg.laser_linewidth << "\n"
     << "pair_rate = " << cfg.pair_rate << "\n"
     << "singles_rate = " << cfg.singles_rate << "\n"
     << "t_res = " << cfg.t_res << "\n"
     << "dead_time = " << cfg.dead_time << "\n"
     << "window = " << cfg.window << "\n"
     << "theta0 = " << cfg.theta0 << "\n"
     << "mode = \"" << to_string(cfg.mode) << "\"\n"
     << "seed = " << cfg.seed << "\n"
     << "duration = " << cfg.duration << "\n";
  return os.str();
}

}  // namespace franson
