#include "holeburn/io/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace holeburn::io {

namespace {

[[noreturn]] void fail(const std::string& label, int line,
                       const std::string& msg) {
  std::ostringstream os;
  os << label << ":" << line << ": " << msg;
  throw std::runtime_error(os.str());
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

ConfigValue parse_value(const std::string& raw, const std::string& label,
                        int line) {
  if (raw.empty()) fail(label, line, "empty value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') {
      fail(label, line, "unterminated string");
    }
    return raw.substr(1, raw.size() - 2);
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (raw.front() == '[') {
    if (raw.back() != ']') fail(label, line, "unterminated array");
    std::vector<double> values;
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string v = trim(item);
      if (v.empty()) continue;
      try {
        std::size_t pos = 0;
        values.push_back(std::stod(v, &pos));
        if (pos != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        fail(label, line, "cannot parse array element '" + v + "'");
      }
    }
    return values;
  }
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    fail(label, line, "cannot parse value '" + raw + "'");
  }
}

}  // namespace

bool ConfigFile::has(const std::string& key) const {
  return entries.count(key) > 0;
}

double ConfigFile::number(const std::string& key) const {
  const auto it = entries.find(key);
  if (it == entries.end()) {
    throw std::invalid_argument("config key '" + key + "' is missing");
  }
  if (const auto* v = std::get_if<double>(&it->second)) return *v;
  throw std::invalid_argument("config key '" + key + "' is not a number");
}

double ConfigFile::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

bool ConfigFile::boolean_or(const std::string& key, bool fallback) const {
  const auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  if (const auto* v = std::get_if<bool>(&it->second)) return *v;
  throw std::invalid_argument("config key '" + key + "' is not a boolean");
}

std::string ConfigFile::text(const std::string& key) const {
  const auto it = entries.find(key);
  if (it == entries.end()) {
    throw std::invalid_argument("config key '" + key + "' is missing");
  }
  if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
  throw std::invalid_argument("config key '" + key + "' is not a string");
}

std::string ConfigFile::text_or(const std::string& key,
                                const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

std::vector<double> ConfigFile::array(const std::string& key) const {
  const auto it = entries.find(key);
  if (it == entries.end()) {
    throw std::invalid_argument("config key '" + key + "' is missing");
  }
  if (const auto* v = std::get_if<std::vector<double>>(&it->second)) {
    return *v;
  }
  throw std::invalid_argument("config key '" + key + "' is not an array");
}

ConfigFile parse_config_text(const std::string& text,
                             const std::string& label) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(label, lineno, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) fail(label, lineno, "empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(label, lineno, "expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail(label, lineno, "empty key");
    // arrays may span lines until the closing bracket
    while (!value.empty() && value.front() == '[' && value.back() != ']') {
      std::string more;
      if (!std::getline(in, more)) {
        fail(label, lineno, "unterminated array");
      }
      ++lineno;
      const auto more_hash = more.find('#');
      value += trim(more_hash == std::string::npos
                        ? more
                        : more.substr(0, more_hash));
    }
    const std::string full = section.empty() ? key : section + "." + key;
    cfg.entries[full] = parse_value(value, label, lineno);
  }
  return cfg;
}

ConfigFile parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

RunConfig RunConfig::from_file(const ConfigFile& cfg) {
  RunConfig rc;

  const std::string site = cfg.text_or("system.site", "SiteII");
  if (site == "SiteI") {
    rc.system.site = Site::SiteI;
  } else if (site == "SiteII") {
    rc.system.site = Site::SiteII;
  } else {
    throw std::invalid_argument("system.site must be SiteI or SiteII");
  }
  rc.system.t_opt_s = cfg.number_or("system.t_opt_s", rc.system.t_opt_s);
  rc.system.n_total = cfg.number_or("system.n_total", rc.system.n_total);
  if (cfg.has("system.branching")) {
    const auto b = cfg.array("system.branching");
    if (b.size() != 16) {
      throw std::invalid_argument(
          "system.branching must hold 16 row-major entries");
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) rc.system.branching(i, j) = b[i * 4 + j];
    }
    rc.branching_given = true;
  }
  if (cfg.has("system.ground_energies_j")) {
    const auto e = cfg.array("system.ground_energies_j");
    if (e.size() != 4) {
      throw std::invalid_argument("system.ground_energies_j must hold 4 entries");
    }
    rc.system.ground_energies_j = Eigen::Vector4d(e[0], e[1], e[2], e[3]);
  }
  if (const auto violations = validate_system(rc.system); !violations.empty()) {
    throw std::invalid_argument("invalid system config: " + violations.front());
  }

  rc.model_name = cfg.text_or("model.name", "");
  for (const auto& [key, value] : cfg.entries) {
    if (key.rfind("params.", 0) == 0) {
      if (const auto* v = std::get_if<double>(&value)) {
        rc.param_overrides[key.substr(7)] = *v;
      } else {
        throw std::invalid_argument("params." + key.substr(7) +
                                    " must be a number");
      }
    }
  }

  rc.chirp.span_hz = cfg.number_or("chirp.span_hz", rc.chirp.span_hz);
  rc.chirp.duration_s = cfg.number_or("chirp.duration_s", rc.chirp.duration_s);
  rc.chirp.n_samples =
      static_cast<int>(cfg.number_or("chirp.n_samples", rc.chirp.n_samples));
  rc.hole.center_hz = cfg.number_or("hole.center_hz", rc.hole.center_hz);
  rc.hole.fwhm_hz = cfg.number_or("hole.fwhm_hz", rc.hole.fwhm_hz);
  rc.hole.depth = cfg.number_or("hole.depth", rc.hole.depth);
  rc.hole.baseline_absorption =
      cfg.number_or("hole.baseline_absorption", rc.hole.baseline_absorption);

  rc.seed = static_cast<std::uint64_t>(cfg.number_or("run.seed", 0.0));
  rc.out_dir = cfg.text_or("run.out_dir", rc.out_dir);

  rc.x_min = cfg.number_or("grid.x_min", rc.x_min);
  rc.x_max = cfg.number_or("grid.x_max", rc.x_max);
  rc.n_points = static_cast<int>(cfg.number_or("grid.n", rc.n_points));
  rc.log_spacing = cfg.text_or("grid.spacing", "linear") == "log";
  rc.noise_frac = cfg.number_or("noise.frac", rc.noise_frac);

  rc.rate_law.alpha_d_hz_per_k = cfg.number_or("ratelaw.alpha_d", 0.0);
  rc.rate_law.alpha_r_hz_per_k9 = cfg.number_or("ratelaw.alpha_r", 0.0);
  rc.rate_law.alpha_o_hz = cfg.number_or("ratelaw.alpha_o", 0.0);
  rc.rate_law.delta_j = cfg.number_or("ratelaw.delta_j", 0.0);
  rc.linewidth.gamma_h0_hz = cfg.number_or("linewidth.gamma_h0_hz", 0.0);
  rc.linewidth.gamma_r_hz_per_k9 = cfg.number_or("linewidth.gamma_r", 0.0);

  return rc;
}

}  // namespace holeburn::io
