#include "holeburn/types.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace holeburn {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::vector<std::string> validate_system(const HyperfineSystem& sys) {
  std::vector<std::string> violations;
  if (!finite_positive(sys.t_opt_s)) {
    violations.push_back("t_opt_s: must be finite and > 0");
  }
  for (int i = 0; i < 4; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double b = sys.branching(i, j);
      if (!(b >= 0.0 && b <= 1.0)) {
        std::ostringstream os;
        os << "branching(" << i + 1 << "," << j + 1 << "): value " << b
           << " outside [0,1]";
        violations.push_back(os.str());
      }
      row_sum += b;
    }
    if (std::abs(row_sum - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "branching row " << i + 1 << ": sums to " << row_sum
         << ", expected 1 within 1e-9";
      violations.push_back(os.str());
    }
  }
  if (sys.ground_energies_j) {
    const Eigen::Vector4d& e = *sys.ground_energies_j;
    for (int i = 0; i < 3; ++i) {
      if (!(e[i + 1] > e[i])) {
        std::ostringstream os;
        os << "ground_energies_j: not strictly increasing between levels "
           << i + 1 << " and " << i + 2;
        violations.push_back(os.str());
      }
    }
  }
  if (!(std::isfinite(sys.n_total) && sys.n_total > 0.0)) {
    violations.push_back("n_total: must be finite and > 0");
  }
  return violations;
}

std::vector<std::string> FfParams::validate() const {
  std::vector<std::string> v;
  if (!(t_ff_s > 0.0)) v.push_back("t_ff_s: must be > 0");
  if (!finite_positive(n0)) v.push_back("n0: must be > 0");
  if (!(beta14 >= 0.0 && beta14 <= 1.0)) v.push_back("beta14: outside [0,1]");
  if (!(beta11_plus_12 >= 0.0 && beta11_plus_12 <= 1.0)) {
    v.push_back("beta11_plus_12: outside [0,1]");
  }
  if (beta14 + beta11_plus_12 > 1.0 + 1e-12) {
    v.push_back("beta14 + beta11_plus_12: exceeds 1");
  }
  if (!finite_positive(t_opt_s)) v.push_back("t_opt_s: must be > 0");
  return v;
}

std::vector<std::string> SlrParams::validate() const {
  std::vector<std::string> v;
  if (!(t_spin_s > 0.0)) v.push_back("t_spin_s: must be > 0");
  if (!finite_positive(n0)) v.push_back("n0: must be > 0");
  if (!(beta14 >= 0.0 && beta14 <= 1.0)) v.push_back("beta14: outside [0,1]");
  if (!(beta_bar >= 0.0 && beta_bar <= 1.0)) v.push_back("beta_bar: outside [0,1]");
  if (!finite_positive(t_opt_s)) v.push_back("t_opt_s: must be > 0");
  return v;
}

std::vector<std::string> RateLawParams::validate() const {
  std::vector<std::string> v;
  if (alpha_d_hz_per_k < 0.0) v.push_back("alpha_d_hz_per_k: must be >= 0");
  if (alpha_r_hz_per_k9 < 0.0) v.push_back("alpha_r_hz_per_k9: must be >= 0");
  if (alpha_o_hz < 0.0) v.push_back("alpha_o_hz: must be >= 0");
  if (alpha_o_hz > 0.0 && !(delta_j > 0.0)) {
    v.push_back("delta_j: must be > 0 when alpha_o_hz > 0");
  }
  return v;
}

std::vector<std::string> LinewidthModel::validate() const {
  std::vector<std::string> v;
  if (gamma_h0_hz < 0.0) v.push_back("gamma_h0_hz: must be >= 0");
  if (gamma_r_hz_per_k9 < 0.0) v.push_back("gamma_r_hz_per_k9: must be >= 0");
  return v;
}

std::string to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::HoleArea: return "HoleArea";
    case TraceKind::Echo2P: return "Echo2P";
    case TraceKind::Echo3P_vs_TW: return "Echo3P_vs_TW";
    case TraceKind::Echo3P_vs_tau: return "Echo3P_vs_tau";
    case TraceKind::HoleProfile: return "HoleProfile";
    case TraceKind::TemperatureSeries: return "TemperatureSeries";
    case TraceKind::EchoTrain: return "EchoTrain";
  }
  return "unknown";
}

TraceKind trace_kind_from_string(const std::string& name) {
  static const std::map<std::string, TraceKind> table = {
      {"HoleArea", TraceKind::HoleArea},
      {"Echo2P", TraceKind::Echo2P},
      {"Echo3P_vs_TW", TraceKind::Echo3P_vs_TW},
      {"Echo3P_vs_tau", TraceKind::Echo3P_vs_tau},
      {"HoleProfile", TraceKind::HoleProfile},
      {"TemperatureSeries", TraceKind::TemperatureSeries},
      {"EchoTrain", TraceKind::EchoTrain},
  };
  auto it = table.find(name);
  if (it == table.end()) {
    throw std::invalid_argument("unknown trace kind '" + name + "'");
  }
  return it->second;
}

int FitResult::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i) {
    if (param_names[i] == name) return static_cast<int>(i);
  }
  throw std::invalid_argument("no fit parameter named '" + name + "'");
}

double FitResult::value_of(const std::string& name) const {
  return values[index_of(name)];
}

double FitResult::stderr_of(const std::string& name) const {
  return stderrs[index_of(name)];
}

}  // namespace holeburn
