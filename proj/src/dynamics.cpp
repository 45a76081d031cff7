#include "holeburn/dynamics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace holeburn {

namespace {

void require_nonnegative_time(double t) {
  if (!(t >= 0.0)) throw std::domain_error("time must be >= 0");
}

void require_valid(const std::vector<std::string>& violations, const char* what) {
  if (!violations.empty()) {
    throw std::invalid_argument(std::string(what) + ": " + violations.front());
  }
}

}  // namespace

double exp_difference_quotient(double a, double b, double t) {
  if (b < a) std::swap(a, b);  // symmetric in (a, b); keep x >= 0 below
  const double x = (b - a) * t;
  if (x < 1e-9) {
    // (1 - e^-x)/x expanded around x = 0
    return t * std::exp(-a * t) *
           (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0);
  }
  return t * std::exp(-a * t) * (-std::expm1(-x)) / x;
}

double ff_population_deficit(const FfParams& p, double t_s) {
  require_nonnegative_time(t_s);
  require_valid(p.validate(), "FfParams");

  const double q = 1.0 / p.t_opt_s;   // optical decay rate
  const double r = 2.0 / p.t_ff_s;    // relaxation rate of the 3g/4g imbalance
  const double b_inf = 0.5 * p.beta11_plus_12;
  // forcing coefficient of the e^(-t/Topt) drive on the deficit
  const double k = p.beta14 * q - (1.0 - p.beta11_plus_12) * (r / 2.0);

  const double e_r = std::exp(-r * t_s);
  return p.n0 * (e_r + b_inf * (1.0 - e_r)) -
         p.n0 * k * exp_difference_quotient(q, r, t_s);
}

double slr_population_1e(const SlrParams& p, double t_s) {
  require_nonnegative_time(t_s);
  require_valid(p.validate(), "SlrParams");
  const double q = 1.0 / p.t_opt_s;
  const double r = 4.0 / (3.0 * p.t_spin_s);
  return 0.25 * p.n0 * std::exp(-q * t_s) * (3.0 * std::exp(-r * t_s) + 1.0);
}

double slr_population_deficit(const SlrParams& p, double t_s) {
  require_nonnegative_time(t_s);
  require_valid(p.validate(), "SlrParams");

  const double q = 1.0 / p.t_opt_s;
  const double r = 4.0 / (3.0 * p.t_spin_s);
  // Deficit ODE: D' = -r D + N*P e^(-q t) + N*Q e^(-(q+r) t) with D(0) = N.
  const double cap_p = 0.25 * (r - q * (p.beta14 + 3.0 * p.beta_bar));
  const double b2 = 0.75 * p.n0 * (p.beta14 - p.beta_bar);

  const double e_r = std::exp(-r * t_s);
  return p.n0 * e_r + p.n0 * cap_p * exp_difference_quotient(q, r, t_s) +
         b2 * (std::exp(-(q + r) * t_s) - e_r);
}

Eigen::Vector4d equilibrium_populations(const HyperfineSystem& sys,
                                        double temperature_k,
                                        EquilibriumMode mode) {
  if (!(temperature_k > 0.0)) {
    throw std::domain_error("temperature must be > 0");
  }
  if (mode == EquilibriumMode::Auto) {
    mode = (temperature_k >= 1.0) ? EquilibriumMode::Equal
                                  : EquilibriumMode::Boltzmann;
  }
  if (mode == EquilibriumMode::Equal) {
    return Eigen::Vector4d::Constant(sys.n_total / 4.0);
  }
  if (!sys.ground_energies_j) {
    throw std::invalid_argument(
        "Boltzmann equilibrium requires ground_energies_j");
  }
  const Eigen::Vector4d& e = *sys.ground_energies_j;
  const double kt = kBoltzmann * temperature_k;
  // subtract the lowest energy so the weights never overflow
  Eigen::Array4d w = (-(e.array() - e.minCoeff()) / kt).exp();
  return sys.n_total * (w / w.sum()).matrix();
}

double estimate_spin_temperature(const Eigen::Vector4d& populations,
                                 const Eigen::Vector4d& energies_j) {
  for (int i = 0; i < 4; ++i) {
    if (!(populations[i] > 0.0)) {
      throw std::domain_error("populations must be > 0");
    }
    if (i < 3 && !(energies_j[i + 1] > energies_j[i])) {
      throw std::domain_error("energies must be strictly increasing");
    }
  }
  // log n_i = const - E_i/(kT): least-squares slope in (E, log n)
  const Eigen::Array4d x = energies_j.array();
  const Eigen::Array4d y = populations.array().log();
  const double xm = x.mean();
  const double ym = y.mean();
  const double sxx = ((x - xm) * (x - xm)).sum();
  const double sxy = ((x - xm) * (y - ym)).sum();
  const double slope = sxy / sxx;
  if (slope == 0.0) return std::numeric_limits<double>::infinity();
  if (slope > 0.0) {
    throw std::domain_error(
        "population increases with energy: negative/undefined temperature");
  }
  return -1.0 / (kBoltzmann * slope);
}

}  // namespace holeburn
