#include "holeburn/observables.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace holeburn {

double hole_area(const RegimeModel& model, double t_s) {
  if (const auto* ff = std::get_if<FfParams>(&model)) {
    return ff->scale_c * ff_population_deficit(*ff, t_s);
  }
  const SlrParams& slr = std::get<SlrParams>(model);
  return slr_population_deficit(slr, t_s);
}

double echo3_intensity(const SlrParams& p, const EchoSequence& seq,
                       double gamma_eff_hz) {
  if (!(seq.tau_d_s >= 0.0) || !(seq.t_w_s >= 0.0)) {
    throw std::domain_error("echo sequence times must be >= 0");
  }
  const double grating =
      slr_population_1e(p, seq.t_w_s) + slr_population_deficit(p, seq.t_w_s);
  double i = 0.25 * seq.i0 * grating * grating;
  if (gamma_eff_hz > 0.0) {
    i *= std::exp(-4.0 * kPi * seq.tau_d_s * gamma_eff_hz);
  }
  return i;
}

double echo2_intensity(double gamma_h_hz, double tau_d_s, double i0) {
  if (gamma_h_hz < 0.0 || tau_d_s < 0.0) {
    throw std::domain_error("gamma_h and tau_d must be >= 0");
  }
  return i0 * std::exp(-4.0 * kPi * tau_d_s * gamma_h_hz);
}

double slr_rate(const RateLawParams& p, double temperature_k) {
  if (!(temperature_k > 0.0)) {
    throw std::domain_error("temperature must be > 0");
  }
  if (const auto v = p.validate(); !v.empty()) {
    throw std::invalid_argument("RateLawParams: " + v.front());
  }
  double rate = p.alpha_d_hz_per_k * temperature_k +
                p.alpha_r_hz_per_k9 * std::pow(temperature_k, 9);
  if (p.alpha_o_hz > 0.0) {
    const double x = p.delta_j / (kBoltzmann * temperature_k);
    if (x < 700.0) rate += p.alpha_o_hz / std::expm1(x);
  }
  return rate;
}

double slr_time(const RateLawParams& p, double temperature_k) {
  const double rate = slr_rate(p, temperature_k);
  if (rate == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / rate;
}

double gamma_h_of_temperature(const LinewidthModel& m, double temperature_k) {
  if (!(temperature_k >= 0.0)) {
    throw std::domain_error("temperature must be >= 0");
  }
  return m.gamma_h0_hz + m.gamma_r_hz_per_k9 * std::pow(temperature_k, 9);
}

double direct_contribution(SpinRegime regime, double t_opt_s,
                           double t_spin_s) {
  if (!(t_opt_s > 0.0) || !(t_spin_s > 0.0)) {
    throw std::domain_error("lifetimes must be > 0");
  }
  const double optical = 1.0 / (2.0 * kPi * t_opt_s);
  const double spin = 1.0 / (2.0 * kPi * t_spin_s);
  return regime == SpinRegime::LowTemperature ? optical + spin
                                              : optical + 2.0 * spin;
}

double hole_width_to_gamma_h(double hole_fwhm_hz, double laser_fwhm_hz) {
  if (hole_fwhm_hz < 0.0 || laser_fwhm_hz < 0.0) {
    throw std::domain_error("linewidths must be >= 0");
  }
  const double gamma_h = 0.5 * (hole_fwhm_hz - 2.0 * laser_fwhm_hz);
  if (gamma_h < 0.0) {
    throw std::domain_error("laser-limited hole: width below 2*laser_fwhm");
  }
  return gamma_h;
}

double effective_linewidth_decompose(double gamma_eff_hz, double gamma_h_hz) {
  if (gamma_eff_hz < gamma_h_hz) {
    throw std::domain_error(
        "effective linewidth below homogeneous linewidth");
  }
  return gamma_eff_hz - gamma_h_hz;
}

}  // namespace holeburn
