#pragma once

#include "holeburn/dynamics.hpp"
#include "holeburn/types.hpp"

namespace holeburn {

/// Pulse timing and intensity scale of a stimulated-echo sequence.
struct EchoSequence {
  double tau_d_s = 0.0;  // delay between the first two pulses
  double t_w_s = 0.0;    // waiting time before the third pulse (3PE only)
  double i0 = 1.0;       // intensity scale
};

/// Spectral hole area at delay t: proportional to the 4g population deficit.
/// The flip-flop regime multiplies by FfParams::scale_c; the SLR regime folds
/// the proportionality constant into n0 (area scale = c*N as one number).
double hole_area(const RegimeModel& model, double t_s);

/// Three-pulse echo intensity vs waiting time, spectral diffusion neglected:
///   I(T_W) = (i0/4) * (n1e(T_W) + deficit(T_W))^2.
/// A nonzero gamma_eff_hz enables the spectral-diffusion damping factor
/// exp(-4*pi*tau_d*gamma_eff); it is off by default because tau_d is held
/// short and fixed in T_W scans.
double echo3_intensity(const SlrParams& p, const EchoSequence& seq,
                       double gamma_eff_hz = 0.0);

/// Two-pulse echo intensity: I(tau_d) = i0 * exp(-4*pi*tau_d*gamma_h).
double echo2_intensity(double gamma_h_hz, double tau_d_s, double i0);

/// Overall spin-lattice relaxation rate 1/T_S at the given temperature:
/// direct + Raman + Orbach terms. The Orbach exponential is overflow-guarded
/// (the term vanishes once delta/kT is large).
double slr_rate(const RateLawParams& p, double temperature_k);

/// Convenience inverse of slr_rate: T_S in seconds (+inf when the rate is 0).
double slr_time(const RateLawParams& p, double temperature_k);

/// Homogeneous linewidth vs temperature: gamma_h0 + gamma_r * T^9.
double gamma_h_of_temperature(const LinewidthModel& m, double temperature_k);

enum class SpinRegime { LowTemperature, HighTemperature };

/// Lifetime (T1-type) contribution to the homogeneous linewidth, FWHM Hz:
///   LT: 1/(2*pi*Topt) + 1/(2*pi*Tff)   (t_spin_s = flip-flop time)
///   HT: 1/(2*pi*Topt) + 2/(2*pi*Ts)    (t_spin_s = SLR time; both levels)
double direct_contribution(SpinRegime regime, double t_opt_s, double t_spin_s);

/// Homogeneous linewidth from a measured hole width after removing the
/// laser contribution twice: (hole - 2*laser)/2. Throws when the hole is
/// narrower than the laser-limited floor.
double hole_width_to_gamma_h(double hole_fwhm_hz, double laser_fwhm_hz = 28e3);

/// Spectral-diffusion part of an effective linewidth: gamma_eff - gamma_h.
/// Throws when the difference would be negative.
double effective_linewidth_decompose(double gamma_eff_hz, double gamma_h_hz);

}  // namespace holeburn
