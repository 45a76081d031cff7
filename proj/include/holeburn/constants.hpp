#pragma once

#include <numbers>

// Unit conventions, used consistently across the library and all file formats:
//   times        seconds
//   rates        Hz
//   linewidths   Hz, always FWHM
//   temperatures kelvin
//   energies     joules

namespace holeburn {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K (exact, SI 2019)
inline constexpr double kPi = std::numbers::pi;

/// Coherence time from a FWHM homogeneous linewidth: T2 = 1/(pi*Gamma_h).
inline constexpr double coherence_time_s(double gamma_h_hz) {
  return 1.0 / (kPi * gamma_h_hz);
}

/// FWHM homogeneous linewidth from a coherence time: Gamma_h = 1/(pi*T2).
inline constexpr double linewidth_hz(double t2_s) { return 1.0 / (kPi * t2_s); }

}  // namespace holeburn
