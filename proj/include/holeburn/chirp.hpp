#pragma once

#include <Eigen/Dense>

#include "holeburn/types.hpp"

namespace holeburn {

/// Linearly chirped readout pulse: frequency swept over span_hz during
/// duration_s, recorded on n_samples points (power of two, >= 1024).
struct ChirpReadout {
  double span_hz = 2e6;
  double duration_s = 60e-6;
  int n_samples = 4096;

  double rate_hz_per_s() const { return span_hz / duration_s; }
  std::vector<std::string> validate() const;
};

/// Lorentzian spectral hole in an otherwise flat absorption background.
/// center_hz is relative to the middle of the chirp span; depth = 1 means a
/// fully transparent hole center; baseline_absorption is the background
/// absorbance (-ln of intensity transmission).
struct HoleProfile {
  double center_hz = 0.0;
  double fwhm_hz = 56.6e3;
  double depth = 0.5;
  double baseline_absorption = 1.0;

  std::vector<std::string> validate() const;
};

/// Unit-peak Lorentzian, FWHM parameterization.
inline double lorentzian_unit(double x, double center, double fwhm) {
  const double hw = 0.5 * fwhm;
  const double d = x - center;
  return hw * hw / (d * d + hw * hw);
}

/// Detected intensity of a chirped pulse transmitted through the hole,
/// sampled over the pulse duration. The hole acts as a complex transfer
/// function (Lorentzian absorption plus its dispersion phase); when the
/// sweep is fast the re-emitted field beats against the instantaneous laser
/// frequency and distorts the profile. Metadata records the chirp
/// parameters, the time->frequency mapping and the distortion indicator
/// rate/fwhm^2 (flagged distorted above pi, the fast-sweep regime).
DecayTrace simulate_chirped_transmission(const HoleProfile& hole,
                                         const ChirpReadout& chirp);

struct DeconvolveOptions {
  // Mismatched chirp parameters leave the response smeared; matched ones
  // concentrate it (occupancy well below 0.1 in practice). Above this
  // threshold the deconvolution refuses the result.
  double ringing_threshold = 0.15;
  bool invert_rate = false;  // flip the kernel sign (diagnostics)
};

/// Absorption profile recovered from a distorted readout trace.
struct SpectralProfile {
  Eigen::ArrayXd freq_hz;     // relative to the chirp center
  Eigen::ArrayXd absorbance;  // -ln of recovered intensity transmission
  double ringing_metric = 0.0;
  double power_in = 0.0;   // modulation power entering the correction
  double power_out = 0.0;  // modulation power after the correction
};

/// Inverts the fast-chirp distortion by multiplying the Fourier-transformed
/// modulation signal with the unit-magnitude quadratic-phase kernel
/// exp(-i*pi*u^2/rate) fixed entirely by the chirp parameters, then maps the
/// time axis to frequency. Throws on non-uniform sampling and when the
/// residual ringing metric exceeds the configured threshold (chirp-parameter
/// mismatch).
SpectralProfile deconvolve_chirp(const DecayTrace& trace,
                                 const ChirpReadout& chirp,
                                 const DeconvolveOptions& opts = {});

/// Recovered profile as a trace (kind = HoleProfile, abscissa in Hz) so it
/// can be written with the standard CSV writer.
DecayTrace profile_to_trace(const SpectralProfile& profile);

}  // namespace holeburn
