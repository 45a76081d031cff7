#include "holeburn/chirp.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "holeburn/constants.hpp"

namespace holeburn {

namespace {

using Cplx = std::complex<double>;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double signed_frequency(std::size_t k, std::size_t n, double dt) {
  const double df = 1.0 / (static_cast<double>(n) * dt);
  return (k <= n / 2) ? k * df : (static_cast<double>(k) - n) * df;
}

// Fraction of the record the recovered response occupies (participation
// ratio of |w|^2). A matched kernel concentrates the response into the hole;
// a sign or rate mismatch leaves it smeared over the sweep.
double occupancy_metric(const std::vector<Cplx>& w, std::size_t n) {
  double e2 = 0.0, e4 = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::norm(w[i]);
    e2 += p;
    e4 += p * p;
    peak = std::max(peak, p);
  }
  if (peak < 1e-12) return 0.0;  // flat trace: nothing to mismatch
  return (e2 * e2 / e4) / static_cast<double>(n);
}

}  // namespace

std::vector<std::string> ChirpReadout::validate() const {
  std::vector<std::string> v;
  if (!(span_hz > 0.0)) v.push_back("span_hz: must be > 0");
  if (!(duration_s > 0.0)) v.push_back("duration_s: must be > 0");
  if (!is_power_of_two(n_samples) || n_samples < 1024) {
    v.push_back("n_samples: must be a power of two >= 1024");
  }
  return v;
}

std::vector<std::string> HoleProfile::validate() const {
  std::vector<std::string> v;
  if (!(fwhm_hz > 0.0)) v.push_back("fwhm_hz: must be > 0");
  if (!(depth > 0.0 && depth <= 1.0)) v.push_back("depth: outside (0,1]");
  if (baseline_absorption < 0.0) {
    v.push_back("baseline_absorption: must be >= 0");
  }
  return v;
}

DecayTrace simulate_chirped_transmission(const HoleProfile& hole,
                                         const ChirpReadout& chirp) {
  if (auto v = chirp.validate(); !v.empty()) {
    throw std::invalid_argument("ChirpReadout: " + v.front());
  }
  if (auto v = hole.validate(); !v.empty()) {
    throw std::invalid_argument("HoleProfile: " + v.front());
  }
  if (std::abs(hole.center_hz) > 0.5 * chirp.span_hz) {
    throw std::invalid_argument("hole center outside the chirp span");
  }

  const double rate = chirp.rate_hz_per_s();
  const double dt_out = chirp.duration_s / chirp.n_samples;

  // Internal grid: sample rate at least 4x the span (zero-padded window),
  // plus enough tail to let the hole's free-induction decay ring out
  // instead of wrapping around.
  int oversample = 1;
  while (static_cast<double>(chirp.n_samples) * oversample /
             chirp.duration_s <
         4.0 * chirp.span_hz) {
    oversample <<= 1;
  }
  const double dt = dt_out / oversample;
  const double tail_s =
      std::max(chirp.duration_s, 14.0 / (kPi * hole.fwhm_hz));
  const std::size_t m =
      next_pow2(static_cast<std::size_t>(
          std::ceil((chirp.duration_s + tail_s) / dt)));

  // Chirped field over the pulse, zero outside; instantaneous frequency
  // sweeps -span/2 -> +span/2.
  std::vector<Cplx> field(m, Cplx(0.0, 0.0));
  const std::size_t n_pulse =
      std::min<std::size_t>(m, static_cast<std::size_t>(
                                   std::llround(chirp.duration_s / dt)));
  for (std::size_t j = 0; j < n_pulse; ++j) {
    const double t = j * dt - 0.5 * chirp.duration_s;
    const double phase = kPi * rate * t * t;
    field[j] = Cplx(std::cos(phase), std::sin(phase));
  }

  Eigen::FFT<double> fft;
  std::vector<Cplx> spec;
  fft.fwd(spec, field);

  // Transfer function: flat background absorption with a complex Lorentzian
  // hole (absorption dip + its dispersion phase).
  const double gamma = 0.5 * hole.fwhm_hz;
  const double g0 = 0.5 * hole.baseline_absorption * hole.depth;
  for (std::size_t k = 0; k < m; ++k) {
    const double f = signed_frequency(k, m, dt);
    const Cplx pole = g0 * gamma / Cplx(gamma, f - hole.center_hz);
    spec[k] *= std::exp(Cplx(-0.5 * hole.baseline_absorption, 0.0) + pole);
  }

  std::vector<Cplx> out;
  fft.inv(out, spec);

  DecayTrace trace;
  trace.kind = TraceKind::HoleProfile;
  trace.samples.reserve(chirp.n_samples);
  for (int j = 0; j < chirp.n_samples; ++j) {
    const Cplx e = out[static_cast<std::size_t>(j) * oversample];
    trace.samples.push_back({j * dt_out, std::norm(e), 0.0});
  }

  const double ratio = rate / (hole.fwhm_hz * hole.fwhm_hz);
  std::ostringstream ratio_os;
  ratio_os << ratio;
  trace.metadata["chirp_span_hz"] = std::to_string(chirp.span_hz);
  trace.metadata["chirp_duration_s"] = std::to_string(chirp.duration_s);
  trace.metadata["f_start_hz"] = std::to_string(-0.5 * chirp.span_hz);
  trace.metadata["distortion_ratio"] = ratio_os.str();
  trace.metadata["distorted"] = ratio > kPi ? "true" : "false";
  return trace;
}

SpectralProfile deconvolve_chirp(const DecayTrace& trace,
                                 const ChirpReadout& chirp,
                                 const DeconvolveOptions& opts) {
  if (auto v = chirp.validate(); !v.empty()) {
    throw std::invalid_argument("ChirpReadout: " + v.front());
  }
  const std::size_t n = trace.samples.size();
  if (n < 16) throw std::invalid_argument("trace too short to deconvolve");

  const double dt = trace.samples[1].x - trace.samples[0].x;
  for (std::size_t i = 1; i < n; ++i) {
    const double step = trace.samples[i].x - trace.samples[i - 1].x;
    if (std::abs(step - dt) > 1e-6 * dt) {
      throw std::invalid_argument("non-uniform sampling in readout trace");
    }
  }

  // Relative modulation around the flat background; the median is robust to
  // the (narrow) hole.
  std::vector<double> sorted;
  sorted.reserve(n);
  for (const auto& s : trace.samples) sorted.push_back(s.y);
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  const double baseline = sorted[n / 2];
  if (!(baseline > 0.0)) {
    throw std::invalid_argument("readout trace baseline is not positive");
  }

  const std::size_t m = next_pow2(n);
  const double rate =
      opts.invert_rate ? -chirp.rate_hz_per_s() : chirp.rate_hz_per_s();
  Eigen::FFT<double> fft;

  // The detected beat is 2*Re(z) + |z|^2 with z the complex response riding
  // on the sweep. The transform of 2*Re(z) holds two mirrored copies that do
  // not overlap because the hole response is one-sided in the conjugate
  // variable: keep the copy the causal response populates, discard the
  // mirror, and undo the sweep's quadratic phase with the unit-magnitude
  // kernel fixed by the chirp alone. The |z|^2 detection term lands in the
  // kept half too, so it is estimated from the current z and subtracted in a
  // short fixed-point iteration.
  std::vector<Cplx> mod(m), spec, z_est, corrected;
  double power_in = 0.0;
  double power_out = 0.0;
  for (int pass = 0; pass < 3; ++pass) {
    for (std::size_t i = 0; i < m; ++i) {
      double x = 0.0;
      if (i < n) {
        x = trace.samples[i].y / baseline - 1.0;
        if (pass > 0) x -= std::norm(z_est[i]);
      }
      mod[i] = Cplx(x, 0.0);
    }
    fft.fwd(spec, mod);
    power_in = 0.0;
    power_out = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double u = signed_frequency(k, m, dt);
      if (u > 0.0) {
        spec[k] = Cplx(0.0, 0.0);
        continue;
      }
      power_in += std::norm(spec[k]) / static_cast<double>(m);
      const double phase = -kPi * u * u / rate;
      spec[k] *= Cplx(std::cos(phase), std::sin(phase));
      power_out += std::norm(spec[k]) / static_cast<double>(m);
    }
    if (pass < 2) {
      // re-chirp the one-sided spectrum to estimate z for the next pass
      std::vector<Cplx> half = spec;
      for (std::size_t k = 0; k < m; ++k) {
        const double u = signed_frequency(k, m, dt);
        const double phase = kPi * u * u / rate;
        half[k] *= Cplx(std::cos(phase), std::sin(phase));
      }
      fft.inv(z_est, half);
    }
  }
  fft.inv(corrected, spec);

  SpectralProfile profile;
  profile.freq_hz.resize(static_cast<Eigen::Index>(n));
  profile.absorbance.resize(static_cast<Eigen::Index>(n));
  const double f_start = -0.5 * chirp.span_hz;
  const double base_absorbance = -std::log(baseline);
  for (std::size_t i = 0; i < n; ++i) {
    const Cplx w = corrected[i];
    const double transmission =
        std::max(std::norm(Cplx(1.0, 0.0) + w), 1e-30);
    profile.freq_hz[static_cast<Eigen::Index>(i)] =
        f_start + chirp.rate_hz_per_s() * trace.samples[i].x;
    profile.absorbance[static_cast<Eigen::Index>(i)] =
        base_absorbance - std::log(transmission);
  }
  profile.power_in = power_in;
  profile.power_out = power_out;
  profile.ringing_metric = occupancy_metric(corrected, n);

  if (profile.ringing_metric > opts.ringing_threshold) {
    std::ostringstream os;
    os << "residual ringing metric " << profile.ringing_metric
       << " exceeds threshold " << opts.ringing_threshold
       << " (chirp parameters likely mismatch the acquisition)";
    throw std::runtime_error(os.str());
  }
  return profile;
}

DecayTrace profile_to_trace(const SpectralProfile& profile) {
  DecayTrace trace;
  trace.kind = TraceKind::HoleProfile;
  trace.metadata["abscissa"] = "f_hz";
  trace.samples.reserve(static_cast<std::size_t>(profile.freq_hz.size()));
  for (Eigen::Index i = 0; i < profile.freq_hz.size(); ++i) {
    trace.samples.push_back({profile.freq_hz[i], profile.absorbance[i], 0.0});
  }
  return trace;
}

}  // namespace holeburn
