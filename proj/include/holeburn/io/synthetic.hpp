#pragma once

#include <cstdint>
#include <random>

#include "holeburn/fit/adapters.hpp"
#include "holeburn/types.hpp"

namespace holeburn::io {

/// Seedable, portable noise source: a mersenne-twister mt19937_64 stream
/// (bit-exact across platforms by the standard) feeding a Box-Muller
/// transform written out explicitly, so the same seed reproduces the same
/// gaussians everywhere.
class NoiseRng {
 public:
  explicit NoiseRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal deviate (Box-Muller, pair-cached).
  double gauss() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * kPi * u2;
    cached_ = r * std::sin(phi);
    has_cached_ = true;
    return r * std::cos(phi);
  }

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

/// Grid and noise recipe for one synthetic trace.
struct SyntheticRequest {
  TraceKind kind = TraceKind::HoleArea;
  double x_min = 0.0;
  double x_max = 6e-3;
  int n_points = 50;
  bool log_spacing = false;
  double noise_frac = 0.0;  // multiplicative gaussian, sigma = frac*|model|
  double temperature_k = 0.0;
  std::map<std::string, std::string> metadata;
};

/// Samples the adapter's model at the truth parameters over the requested
/// grid and perturbs each point with seeded multiplicative gaussian noise;
/// noise_frac = 0 reproduces the model exactly (and omits the sigma column).
/// Deterministic for a fixed seed state of rng.
DecayTrace generate_synthetic(const fit::ModelAdapter& adapter,
                              const Eigen::VectorXd& truth,
                              const SyntheticRequest& req, NoiseRng& rng);

/// Truth record (JSON) describing how a synthetic trace was produced.
std::string truth_record_json(const fit::ModelAdapter& adapter,
                              const Eigen::VectorXd& truth,
                              const SyntheticRequest& req,
                              std::uint64_t seed);

}  // namespace holeburn::io
