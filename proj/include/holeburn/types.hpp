#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "holeburn/constants.hpp"

namespace holeburn {

enum class Site { SiteI, SiteII };

/// Level structure of one crystallographic site: the lowest ground and
/// excited crystal-field levels, each split into four hyperfine sublevels
/// labeled 1..4 by increasing energy.
///
/// branching(i, j) is the probability that an optical decay starting from
/// excited sublevel i+1 ends in ground sublevel j+1; every row sums to 1.
struct HyperfineSystem {
  Site site = Site::SiteII;
  double t_opt_s = 1.3e-3;                    // optical lifetime
  Eigen::Matrix4d branching = Eigen::Matrix4d::Constant(0.25);
  std::optional<Eigen::Vector4d> ground_energies_j;  // strictly increasing
  double n_total = 1.0;                       // subclass population

  // Scalar ratios consumed by the relaxation models.
  double beta14() const { return branching(0, 3); }
  double beta11_plus_12() const { return branching(0, 0) + branching(0, 1); }
  double beta_bar() const {
    return (branching(1, 3) + branching(2, 3) + branching(3, 3)) / 3.0;
  }
};

/// Checks every HyperfineSystem invariant; returns one human-readable string
/// per violation (empty list means the system is valid). Pure and idempotent.
std::vector<std::string> validate_system(const HyperfineSystem& sys);

/// Populations of the 4 ground and 4 excited hyperfine sublevels of the
/// laser-resonant subclass at one instant. Index 0..3 = sublevels 1..4.
/// The lumped flip-flop system stores the combined 1g+2g population in
/// n_g[0] and leaves n_g[1] at zero.
struct PopulationState {
  Eigen::Vector4d n_g = Eigen::Vector4d::Zero();
  Eigen::Vector4d n_e = Eigen::Vector4d::Zero();
  double t_s = 0.0;

  double total() const { return n_g.sum() + n_e.sum(); }
};

/// Parameters of the flip-flop-dominated regime (low temperature): optical
/// decay plus resonant 3g<->4g state exchange at rate 1/t_ff.
struct FfParams {
  double t_ff_s = 1.91e-3;       // characteristic 3g<->4g flip-flop time
  double n0 = 1.0;               // initial 1e population N
  double beta14 = 0.72;
  double beta11_plus_12 = 0.21;
  double t_opt_s = 1.3e-3;
  double scale_c = 1.0;          // hole-area proportionality constant

  std::vector<std::string> validate() const;
};

/// Parameters of the spin-lattice-relaxation regime (high temperature):
/// every sublevel relaxes to each of the other three at rate 1/(3*t_spin),
/// so the overall SLR rate of one level is 1/t_spin.
struct SlrParams {
  double t_spin_s = 1e-3;        // T_S
  double n0 = 1.0;               // initial 1e population N
  double beta14 = 0.54;
  double beta_bar = 0.153;       // (beta_24 + beta_34 + beta_44)/3
  double t_opt_s = 1.3e-3;

  std::vector<std::string> validate() const;
};

/// Coefficients of the spin-lattice relaxation rate law
///   R(T) = alpha_d*T + alpha_r*T^9 + alpha_o/(exp(delta/kT) - 1).
struct RateLawParams {
  double alpha_d_hz_per_k = 0.0;   // one-phonon direct process
  double alpha_r_hz_per_k9 = 0.0;  // two-phonon Raman process
  double alpha_o_hz = 0.0;         // Orbach process
  double delta_j = 0.0;            // crystal-field gap
  double t_min_k = 0.0;            // stated range of validity
  double t_max_k = 20.0;

  std::vector<std::string> validate() const;
};

/// Homogeneous linewidth vs temperature: Gamma_h(T) = gamma_h0 + gamma_r*T^9.
struct LinewidthModel {
  double gamma_h0_hz = 0.0;        // FWHM at T=0
  double gamma_r_hz_per_k9 = 0.0;

  std::vector<std::string> validate() const;
};

enum class TraceKind {
  HoleArea,
  Echo2P,
  Echo3P_vs_TW,
  Echo3P_vs_tau,
  HoleProfile,
  TemperatureSeries,  // x = temperature (K): rate or linewidth series
  EchoTrain,          // x = pulse-sequence index
};

std::string to_string(TraceKind kind);
TraceKind trace_kind_from_string(const std::string& name);

/// One measured or synthesized data series. The abscissa meaning depends on
/// kind: seconds for decays and raw readout traces, kelvin for temperature
/// series, a pulse index for echo trains, Hz for corrected hole profiles.
struct DecayTrace {
  struct Sample {
    double x = 0.0;
    double y = 0.0;
    double sigma_y = 0.0;  // meaningful only when has_sigma
  };

  std::vector<Sample> samples;
  TraceKind kind = TraceKind::HoleArea;
  double temperature_k = 0.0;  // 0 = unknown
  bool has_sigma = false;
  std::map<std::string, std::string> metadata;

  std::size_t size() const { return samples.size(); }
};

/// Result of one least-squares fit. `values` covers every model parameter
/// (frozen ones included); frozen parameters carry zero stderr and zero
/// covariance rows.
struct FitResult {
  std::vector<std::string> param_names;
  Eigen::VectorXd values;
  Eigen::VectorXd stderrs;
  Eigen::MatrixXd covariance;
  double chi2 = 0.0;
  int dof = 0;
  bool converged = false;
  int n_iter = 0;

  int index_of(const std::string& name) const;
  double value_of(const std::string& name) const;
  double stderr_of(const std::string& name) const;
};

}  // namespace holeburn
