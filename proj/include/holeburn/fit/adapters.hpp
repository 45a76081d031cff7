#pragma once

#include <functional>
#include <map>
#include <span>
#include <utility>

#include "holeburn/fit/engine.hpp"
#include "holeburn/types.hpp"

namespace holeburn::fit {

enum class AdapterName {
  FFHoleDecay,
  SLRHoleDecay,
  SLR3PE,
  Echo2P,
  OffsetExponential,
  PowerLawRate,
  GammaHvsT,
  EchoTrainCorrection,
  LorentzianProfile,
};

std::string to_string(AdapterName name);
AdapterName adapter_name_from_string(const std::string& s);

/// Binds one decay/lineshape model to the fit engine: parameter table
/// (free and frozen), the trace kinds it accepts, the model function and a
/// data-driven initial guess.
struct ModelAdapter {
  AdapterName name;
  std::vector<FreeParam> params;
  std::vector<TraceKind> accepts;
  std::function<double(double, const Eigen::VectorXd&)> model;
  std::function<void(const DecayTrace&, Eigen::VectorXd&)> init_guess;

  bool accepts_kind(TraceKind kind) const;
  int index_of(const std::string& pname) const;
  /// Freeze a parameter at a value (in place); used for --fix NAME=VAL.
  void fix(const std::string& pname, double value);
  /// Thaw a frozen parameter; used for --free NAME.
  void thaw(const std::string& pname);
};

/// Scalar branching ratios and lifetimes the adapters are built from. The
/// defaults are the site-II values used throughout: the flip-flop model uses
/// the single-axis ratios, the SLR model the polarization-averaged ones.
struct AdapterDefaults {
  double t_opt_s = 1.3e-3;
  double ff_beta14 = 0.72;
  double ff_beta11_plus_12 = 0.21;
  double slr_beta14 = 0.54;
  double slr_beta_bar = 0.153;
  double site1_t_opt_s = 0.87e-3;  // OffsetExponential default lifetime
};

ModelAdapter make_adapter(AdapterName name, const AdapterDefaults& d = {});

/// Nonlinear least squares of one adapter against one trace. Named init
/// overrides replace the data-driven guesses; they must lie within bounds.
/// Sample sigmas are used as weights when the trace carries them.
FitResult fit(const ModelAdapter& adapter, const DecayTrace& trace,
              const std::map<std::string, double>& init = {},
              const LmOptions& opts = {});

/// JSON record of a fit result: params -> {value, stderr}, chi2, dof,
/// converged, n_iter.
std::string fit_result_to_json(const FitResult& result,
                               const std::string& model_name);

/// Power law y = coefficient * x^exponent by linear regression in log-log
/// space. Needs >= 4 strictly positive points.
struct PowerLawFit {
  double coefficient = 0.0;
  double exponent = 0.0;
  double coefficient_stderr = 0.0;
  double exponent_stderr = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // (ln coeff, exp)
};
PowerLawFit fit_power_law_exponent(
    std::span<const std::pair<double, double>> points);

/// Pulse-train pumping correction: fits P(n) = a + b*exp(-n/c) to the peak
/// series and rescales each peak by a/P(n) so the correction tends to 1 for
/// late pulses. Degenerate trains (no decay, or c <= 0) get the identity
/// correction and a note.
struct EchoTrainResult {
  std::vector<std::pair<double, double>> corrected;  // (n, corrected value)
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double max_correction = 0.0;  // max |a/P(n) - 1|
  bool identity = false;
  bool exceeds_30_percent = false;
  std::string note;
};
EchoTrainResult correct_echo_train(
    std::span<const std::pair<double, double>> peaks);

/// Two-stage fit of hole decays recorded at several temperatures with one
/// shared area scale: the scale is fitted on the reference trace, then
/// frozen while each trace's spin time is fitted. Burn metadata (keys
/// starting with "burn_") must match across traces.
struct SharedScaleResult {
  double scale = 0.0;
  double scale_stderr = 0.0;
  std::vector<FitResult> per_trace;
};
SharedScaleResult shared_scale_fit(const ModelAdapter& slr_adapter,
                                   const std::vector<DecayTrace>& traces,
                                   std::size_t reference = 0,
                                   const LmOptions& opts = {});

}  // namespace holeburn::fit
