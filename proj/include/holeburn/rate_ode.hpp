#pragma once

#include <span>
#include <vector>

#include "holeburn/dynamics.hpp"
#include "holeburn/types.hpp"

namespace holeburn {

/// Thrown when the fixed-step integration fails its step-halving check.
struct StepSizeFailure : std::runtime_error {
  double t_s;
  StepSizeFailure(double t, const std::string& msg)
      : std::runtime_error(msg), t_s(t) {}
};

struct OdeOptions {
  double steps_per_timescale = 200.0;  // h = min(Topt, Tff or Ts) / this
  double halving_check_tol = 1e-7;     // relative to total population
  bool run_halving_check = true;
};

/// Integrates the full linear rate-equation system of the given regime with
/// classic fixed-step RK4 and returns the populations at every grid time.
///
/// Flip-flop regime: lumped subclass compartments {1g+2g, 3g, 4g, 1e} with
/// 3g<->4g exchange at rate 1/t_ff and branched optical decay; the lump is
/// reported in n_g[0] (n_g[1] stays zero, n_e[0] is the 1e population).
/// SLR regime: all 8 sublevels, uniform inter-sublevel rate 1/(3*t_spin) in
/// both manifolds plus branched optical decay.
///
/// Initial state: n4g = n_eq - N, n1e = N, every other sublevel at its
/// equilibrium value n_eq (per sublevel). n_eq_per_level < 0 selects the
/// default n_eq = N. Total population is conserved by construction.
std::vector<PopulationState> integrate_rate_equations(
    const RegimeModel& model, std::span<const double> t_grid_s,
    double n_eq_per_level = -1.0, const OdeOptions& opts = {});

/// SLR variant with an explicit full branching matrix (rows = excited
/// sublevel, columns = ground sublevel; each row sums to 1). The scalar
/// SlrParams beta14/beta_bar are ignored in favor of the matrix.
std::vector<PopulationState> integrate_slr_system(
    const SlrParams& p, const Eigen::Matrix4d& branching,
    std::span<const double> t_grid_s, double n_eq_per_level = -1.0,
    const OdeOptions& opts = {});

/// Row-stochastic branching matrix consistent with the scalar SLR ratios:
/// row 1 puts beta14 into 4g, rows 2..4 put beta_bar into 4g, and the
/// remainder of each row is spread evenly over 1g..3g.
Eigen::Matrix4d branching_from_slr_scalars(double beta14, double beta_bar);

/// 4g-deficit trajectory extracted from an integration result.
std::vector<double> deficit_4g(const std::vector<PopulationState>& states,
                               double n_eq_per_level);

}  // namespace holeburn
