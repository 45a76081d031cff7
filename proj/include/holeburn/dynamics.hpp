#pragma once

#include <variant>

#include "holeburn/types.hpp"

namespace holeburn {

/// Which relaxation regime governs the ground-state spin dynamics.
using RegimeModel = std::variant<FfParams, SlrParams>;

/// (exp(-a*t) - exp(-b*t)) / (b - a), evaluated so that the removable
/// singularity at b == a is crossed smoothly (limit t*exp(-a*t)). Uses the
/// series of (1-exp(-x))/x once |(b-a)*t| drops below 1e-9.
double exp_difference_quotient(double a, double b, double t);

/// Deficit of the laser-resonant 4g population from its equilibrium value,
/// n4g_eq - n4g(t), in the flip-flop regime. Two-exponential closed form of
/// the lumped {1g+2g, 3g, 4g, 1e} rate equations:
///
///   deficit(t) = N * { e^(-2t/Tff) + A (e^(-t/Topt) - e^(-2t/Tff))
///                      + B (1 - e^(-2t/Tff)) }
///
/// with B = (beta11+beta12)/2 and
/// A = [(1-beta11-beta12) Topt - beta14 Tff] / (2 Topt - Tff); the resonance
/// at Tff = 2 Topt is removable and handled internally. deficit(0) = N and
/// deficit(inf) = N*B. t_ff_s = +inf degenerates to the optical-only decay
/// N*(1 - beta14*(1 - e^(-t/Topt))).
double ff_population_deficit(const FfParams& p, double t_s);

/// Population of the 1e level in the SLR regime:
///   n1e(t) = (N/4) e^(-t/Topt) [3 e^(-4t/(3Ts)) + 1],
/// strictly decreasing, n1e(0) = N.
double slr_population_1e(const SlrParams& p, double t_s);

/// Deficit n4g_eq - n4g(t) in the SLR regime; three-exponential closed form
/// with rates 4/(3Ts), 1/Topt and their sum. deficit(0) = N, deficit(inf)=0.
/// The resonance at 4 Topt = 3 Ts is removable and handled internally.
double slr_population_deficit(const SlrParams& p, double t_s);

enum class EquilibriumMode {
  Auto,       // equal distribution at T >= 1 K, Boltzmann below
  Equal,      // n_total/4 in every ground sublevel
  Boltzmann,  // requires ground_energies_j
};

/// Thermal-equilibrium ground-state populations for one subclass.
Eigen::Vector4d equilibrium_populations(const HyperfineSystem& sys,
                                        double temperature_k,
                                        EquilibriumMode mode = EquilibriumMode::Auto);

/// Effective spin temperature whose Boltzmann distribution best fits the
/// given populations (least squares on log populations vs energy). Returns
/// +inf for a flat distribution; throws std::domain_error when the fitted
/// slope implies a negative/undefined temperature.
double estimate_spin_temperature(const Eigen::Vector4d& populations,
                                 const Eigen::Vector4d& energies_j);

}  // namespace holeburn
