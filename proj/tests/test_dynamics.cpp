#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "holeburn/dynamics.hpp"
#include "holeburn/io/synthetic.hpp"
#include "holeburn/rate_ode.hpp"

using namespace holeburn;

namespace {

constexpr double kPlanck = 6.62607015e-34;  // J s

std::vector<double> linear_grid(double t_max, int n) {
  std::vector<double> g;
  g.reserve(n + 1);
  for (int i = 0; i <= n; ++i) g.push_back(t_max * i / n);
  return g;
}

}  // namespace

TEST_CASE("exp_difference_quotient crosses its removable singularity") {
  const double t = 1.7e-3;
  const double a = 800.0;
  // exact coincidence -> t*exp(-a t)
  CHECK(exp_difference_quotient(a, a, t) ==
        doctest::Approx(t * std::exp(-a * t)).epsilon(1e-12));
  // generic separation matches the direct expression
  const double b = 2100.0;
  const double direct = (std::exp(-a * t) - std::exp(-b * t)) / (b - a);
  CHECK(exp_difference_quotient(a, b, t) ==
        doctest::Approx(direct).epsilon(1e-12));
  CHECK(exp_difference_quotient(b, a, t) ==
        doctest::Approx(direct).epsilon(1e-12));
  // continuity across the series window
  const double near = exp_difference_quotient(a, a * (1.0 + 1e-10), t);
  CHECK(near == doctest::Approx(t * std::exp(-a * t)).epsilon(1e-9));
}

TEST_CASE("flip-flop deficit boundary values") {
  FfParams p;  // t_ff 1.91 ms, t_opt 1.3 ms, beta14 0.72, beta11+12 0.21
  CHECK(ff_population_deficit(p, 0.0) == doctest::Approx(p.n0));
  // ions branched into 1g/2g never return; the pool deficit splits evenly
  CHECK(ff_population_deficit(p, 50.0 * p.t_ff_s) ==
        doctest::Approx(0.105 * p.n0).epsilon(1e-9));
  CHECK_THROWS_AS(ff_population_deficit(p, -1e-9), std::domain_error);
}

TEST_CASE("flip-flop deficit at the reference point (frozen from the RK4 oracle)") {
  const FfParams p;
  // rate-equation integration of the lumped system gives 0.362364827 at 1 ms
  CHECK(ff_population_deficit(p, 1e-3) ==
        doctest::Approx(0.362364827013).epsilon(1e-9));

  std::vector<double> grid{0.0, 1e-3};
  const auto states = integrate_rate_equations(p, grid);
  const double ode = p.n0 - states[1].n_g[3];
  CHECK(std::abs(ff_population_deficit(p, 1e-3) - ode) / p.n0 < 1e-6);
}

TEST_CASE("flip-flop deficit with the exchange switched off") {
  FfParams p;
  p.t_ff_s = std::numeric_limits<double>::infinity();
  for (const double t : {0.0, 0.4e-3, 1.3e-3, 5e-3}) {
    const double expected =
        p.n0 * (1.0 - p.beta14 * (1.0 - std::exp(-t / p.t_opt_s)));
    CHECK(ff_population_deficit(p, t) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("flip-flop deficit is continuous across both special timescale loci") {
  FfParams p;
  const double t = 1e-3;
  // t_ff = 2 t_opt is the true two-rate coincidence; 2 t_ff = t_opt is the
  // other locus named alongside it
  for (const double locus : {2.0 * p.t_opt_s, 0.5 * p.t_opt_s}) {
    p.t_ff_s = locus * (1.0 - 1e-8);
    const double below = ff_population_deficit(p, t);
    p.t_ff_s = locus;
    const double at = ff_population_deficit(p, t);
    p.t_ff_s = locus * (1.0 + 1e-8);
    const double above = ff_population_deficit(p, t);
    CHECK(std::isfinite(at));
    CHECK(std::abs(above - below) / std::abs(at) < 1e-6);
    CHECK(std::abs(at - below) / std::abs(at) < 1e-6);
  }
}

TEST_CASE("SLR 1e population: boundary, optical-only limit, frozen value") {
  SlrParams p;
  p.t_spin_s = 3.72529029846191e-4;  // 1/(2e-5 * 8^9)
  CHECK(slr_population_1e(p, 0.0) == doctest::Approx(p.n0));

  SlrParams slow = p;
  slow.t_spin_s = 1e12;
  for (const double t : {0.2e-3, 1.0e-3}) {
    CHECK(slr_population_1e(slow, t) ==
          doctest::Approx(p.n0 * std::exp(-t / p.t_opt_s)).epsilon(1e-9));
  }

  // frozen from the 8-level RK4 oracle
  CHECK(slr_population_1e(p, 0.5e-3) ==
        doctest::Approx(0.255453678339).epsilon(1e-9));
  std::vector<double> grid{0.0, 0.5e-3};
  const auto states = integrate_rate_equations(p, grid);
  CHECK(std::abs(slr_population_1e(p, 0.5e-3) - states[1].n_e[0]) / p.n0 <
        1e-6);
}

TEST_CASE("SLR 1e population decreases strictly") {
  SlrParams p;
  p.t_spin_s = 0.7e-3;
  double prev = slr_population_1e(p, 0.0);
  for (int i = 1; i <= 200; ++i) {
    const double cur = slr_population_1e(p, i * 5e-5);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("SLR deficit: boundaries, frozen value, monotone tail") {
  SlrParams p;
  p.t_spin_s = 1e-3;
  CHECK(slr_population_deficit(p, 0.0) == doctest::Approx(p.n0));
  CHECK(slr_population_deficit(p, 80.0 * p.t_spin_s) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // frozen from the 8-level RK4 oracle (beta14 0.54, beta_bar 0.153)
  CHECK(slr_population_deficit(p, 1e-3) ==
        doctest::Approx(0.272551189926).epsilon(1e-9));
  std::vector<double> grid{0.0, 1e-3};
  const auto states = integrate_rate_equations(p, grid);
  CHECK(std::abs(slr_population_deficit(p, 1e-3) -
                 (p.n0 - states[1].n_g[3])) /
            p.n0 <
        1e-6);

  double prev = slr_population_deficit(p, 5.0 * p.t_spin_s);
  for (int i = 1; i <= 50; ++i) {
    const double cur = slr_population_deficit(p, (5.0 + 0.2 * i) * p.t_spin_s);
    CHECK(cur <= prev);
    CHECK(cur >= 0.0);
    prev = cur;
  }
}

TEST_CASE("SLR deficit is continuous across 4 t_opt = 3 t_spin") {
  SlrParams p;
  const double locus = 4.0 * p.t_opt_s / 3.0;
  const double t = 1e-3;
  p.t_spin_s = locus * (1.0 - 1e-8);
  const double below = slr_population_deficit(p, t);
  p.t_spin_s = locus;
  const double at = slr_population_deficit(p, t);
  p.t_spin_s = locus * (1.0 + 1e-8);
  const double above = slr_population_deficit(p, t);
  CHECK(std::isfinite(at));
  CHECK(std::abs(above - below) / std::abs(at) < 1e-6);
}

TEST_CASE("rate-equation integrator: initial state and conservation") {
  SlrParams p;
  p.t_spin_s = 0.4e-3;
  const auto grid = linear_grid(10.0 * p.t_opt_s, 200);
  const auto states = integrate_rate_equations(p, grid, 2.0 * p.n0);

  CHECK(states[0].n_g[3] == doctest::Approx(2.0 * p.n0 - p.n0));
  CHECK(states[0].n_e[0] == doctest::Approx(p.n0));
  CHECK(states[0].n_g[0] == doctest::Approx(2.0 * p.n0));

  const double total0 = states.front().total();
  for (const auto& st : states) {
    CHECK(std::abs(st.total() - total0) / total0 < 1e-9);
    CHECK(st.n_g.minCoeff() >= -1e-12);
    CHECK(st.n_e.minCoeff() >= -1e-12);
  }
}

TEST_CASE("rate-equation integrator matches the FF closed form on a grid") {
  const FfParams p;  // reference parameters
  const auto grid = linear_grid(10.0 * std::max(p.t_opt_s, p.t_ff_s), 120);
  const auto states = integrate_rate_equations(p, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ode = p.n0 - states[i].n_g[3];
    const double cf = ff_population_deficit(p, grid[i]);
    CHECK(std::abs(ode - cf) / p.n0 < 1e-6);
  }
}

TEST_CASE("equal branching rows keep the upper excited sublevels identical") {
  SlrParams p;
  p.t_spin_s = 0.6e-3;
  const Eigen::Matrix4d branching = Eigen::Matrix4d::Constant(0.25);
  const auto grid = linear_grid(8.0 * p.t_opt_s, 80);
  const auto states = integrate_slr_system(p, branching, grid);
  for (const auto& st : states) {
    CHECK(st.n_e[1] == doctest::Approx(st.n_e[2]).epsilon(1e-12));
    CHECK(st.n_e[2] == doctest::Approx(st.n_e[3]).epsilon(1e-12));
  }
}

TEST_CASE("oracle equivalence over random parameter sets") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    FfParams ff;
    ff.t_opt_s = 0.2e-3 + 2.4e-3 * u(rng);
    ff.t_ff_s = ff.t_opt_s * std::pow(10.0, 2.0 * u(rng) - 1.0);
    ff.beta14 = 0.8 * u(rng);
    ff.beta11_plus_12 = (1.0 - ff.beta14) * u(rng);
    const auto grid_ff =
        linear_grid(10.0 * std::max(ff.t_opt_s, ff.t_ff_s), 60);
    const auto st_ff = integrate_rate_equations(ff, grid_ff);
    for (std::size_t i = 0; i < grid_ff.size(); ++i) {
      CHECK(std::abs((ff.n0 - st_ff[i].n_g[3]) -
                     ff_population_deficit(ff, grid_ff[i])) /
                ff.n0 <
            1e-6);
    }

    SlrParams slr;
    slr.t_opt_s = ff.t_opt_s;
    slr.t_spin_s = slr.t_opt_s * std::pow(10.0, 2.0 * u(rng) - 1.0);
    slr.beta14 = u(rng);
    slr.beta_bar = u(rng);
    const auto grid_s =
        linear_grid(10.0 * std::max(slr.t_opt_s, slr.t_spin_s), 60);
    const auto st_s = integrate_rate_equations(slr, grid_s);
    for (std::size_t i = 0; i < grid_s.size(); ++i) {
      CHECK(std::abs((slr.n0 - st_s[i].n_g[3]) -
                     slr_population_deficit(slr, grid_s[i])) /
                slr.n0 <
            1e-6);
      CHECK(std::abs(st_s[i].n_e[0] - slr_population_1e(slr, grid_s[i])) /
                slr.n0 <
            1e-6);
    }
  }
}

TEST_CASE("a hopeless step size is reported with the failure time") {
  SlrParams p;
  p.t_spin_s = 1e-3;
  OdeOptions opts;
  opts.steps_per_timescale = 0.05;  // several timescales per step
  const std::vector<double> grid{0.0, 20.0 * p.t_opt_s};
  CHECK_THROWS_AS(integrate_rate_equations(p, grid, -1.0, opts),
                  StepSizeFailure);
}

TEST_CASE("equilibrium populations: equal branch and Boltzmann branch") {
  HyperfineSystem sys;
  sys.n_total = 2.0;
  CHECK(equilibrium_populations(sys, 4.0) == Eigen::Vector4d::Constant(0.5));

  // Boltzmann weights 1, 1/2, 1/4, 1/8 when each gap is kT*ln2
  const double t = 0.5;
  const double e = kBoltzmann * t * std::log(2.0);
  sys.ground_energies_j = Eigen::Vector4d(0.0, e, 2.0 * e, 3.0 * e);
  const auto pops =
      equilibrium_populations(sys, t, EquilibriumMode::Boltzmann);
  const double unit = pops[0];
  CHECK(pops[1] == doctest::Approx(unit / 2.0).epsilon(1e-12));
  CHECK(pops[2] == doctest::Approx(unit / 4.0).epsilon(1e-12));
  CHECK(pops[3] == doctest::Approx(unit / 8.0).epsilon(1e-12));
  CHECK(pops.sum() == doctest::Approx(sys.n_total).epsilon(1e-12));

  // ground-state limit
  const auto cold = equilibrium_populations(sys, 1e-3);
  CHECK(cold[0] == doctest::Approx(sys.n_total).epsilon(1e-9));

  sys.ground_energies_j.reset();
  CHECK_THROWS_AS(equilibrium_populations(sys, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(equilibrium_populations(sys, 0.0), std::domain_error);
}

TEST_CASE("spin-temperature estimation inverts the Boltzmann distribution") {
  HyperfineSystem sys;
  const Eigen::Vector4d energies =
      kPlanck * Eigen::Vector4d(0.0, 1.0e9, 2.2e9, 3.1e9);
  sys.ground_energies_j = energies;

  const auto pops =
      equilibrium_populations(sys, 0.5, EquilibriumMode::Boltzmann);
  CHECK(estimate_spin_temperature(pops, energies) ==
        doctest::Approx(0.5).epsilon(1e-6));

  CHECK(std::isinf(
      estimate_spin_temperature(Eigen::Vector4d::Constant(0.25), energies)));

  // population rising with energy has no nonnegative temperature
  CHECK_THROWS_AS(estimate_spin_temperature(
                      Eigen::Vector4d(0.1, 0.2, 0.3, 0.4), energies),
                  std::domain_error);
}

TEST_CASE("spin-temperature estimation survives 1% multiplicative noise") {
  HyperfineSystem sys;
  const Eigen::Vector4d energies =
      kPlanck * Eigen::Vector4d(0.0, 1.0e9, 2.2e9, 3.1e9);
  sys.ground_energies_j = energies;
  const auto pops =
      equilibrium_populations(sys, 0.3, EquilibriumMode::Boltzmann);

  io::NoiseRng rng(99);
  Eigen::Vector4d noisy;
  for (int i = 0; i < 4; ++i) noisy[i] = pops[i] * (1.0 + 0.01 * rng.gauss());
  CHECK(estimate_spin_temperature(noisy, energies) ==
        doctest::Approx(0.3).epsilon(0.05));
}
