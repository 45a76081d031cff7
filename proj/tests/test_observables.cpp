#include <doctest.h>

#include <cmath>
#include <vector>

#include "holeburn/observables.hpp"
#include "holeburn/rate_ode.hpp"

using namespace holeburn;

TEST_CASE("hole area follows the regime deficit") {
  FfParams ff;
  ff.scale_c = 0.45;  // c*N in MHz/cm
  CHECK(hole_area(RegimeModel(ff), 0.0) == doctest::Approx(0.45));
  // flip-flop floor: (beta11+beta12)/2 of the initial area
  CHECK(hole_area(RegimeModel(ff), 60.0 * ff.t_ff_s) ==
        doctest::Approx(0.105 * 0.45).epsilon(1e-9));

  SlrParams slr;
  slr.n0 = 0.45;  // SLR folds the proportionality constant into n0
  slr.t_spin_s = 0.8e-3;
  CHECK(hole_area(RegimeModel(slr), 0.0) == doctest::Approx(0.45));
  CHECK(hole_area(RegimeModel(slr), 1.0) == doctest::Approx(0.0));
}

TEST_CASE("3PE intensity: boundaries and oracle agreement") {
  SlrParams p;
  p.t_spin_s = 1.30425959065737e-3;  // 1/(1.9e-5 * 7^9)
  EchoSequence seq;
  seq.i0 = 3.0;

  seq.t_w_s = 0.0;
  CHECK(echo3_intensity(p, seq) ==
        doctest::Approx(seq.i0 * p.n0 * p.n0).epsilon(1e-12));

  seq.t_w_s = 1.0;  // far beyond every timescale
  CHECK(echo3_intensity(p, seq) == doctest::Approx(0.0));

  // grating amplitude from the 8-level integrator
  seq.t_w_s = 2e-3;
  const std::vector<double> grid{0.0, 2e-3};
  const auto states = integrate_rate_equations(p, grid);
  const double grating = states[1].n_e[0] + (p.n0 - states[1].n_g[3]);
  const double from_ode = 0.25 * seq.i0 * grating * grating;
  CHECK(echo3_intensity(p, seq) ==
        doctest::Approx(from_ode).epsilon(1e-6));
}

TEST_CASE("3PE intensity is a perfect square and never negative") {
  SlrParams p;
  p.t_spin_s = 0.2e-3;
  EchoSequence seq;
  for (int i = 0; i <= 100; ++i) {
    seq.t_w_s = i * 1e-4;
    CHECK(echo3_intensity(p, seq) >= 0.0);
  }
}

TEST_CASE("3PE spectral-diffusion factor is optional and off by default") {
  SlrParams p;
  EchoSequence seq;
  seq.tau_d_s = 7e-6;
  seq.t_w_s = 1e-3;
  const double plain = echo3_intensity(p, seq);
  const double damped = echo3_intensity(p, seq, 1.0e3);
  CHECK(damped ==
        doctest::Approx(plain * std::exp(-4.0 * kPi * 7e-6 * 1.0e3)));
}

TEST_CASE("2PE intensity decays exponentially in the pulse delay") {
  CHECK(echo2_intensity(320.0, 0.0, 2.5) == doctest::Approx(2.5));

  // 1/e point at 4*pi*gamma*tau = 1; gamma = 320 Hz is a ~1 ms T2
  const double tau_e = 1.0 / (4.0 * kPi * 320.0);
  CHECK(echo2_intensity(320.0, tau_e, 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(coherence_time_s(320.0) == doctest::Approx(0.995e-3).epsilon(0.01));

  // doubling gamma halves the 1/e delay
  CHECK(echo2_intensity(640.0, 0.5 * tau_e, 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("log 2PE intensity is exactly linear in the delay") {
  const double gamma = 1.1e3, i0 = 0.7;
  std::vector<double> taus, logs;
  for (int i = 0; i < 24; ++i) {
    const double tau = 3e-6 + i * 2.5e-5;
    taus.push_back(tau);
    logs.push_back(std::log(echo2_intensity(gamma, tau, i0)));
  }
  // least-squares slope recovers -4*pi*gamma to machine precision
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    sx += taus[i];
    sy += logs[i];
    sxx += taus[i] * taus[i];
    sxy += taus[i] * logs[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(-slope / (4.0 * kPi) == doctest::Approx(gamma).epsilon(1e-9));
}

TEST_CASE("SLR rate law: Raman term and boundaries") {
  RateLawParams p;
  p.alpha_r_hz_per_k9 = 2.0e-5;
  CHECK(slr_rate(p, 10.0) == doctest::Approx(2.0e4).epsilon(1e-12));
  CHECK(slr_time(p, 10.0) == doctest::Approx(50e-6).epsilon(1e-12));
  CHECK(slr_rate(p, 8.0) == doctest::Approx(2684.35456).epsilon(1e-9));

  const RateLawParams zero;
  CHECK(slr_rate(zero, 5.0) == 0.0);
  CHECK(std::isinf(slr_time(zero, 5.0)));
  CHECK_THROWS_AS(slr_rate(p, 0.0), std::domain_error);
}

TEST_CASE("SLR rate law: Orbach term with overflow guard") {
  RateLawParams p;
  p.alpha_d_hz_per_k = 2.0;
  p.alpha_o_hz = 1e9;
  p.delta_j = kBoltzmann * 300.0;  // gap equivalent to 300 K
  // moderate temperature: the activated term contributes
  const double warm = slr_rate(p, 30.0);
  CHECK(warm > 2.0 * 30.0);
  CHECK(warm == doctest::Approx(60.0 + 1e9 / std::expm1(10.0)).epsilon(1e-12));
  // deep cold: exp(delta/kT) overflows; the term must cleanly vanish
  const double cold = slr_rate(p, 0.05);
  CHECK(cold == doctest::Approx(2.0 * 0.05).epsilon(1e-12));
}

TEST_CASE("rate law and linewidth law increase monotonically with T") {
  RateLawParams rl;
  rl.alpha_d_hz_per_k = 0.3;
  rl.alpha_r_hz_per_k9 = 2.0e-5;
  LinewidthModel lw{0.35e3, 2.57e-5};
  double prev_rate = 0.0, prev_lw = 0.0;
  for (double t = 0.5; t <= 15.0; t += 0.25) {
    const double r = slr_rate(rl, t);
    const double g = gamma_h_of_temperature(lw, t);
    CHECK(r > prev_rate);
    CHECK(g >= prev_lw);
    prev_rate = r;
    prev_lw = g;
  }
}

TEST_CASE("linewidth vs temperature at the tabulated coefficients") {
  const LinewidthModel low_doping{0.35e3, 2.57e-5};
  // ~26 kHz at 10 K, consistent with the measured 25 kHz scale
  CHECK(gamma_h_of_temperature(low_doping, 10.0) ==
        doctest::Approx(26.05e3).epsilon(1e-3));
  CHECK(gamma_h_of_temperature(low_doping, 0.0) == doctest::Approx(350.0));

  // the T^9 term is negligible at 2 K; the plateau is the ~1 kHz offset
  const LinewidthModel high_doping{1.03e3, 3.45e-5};
  CHECK(gamma_h_of_temperature(high_doping, 2.0) ==
        doctest::Approx(1.03e3 + 3.45e-5 * 512.0).epsilon(1e-12));
  CHECK(gamma_h_of_temperature(high_doping, 2.0) ==
        doctest::Approx(1.05e3).epsilon(0.02));
}

TEST_CASE("direct lifetime contribution in both regimes") {
  const double inf = std::numeric_limits<double>::infinity();
  // radiative limit alone: 1/(2 pi * 1.3 ms) = 122 Hz
  CHECK(direct_contribution(SpinRegime::LowTemperature, 1.3e-3, inf) ==
        doctest::Approx(122.4).epsilon(1e-3));
  // flip-flop adds ~83 Hz at t_ff = 1.91 ms
  const double lt = direct_contribution(SpinRegime::LowTemperature, 1.3e-3,
                                        1.91e-3);
  CHECK(lt == doctest::Approx(122.4 + 83.3).epsilon(1e-2));
  CHECK(1.0 / (2.0 * kPi * 1.91e-3) == doctest::Approx(83.3).epsilon(1e-2));

  // high-temperature regime at T_S = 50 us: 122 Hz + 6.37 kHz
  const double ht = direct_contribution(SpinRegime::HighTemperature, 1.3e-3,
                                        50e-6);
  CHECK(ht == doctest::Approx(122.4 + 6366.2).epsilon(1e-3));
}

TEST_CASE("direct HT spin part is consistent with the rate law at every T") {
  RateLawParams rl;
  rl.alpha_r_hz_per_k9 = 2.0e-5;
  for (double t = 6.0; t <= 10.0; t += 0.5) {
    const double ts = slr_time(rl, t);
    const double spin_part =
        direct_contribution(SpinRegime::HighTemperature, 1.3e-3, ts) -
        direct_contribution(SpinRegime::HighTemperature, 1.3e-3,
                            std::numeric_limits<double>::infinity());
    CHECK(spin_part ==
          doctest::Approx(2.0 / (2.0 * kPi * ts)).epsilon(1e-12));
    CHECK(spin_part == doctest::Approx(slr_rate(rl, t) / kPi).epsilon(1e-12));
  }
}

TEST_CASE("direct fraction of the T^9 broadening is about a quarter") {
  const double alpha_r = 2.0e-5;
  const double gamma_r = 2.57e-5;
  CHECK(alpha_r / (kPi * gamma_r) == doctest::Approx(0.248).epsilon(2e-3));
}

TEST_CASE("hole width to homogeneous linewidth") {
  CHECK(hole_width_to_gamma_h(106.6e3, 28e3) == doctest::Approx(25.3e3));
  // fully laser-limited at the combined 56.6 kHz floor
  CHECK(hole_width_to_gamma_h(56.6e3, 28.3e3) == doctest::Approx(0.0));
  CHECK_THROWS_AS(hole_width_to_gamma_h(50e3, 28.3e3), std::domain_error);
}

TEST_CASE("effective linewidth decomposition") {
  CHECK(effective_linewidth_decompose(0.32e3, 0.32e3) == doctest::Approx(0.0));
  CHECK(effective_linewidth_decompose(1.32e3, 0.32e3) ==
        doctest::Approx(1.0e3));
  CHECK_THROWS_AS(effective_linewidth_decompose(0.3e3, 0.32e3),
                  std::domain_error);
}
