#include "holeburn/rate_ode.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace holeburn {

namespace {

template <int N, class Deriv>
Eigen::Matrix<double, N, 1> rk4_step(const Deriv& f,
                                     const Eigen::Matrix<double, N, 1>& y,
                                     double h) {
  using Vec = Eigen::Matrix<double, N, 1>;
  const Vec k1 = f(y);
  const Vec k2 = f(Vec(y + 0.5 * h * k1));
  const Vec k3 = f(Vec(y + 0.5 * h * k2));
  const Vec k4 = f(Vec(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_grid(std::span<const double> t) {
  if (t.empty()) throw std::invalid_argument("time grid is empty");
  if (t[0] != 0.0) throw std::invalid_argument("time grid must start at 0");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      throw std::invalid_argument("time grid must be strictly increasing");
    }
  }
}

// Advances y over [t0, t1] in substeps of at most h, optionally shadowing the
// integration at h/2 to detect a step size that is too coarse.
template <int N, class Deriv>
void advance(const Deriv& f, Eigen::Matrix<double, N, 1>& y, double t0,
             double t1, double h, double scale, const OdeOptions& opts) {
  const double dt = t1 - t0;
  const int n_sub = std::max(1, static_cast<int>(std::ceil(dt / h)));
  const double hs = dt / n_sub;
  for (int k = 0; k < n_sub; ++k) {
    const auto y_full = rk4_step<N>(f, y, hs);
    if (opts.run_halving_check) {
      auto y_half = rk4_step<N>(f, y, 0.5 * hs);
      y_half = rk4_step<N>(f, y_half, 0.5 * hs);
      const double dev = (y_full - y_half).template lpNorm<Eigen::Infinity>();
      if (dev > opts.halving_check_tol * scale) {
        const double t_fail = t0 + (k + 1) * hs;
        std::ostringstream os;
        os << "step-size failure at t = " << t_fail << " s (halving deviation "
           << dev / scale << ")";
        throw StepSizeFailure(t_fail, os.str());
      }
    }
    y = y_full;
  }
}

}  // namespace

Eigen::Matrix4d branching_from_slr_scalars(double beta14, double beta_bar) {
  Eigen::Matrix4d b;
  b.row(0) << (1.0 - beta14) / 3.0, (1.0 - beta14) / 3.0,
      (1.0 - beta14) / 3.0, beta14;
  for (int i = 1; i < 4; ++i) {
    b.row(i) << (1.0 - beta_bar) / 3.0, (1.0 - beta_bar) / 3.0,
        (1.0 - beta_bar) / 3.0, beta_bar;
  }
  return b;
}

std::vector<PopulationState> integrate_slr_system(
    const SlrParams& p, const Eigen::Matrix4d& branching,
    std::span<const double> t_grid_s, double n_eq_per_level,
    const OdeOptions& opts) {
  check_grid(t_grid_s);
  if (const auto v = p.validate(); !v.empty()) {
    throw std::invalid_argument("SlrParams: " + v.front());
  }
  const double n_eq = n_eq_per_level < 0.0 ? p.n0 : n_eq_per_level;
  if (n_eq < p.n0) {
    throw std::invalid_argument("n_eq_per_level must be >= n0");
  }

  const double q = 1.0 / p.t_opt_s;
  const double w = 1.0 / (3.0 * p.t_spin_s);
  const Eigen::Matrix4d bt = branching.transpose();

  using Vec8 = Eigen::Matrix<double, 8, 1>;
  const auto deriv = [&](const Vec8& y) -> Vec8 {
    const Eigen::Vector4d g = y.head<4>();
    const Eigen::Vector4d e = y.tail<4>();
    const double sg = g.sum();
    const double se = e.sum();
    Vec8 dy;
    dy.head<4>() = w * (Eigen::Vector4d::Constant(sg) - 4.0 * g) + q * (bt * e);
    dy.tail<4>() = w * (Eigen::Vector4d::Constant(se) - 4.0 * e) - q * e;
    return dy;
  };

  Vec8 y;
  y << n_eq, n_eq, n_eq, n_eq - p.n0, p.n0, 0.0, 0.0, 0.0;
  const double scale = y.sum();
  const double h = std::min(p.t_opt_s, p.t_spin_s) / opts.steps_per_timescale;

  std::vector<PopulationState> out;
  out.reserve(t_grid_s.size());
  double t_prev = 0.0;
  for (double t : t_grid_s) {
    if (t > t_prev) advance<8>(deriv, y, t_prev, t, h, scale, opts);
    t_prev = t;
    PopulationState st;
    st.t_s = t;
    st.n_g = y.head<4>();
    st.n_e = y.tail<4>();
    out.push_back(st);
  }
  return out;
}

std::vector<PopulationState> integrate_rate_equations(
    const RegimeModel& model, std::span<const double> t_grid_s,
    double n_eq_per_level, const OdeOptions& opts) {
  if (const auto* slr = std::get_if<SlrParams>(&model)) {
    return integrate_slr_system(
        *slr, branching_from_slr_scalars(slr->beta14, slr->beta_bar),
        t_grid_s, n_eq_per_level, opts);
  }

  const FfParams& p = std::get<FfParams>(model);
  check_grid(t_grid_s);
  if (const auto v = p.validate(); !v.empty()) {
    throw std::invalid_argument("FfParams: " + v.front());
  }
  const double n_eq = n_eq_per_level < 0.0 ? p.n0 : n_eq_per_level;
  if (n_eq < p.n0) {
    throw std::invalid_argument("n_eq_per_level must be >= n0");
  }

  const double q = 1.0 / p.t_opt_s;
  const double wf = 1.0 / p.t_ff_s;
  const double b12 = p.beta11_plus_12;
  const double b14 = p.beta14;
  const double b13 = 1.0 - b12 - b14;

  // y = {n1g+n2g, n3g, n4g, n1e}
  using Vec4 = Eigen::Matrix<double, 4, 1>;
  const auto deriv = [&](const Vec4& y) -> Vec4 {
    Vec4 dy;
    dy[0] = b12 * q * y[3];
    dy[1] = b13 * q * y[3] + wf * (y[2] - y[1]);
    dy[2] = b14 * q * y[3] + wf * (y[1] - y[2]);
    dy[3] = -q * y[3];
    return dy;
  };

  Vec4 y;
  y << 2.0 * n_eq, n_eq, n_eq - p.n0, p.n0;
  const double scale = y.sum();
  const double t_char = std::isfinite(p.t_ff_s)
                            ? std::min(p.t_opt_s, p.t_ff_s)
                            : p.t_opt_s;
  const double h = t_char / opts.steps_per_timescale;

  std::vector<PopulationState> out;
  out.reserve(t_grid_s.size());
  double t_prev = 0.0;
  for (double t : t_grid_s) {
    if (t > t_prev) advance<4>(deriv, y, t_prev, t, h, scale, opts);
    t_prev = t;
    PopulationState st;
    st.t_s = t;
    st.n_g[0] = y[0];
    st.n_g[2] = y[1];
    st.n_g[3] = y[2];
    st.n_e[0] = y[3];
    out.push_back(st);
  }
  return out;
}

std::vector<double> deficit_4g(const std::vector<PopulationState>& states,
                               double n_eq_per_level) {
  std::vector<double> d;
  d.reserve(states.size());
  for (const auto& st : states) d.push_back(n_eq_per_level - st.n_g[3]);
  return d;
}

}  // namespace holeburn
