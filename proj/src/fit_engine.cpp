#include "holeburn/fit/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace holeburn::fit {

namespace {

// Smooth reparameterization keeping bounded parameters inside their box.
struct Transform {
  enum Kind { Identity, Logistic, LogLower, LogUpper } kind = Identity;
  double lo = 0.0, hi = 0.0;

  static Transform from(const FreeParam& p) {
    Transform t;
    const bool lo_f = std::isfinite(p.lower);
    const bool hi_f = std::isfinite(p.upper);
    if (lo_f && hi_f) {
      t.kind = Logistic;
    } else if (lo_f) {
      t.kind = LogLower;
    } else if (hi_f) {
      t.kind = LogUpper;
    }
    t.lo = p.lower;
    t.hi = p.upper;
    return t;
  }

  double to_external(double u) const {
    switch (kind) {
      case Identity: return u;
      case Logistic: return lo + (hi - lo) / (1.0 + std::exp(-u));
      case LogLower: return lo + std::exp(u);
      case LogUpper: return hi - std::exp(u);
    }
    return u;
  }

  double to_internal(double x) const {
    switch (kind) {
      case Identity: return x;
      case Logistic: {
        double f = (x - lo) / (hi - lo);
        f = std::min(std::max(f, 1e-12), 1.0 - 1e-12);
        return std::log(f / (1.0 - f));
      }
      case LogLower: return std::log(std::max(x - lo, 1e-300));
      case LogUpper: return std::log(std::max(hi - x, 1e-300));
    }
    return x;
  }

  double dext_dint(double u) const {
    switch (kind) {
      case Identity: return 1.0;
      case Logistic: {
        const double s = 1.0 / (1.0 + std::exp(-u));
        return (hi - lo) * s * (1.0 - s);
      }
      case LogLower: return std::exp(u);
      case LogUpper: return -std::exp(u);
    }
    return 1.0;
  }
};

double chi2_of(const Eigen::VectorXd& r) { return r.squaredNorm(); }

// Moore-Penrose style inverse of a symmetric PSD matrix; keeps the result
// PSD even when directions are unconstrained.
Eigen::MatrixXd psd_pinv(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cutoff = std::max(ev.maxCoeff(), 0.0) * 1e-12;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff && ev[i] > 0.0) inv[i] = 1.0 / ev[i];
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

FitResult lm_fit(const ResidualFn& residuals, std::vector<FreeParam> params,
                 int n_observations, const LmOptions& opts) {
  const int n_params = static_cast<int>(params.size());
  std::vector<int> active;
  for (int i = 0; i < n_params; ++i) {
    if (!params[i].frozen) active.push_back(i);
  }
  const int n_active = static_cast<int>(active.size());
  if (n_active == 0) throw std::invalid_argument("no free parameters");
  const int dof = n_observations - n_active;
  if (dof < 1) {
    throw std::invalid_argument(
        "dof < 1: more free parameters than observations allow");
  }
  for (const auto& p : params) {
    if (std::isfinite(p.lower) && std::isfinite(p.upper) &&
        !(p.lower < p.upper)) {
      throw std::invalid_argument("parameter '" + p.name +
                                  "': lower bound must be below upper");
    }
    if (!p.frozen && (p.init < p.lower || p.init > p.upper)) {
      throw std::invalid_argument("parameter '" + p.name +
                                  "': init outside bounds");
    }
  }

  std::vector<Transform> tf(active.size());
  Eigen::VectorXd theta(n_params);
  for (int i = 0; i < n_params; ++i) theta[i] = params[i].init;
  Eigen::VectorXd u(n_active);
  for (int a = 0; a < n_active; ++a) {
    tf[a] = Transform::from(params[active[a]]);
    u[a] = tf[a].to_internal(theta[active[a]]);
  }

  const auto external_of = [&](const Eigen::VectorXd& uu) {
    Eigen::VectorXd th = theta;
    for (int a = 0; a < n_active; ++a) {
      th[active[a]] = tf[a].to_external(uu[a]);
    }
    return th;
  };

  // Central-difference Jacobian of the residuals with respect to the
  // external parameters, evaluated at th.
  const auto jacobian_ext = [&](const Eigen::VectorXd& th,
                                Eigen::Index n_res) {
    Eigen::MatrixXd j(n_res, n_active);
    for (int a = 0; a < n_active; ++a) {
      const int idx = active[a];
      const double h =
          std::max(opts.fd_rel_step * std::abs(th[idx]), opts.fd_abs_floor);
      Eigen::VectorXd tp = th, tm = th;
      tp[idx] += h;
      tm[idx] -= h;
      j.col(a) = (residuals(tp) - residuals(tm)) / (2.0 * h);
    }
    return j;
  };

  theta = external_of(u);
  Eigen::VectorXd r = residuals(theta);
  double chi2 = chi2_of(r);
  if (!std::isfinite(chi2)) {
    throw std::invalid_argument("residuals are not finite at the init point");
  }
  double lambda = opts.lambda_init;
  bool converged = false;
  int iter = 0;

  for (; iter < opts.max_iter; ++iter) {
    const Eigen::MatrixXd j_ext = jacobian_ext(theta, r.size());
    Eigen::MatrixXd j_int = j_ext;
    for (int a = 0; a < n_active; ++a) j_int.col(a) *= tf[a].dext_dint(u[a]);

    for (int a = 0; a < n_active; ++a) {
      if (j_ext.col(a).norm() == 0.0) {
        throw std::runtime_error(
            "degenerate parameter combination: '" +
            params[active[a]].name + "' has no effect on the residuals");
      }
    }

    const Eigen::MatrixXd h = j_int.transpose() * j_int;
    const Eigen::VectorXd g = j_int.transpose() * r;
    const double diag_floor = 1e-300;

    bool accepted = false;
    while (lambda <= opts.lambda_max) {
      Eigen::MatrixXd damped = h;
      for (int a = 0; a < n_active; ++a) {
        damped(a, a) += lambda * std::max(h(a, a), diag_floor);
      }
      const Eigen::VectorXd step = damped.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= opts.lambda_grow;
        continue;
      }
      const Eigen::VectorXd u_try = u + step;
      const Eigen::VectorXd theta_try = external_of(u_try);
      const Eigen::VectorXd r_try = residuals(theta_try);
      const double chi2_try = chi2_of(r_try);
      if (std::isfinite(chi2_try) && chi2_try <= chi2) {
        const double rel_decrease =
            chi2 > 0.0 ? (chi2 - chi2_try) / chi2 : 0.0;
        const double rel_step =
            step.norm() / std::max(u.norm(), 1.0);
        u = u_try;
        theta = theta_try;
        r = r_try;
        chi2 = chi2_try;
        lambda = std::max(lambda * opts.lambda_shrink, 1e-14);
        accepted = true;
        if (opts.on_accept) opts.on_accept(iter, chi2);
        if (rel_decrease < opts.chi2_rel_tol || rel_step < opts.step_rel_tol) {
          converged = true;
        }
        break;
      }
      lambda *= opts.lambda_grow;
    }
    if (!accepted) {
      // No damping level improves chi^2: we are at a (local) minimum to
      // within the Jacobian's resolution.
      converged = true;
    }
    if (converged) {
      ++iter;
      break;
    }
  }

  FitResult result;
  result.param_names.reserve(params.size());
  for (const auto& p : params) result.param_names.push_back(p.name);
  result.values = theta;
  result.chi2 = chi2;
  result.dof = dof;
  result.converged = converged;
  result.n_iter = iter;

  const Eigen::MatrixXd j_final = jacobian_ext(theta, r.size());
  const Eigen::MatrixXd cov_active =
      psd_pinv(j_final.transpose() * j_final) * (chi2 / dof);

  result.covariance = Eigen::MatrixXd::Zero(n_params, n_params);
  result.stderrs = Eigen::VectorXd::Zero(n_params);
  for (int a = 0; a < n_active; ++a) {
    for (int b = 0; b < n_active; ++b) {
      result.covariance(active[a], active[b]) = cov_active(a, b);
    }
    result.stderrs[active[a]] =
        std::sqrt(std::max(cov_active(a, a), 0.0));
  }
  return result;
}

}  // namespace holeburn::fit
