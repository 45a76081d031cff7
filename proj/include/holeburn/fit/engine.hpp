#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "holeburn/types.hpp"

namespace holeburn::fit {

/// One model parameter handed to the engine. Finite (lower, upper) bounds are
/// enforced through a smooth logistic transform; a single finite bound uses a
/// log transform; no bounds means the parameter is stepped directly. Frozen
/// parameters keep their init value and are excluded from the Jacobian.
struct FreeParam {
  std::string name;
  double init = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool frozen = false;
};

struct LmOptions {
  int max_iter = 200;
  double chi2_rel_tol = 1e-10;  // relative chi^2 decrease
  double step_rel_tol = 1e-8;   // relative step norm
  double lambda_init = 1e-8;
  double lambda_grow = 10.0;
  double lambda_shrink = 0.1;
  double lambda_max = 1e14;
  double fd_rel_step = 1e-6;   // central-difference relative step
  double fd_abs_floor = 1e-12;
  std::function<void(int, double)> on_accept;  // (iteration, chi2)
};

/// Residual vector as a function of the full external parameter vector
/// (frozen entries included, in declaration order).
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Damped least squares: minimizes |r(theta)|^2 over the non-frozen
/// parameters. Accepted steps never increase chi^2. Returns best-so-far with
/// converged=false when the iteration limit is hit. The covariance is
/// pinv(J^T J) * chi2/dof in external coordinates, zero rows for frozen
/// parameters. Throws when a free parameter has no effect on the residuals
/// (degenerate parameter combination) or dof < 1.
FitResult lm_fit(const ResidualFn& residuals, std::vector<FreeParam> params,
                 int n_observations, const LmOptions& opts = {});

}  // namespace holeburn::fit
