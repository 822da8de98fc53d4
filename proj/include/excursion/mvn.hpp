#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "excursion/field.hpp"
#include "excursion/rng.hpp"

namespace excursion {

/// Covariance sigma(t_i) sigma(t_j) r(t_i, t_j) over a point list.
/// Points may lie outside the model's domain.
Eigen::MatrixXd cov_matrix(const FieldModel& model, const PointSet& points);

/// Lower-triangular L with L L^T = A + ridge I.
struct PsdFactor {
  Eigen::MatrixXd lower;
  double ridge = 0.0;
};

/// Cholesky factor of a symmetric positive semidefinite matrix. Tries ridge 0
/// first, then 1e-12 * trace/n doubling up to 1e-6 * trace/n, and returns the
/// first ridge that factors. Throws SingularModelError past the ladder.
PsdFactor factor_psd(const Eigen::MatrixXd& matrix);

struct GaussianDraw {
  std::vector<double> values;
  double ridge = 0.0;
};

/// One draw of (f(t_1), ..., f(t_n)).
GaussianDraw sample_joint(const FieldModel& model, const PointSet& points, Rng& rng);

/// One draw of (f(t_1), ..., f(t_m)) given f(tau) = value_at_tau. Points equal
/// to tau get value_at_tau exactly.
GaussianDraw sample_conditional(const FieldModel& model, std::span<const double> tau, double value_at_tau,
                                const PointSet& points, Rng& rng);

}  // namespace excursion
