#include "excursion/mvn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "excursion/error.hpp"

namespace excursion {

namespace {

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ModelEvaluationError(std::string("non-finite ") + what + " evaluation");
}

void fill_standard_normal(Rng& rng, Eigen::VectorXd& z) {
  std::normal_distribution<double> dist;
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = dist(rng);
}

bool same_point(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

Eigen::MatrixXd cov_matrix(const FieldModel& model, const PointSet& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n == 0) throw ConfigurationError("covariance of an empty point list");
  Eigen::VectorXd sd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sd[i] = model.sd(points[i]);
    check_finite(sd[i], "standard deviation");
  }
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    c(j, j) = sd[j] * sd[j] * model.correlation(points[j], points[j]);
    check_finite(c(j, j), "covariance");
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = sd[i] * sd[j] * model.correlation(points[i], points[j]);
      check_finite(v, "covariance");
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

PsdFactor factor_psd(const Eigen::MatrixXd& matrix) {
  const auto n = matrix.rows();
  if (n == 0 || matrix.cols() != n) throw ConfigurationError("factor_psd needs a nonempty square matrix");
  if (!matrix.allFinite()) throw ModelEvaluationError("non-finite covariance entry");
  if (matrix.cwiseAbs().maxCoeff() == 0.0) return {Eigen::MatrixXd::Zero(n, n), 0.0};

  Eigen::LLT<Eigen::MatrixXd> llt(matrix);
  if (llt.info() == Eigen::Success) return {llt.matrixL(), 0.0};

  const double scale = matrix.diagonal().cwiseAbs().sum() / static_cast<double>(n);
  const double max_ridge = 1e-6 * scale;
  Eigen::MatrixXd shifted = matrix;
  for (double ridge = 1e-12 * scale; ridge > 0.0; ridge = std::min(2.0 * ridge, max_ridge)) {
    shifted.diagonal() = matrix.diagonal().array() + ridge;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), ridge};
    if (ridge >= max_ridge) break;
  }
  throw SingularModelError("covariance is not positive semidefinite within the ridge ladder (n = " +
                           std::to_string(n) + ")");
}

GaussianDraw sample_joint(const FieldModel& model, const PointSet& points, Rng& rng) {
  const PsdFactor factor = factor_psd(cov_matrix(model, points));
  const auto n = factor.lower.rows();
  Eigen::VectorXd z(n);
  fill_standard_normal(rng, z);
  const Eigen::VectorXd x = factor.lower.triangularView<Eigen::Lower>() * z;
  GaussianDraw out;
  out.ridge = factor.ridge;
  out.values.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[static_cast<std::size_t>(i)] = model.mean(points[static_cast<std::size_t>(i)]) + x[i];
  }
  return out;
}

GaussianDraw sample_conditional(const FieldModel& model, std::span<const double> tau, double value_at_tau,
                                const PointSet& points, Rng& rng) {
  const std::size_t m = points.size();
  GaussianDraw out;
  out.values.assign(m, value_at_tau);

  // Points coinciding with tau carry no conditional variance.
  std::vector<std::size_t> free;
  free.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!same_point(points[i], tau)) free.push_back(i);
  }
  if (free.empty()) return out;

  const double sd_tau = model.sd(tau);
  const double mean_tau = model.mean(tau);
  check_finite(sd_tau, "standard deviation");
  check_finite(mean_tau, "mean");
  const double standardized = (value_at_tau - mean_tau) / sd_tau;

  const auto k = static_cast<Eigen::Index>(free.size());
  Eigen::VectorXd sd(k), r_tau(k), mean(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto t = points[free[static_cast<std::size_t>(a)]];
    sd[a] = model.sd(t);
    r_tau[a] = model.correlation(t, tau);
    mean[a] = model.mean(t) + sd[a] * r_tau[a] * standardized;
    check_finite(mean[a], "conditional mean");
  }
  Eigen::MatrixXd c(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto tj = points[free[static_cast<std::size_t>(j)]];
    for (Eigen::Index i = j; i < k; ++i) {
      const auto ti = points[free[static_cast<std::size_t>(i)]];
      const double v = sd[i] * sd[j] * (model.correlation(ti, tj) - r_tau[i] * r_tau[j]);
      check_finite(v, "conditional covariance");
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  const PsdFactor factor = factor_psd(c);
  Eigen::VectorXd z(k);
  fill_standard_normal(rng, z);
  const Eigen::VectorXd x = mean + factor.lower.triangularView<Eigen::Lower>() * z;
  for (Eigen::Index a = 0; a < k; ++a) out.values[free[static_cast<std::size_t>(a)]] = x[a];
  out.ridge = factor.ridge;
  return out;
}

}  // namespace excursion
