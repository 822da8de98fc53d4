#include "excursion/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "excursion/error.hpp"
#include "excursion/gaussian.hpp"
#include "excursion/measure.hpp"
#include "excursion/mvn.hpp"
#include "excursion/quadrature.hpp"

namespace excursion {

double cosine_truth(double b) {
  return gaussian_tail(b) + 3.0 / (8.0 * std::numbers::pi) * std::exp(-0.5 * b * b);
}

double expected_excursion_measure(const FieldModel& model, double b) {
  return std::exp(normalizing_integral(model, b).log_value);
}

EstimateReport crude_grid_mc(const FieldModel& model, double b, std::size_t grid_per_axis, std::size_t n, Rng& rng) {
  if (n < 2) throw InsufficientReplicatesError("crude Monte Carlo needs at least two samples");
  const BoxDomain& box = model.domain();
  const std::size_t d = box.dim();
  if (grid_per_axis == 0 || std::pow(static_cast<double>(grid_per_axis), static_cast<double>(d)) > 4096.0) {
    throw ConfigurationError("crude grid must have between 1 and 4096 nodes");
  }

  PointSet grid(d);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> t(d);
  for (;;) {
    for (std::size_t a = 0; a < d; ++a) {
      t[a] = grid_per_axis == 1 ? box.lower()[a] + 0.5 * box.width(a)
                                : box.lower()[a] + box.width(a) * static_cast<double>(idx[a]) /
                                                       static_cast<double>(grid_per_axis - 1);
    }
    grid.push_back(t);
    std::size_t a = 0;
    while (a < d && ++idx[a] == grid_per_axis) idx[a++] = 0;
    if (a == d) break;
  }

  const PsdFactor factor = factor_psd(cov_matrix(model, grid));
  const auto k = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd mean(k), z(k);
  for (Eigen::Index i = 0; i < k; ++i) mean[i] = model.mean(grid[static_cast<std::size_t>(i)]);
  const auto lower = factor.lower.triangularView<Eigen::Lower>();
  std::normal_distribution<double> normal;
  std::size_t hits = 0;
  for (std::size_t s = 0; s < n; ++s) {
    for (Eigen::Index i = 0; i < k; ++i) z[i] = normal(rng);
    const Eigen::VectorXd x = mean + lower * z;
    if (x.maxCoeff() > b) ++hits;
  }

  EstimateReport report;
  report.level = b;
  report.n = n;
  report.m = grid.size();
  report.estimate = static_cast<double>(hits) / static_cast<double>(n);
  const double p = report.estimate;
  report.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  report.log_estimate = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
  return report;
}

double cosine_grid_truth(double b, const std::vector<double>& points) {
  if (points.empty()) throw ConfigurationError("cosine grid oracle needs points");
  // Given the phase phi, max_i R cos(t_i - phi) > b iff R c(phi) > b with
  // c(phi) = max_i cos(t_i - phi); R is Rayleigh, P(R > r) = exp(-r^2 / 2).
  // c is smooth between the phases where the nearest point switches and where
  // phi passes a point, so integrate piecewise between those breakpoints.
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> breaks = {0.0, two_pi};
  auto wrap = [two_pi](double a) {
    a = std::fmod(a, two_pi);
    return a < 0.0 ? a + two_pi : a;
  };
  for (double ti : points) {
    breaks.push_back(wrap(ti));
    breaks.push_back(wrap(ti + std::numbers::pi));
    for (double tj : points) {
      breaks.push_back(wrap(0.5 * (ti + tj)));
      breaks.push_back(wrap(0.5 * (ti + tj) + std::numbers::pi));
    }
  }
  std::sort(breaks.begin(), breaks.end());
  const GaussLegendre rule = gauss_legendre(24);
  auto integrand = [&](double phi) {
    double c = -1.0;
    for (double ti : points) c = std::max(c, std::cos(ti - phi));
    if (c <= 0.0) return 0.0;
    return std::exp(-0.5 * b * b / (c * c));
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i], hi = breaks[i + 1];
    if (hi - lo < 1e-15) continue;
    // Split each piece further so the Gaussian-like peaks are resolved.
    constexpr int kSub = 8;
    const double h = (hi - lo) / kSub;
    for (int s = 0; s < kSub; ++s) {
      const double mid = lo + (s + 0.5) * h;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        total += 0.5 * h * rule.weights[k] * integrand(mid + 0.5 * h * rule.nodes[k]);
      }
    }
  }
  return total / two_pi;
}

CosinePath::CosinePath(double x, double y)
    : x_(x), y_(y), amplitude_(std::hypot(x, y)), phase_(std::atan2(y, x)) {}

CosinePath CosinePath::draw(Rng& rng) {
  std::normal_distribution<double> normal;
  const double x = normal(rng);
  const double y = normal(rng);
  return CosinePath(x, y);
}

double CosinePath::operator()(double t) const { return x_ * std::cos(t) + y_ * std::sin(t); }

double CosinePath::supremum(double lo, double hi) const {
  // R cos(t - phase) peaks at t = phase + 2 pi k; otherwise at an endpoint.
  const double two_pi = 2.0 * std::numbers::pi;
  const double k = std::ceil((lo - phase_) / two_pi);
  const double peak = phase_ + k * two_pi;
  if (peak <= hi) return amplitude_;
  return std::max((*this)(lo), (*this)(hi));
}

CosinePath cosine_exact_simulator(Rng& rng) { return CosinePath::draw(rng); }

}  // namespace excursion
