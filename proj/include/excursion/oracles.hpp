#pragma once

#include <cstddef>
#include <vector>

#include "excursion/estimator.hpp"
#include "excursion/field.hpp"
#include "excursion/rng.hpp"

namespace excursion {

/// Closed-form P(sup_{[0, 3/4]} (X cos t + Y sin t) > b).
double cosine_truth(double b);

/// E mes({t in T : f(t) > b}) = integral of P(f(t) > b) over the domain.
double expected_excursion_measure(const FieldModel& model, double b);

/// Plain Monte Carlo estimate of P(max over a regular grid of f > b), with
/// the binomial standard error. The grid has grid_per_axis nodes per axis,
/// endpoints included, and at most 4096 nodes in total.
EstimateReport crude_grid_mc(const FieldModel& model, double b, std::size_t grid_per_axis, std::size_t n, Rng& rng);

/// Exact P(max_i f(t_i) > b) for the cosine process over arbitrary points,
/// by integrating the Rayleigh amplitude tail over the uniform phase.
double cosine_grid_truth(double b, const std::vector<double>& points);

/// One path f(t) = X cos t + Y sin t = R cos(t - phase).
class CosinePath {
 public:
  CosinePath(double x, double y);
  static CosinePath draw(Rng& rng);

  double operator()(double t) const;
  /// Exact supremum over [lo, hi].
  double supremum(double lo, double hi) const;

 private:
  double x_;
  double y_;
  double amplitude_;
  double phase_;
};

CosinePath cosine_exact_simulator(Rng& rng);

}  // namespace excursion
