#pragma once

#include <span>

namespace excursion {

class FieldModel;

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double gaussian_density(double x);

/// P(Z > x) for standard normal Z. Relative error below 1e-13 wherever the
/// result is a normal double; underflows to zero (or a subnormal) past x ~ 37.
double gaussian_tail(double x);

/// log P(Z > x), finite and accurate for every finite x.
double log_gaussian_tail(double x);

/// P(f(t) > level) and its logarithm for the model's marginal at t.
double marginal_tail(const FieldModel& model, std::span<const double> t, double level);
double log_marginal_tail(const FieldModel& model, std::span<const double> t, double level);

}  // namespace excursion
