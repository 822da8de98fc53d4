#include "excursion/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "excursion/field.hpp"

namespace excursion {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
// Beyond this point erfc loses range before accuracy; switch to the Mills ratio.
constexpr double kContinuedFractionFrom = 25.0;

// Mills ratio P(Z > x) / phi(x) by backward evaluation of
// 1 / (x + 1 / (x + 2 / (x + 3 / (x + ...)))). Converges fast for x >= 25.
double mills_ratio(double x) {
  double acc = x;
  for (int k = 60; k >= 1; --k) acc = x + k / acc;
  return 1.0 / acc;
}

}  // namespace

double gaussian_density(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double gaussian_tail(double x) {
  if (x < kContinuedFractionFrom) return 0.5 * std::erfc(x * kInvSqrt2);
  return std::exp(log_gaussian_tail(x));
}

double log_gaussian_tail(double x) {
  if (x < 0.0) return std::log1p(-0.5 * std::erfc(-x * kInvSqrt2));
  if (x < kContinuedFractionFrom) return std::log(0.5 * std::erfc(x * kInvSqrt2));
  return -0.5 * x * x - kLogSqrt2Pi + std::log(mills_ratio(x));
}

double marginal_tail(const FieldModel& model, std::span<const double> t, double level) {
  return gaussian_tail((level - model.mean(t)) / model.sd(t));
}

double log_marginal_tail(const FieldModel& model, std::span<const double> t, double level) {
  return log_gaussian_tail((level - model.mean(t)) / model.sd(t));
}

}  // namespace excursion
