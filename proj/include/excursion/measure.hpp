#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "excursion/field.hpp"
#include "excursion/quadrature.hpp"
#include "excursion/rng.hpp"

namespace excursion {

/// Tilt level gamma = b - 1/b. Throws InvalidLevelError unless b > 1.
double gamma_level(double b);

/// Integral over the domain of P(f(t) > level), in log space. Closed form
/// when the marginals are constant; quadrature otherwise.
LogIntegral normalizing_integral(const FieldModel& model, double level);

/// Per-level state of the tilted measure: level b, tilt gamma and the
/// normalizing integral of P(f(t) > gamma) over the domain.
class MeasureContext {
 public:
  MeasureContext(const FieldModel& model, double b);

  double level() const { return level_; }
  double tilt() const { return tilt_; }
  double log_normalizer() const { return integral_.log_value; }
  double normalizer() const;
  const QuadratureInfo& quadrature() const { return integral_.info; }

 private:
  double level_;
  double tilt_;
  LogIntegral integral_;
};

enum class TauMethod {
  Rejection,      // exact: uniform proposal against a certified envelope
  GridInversion,  // approximate: inverse CDF over grid cells, uniform jitter inside
};

/// Draws the twist location tau from h(t) proportional to P(f(t) > gamma).
class TauSampler {
 public:
  TauSampler(const FieldModel& model, const MeasureContext& ctx, TauMethod method = TauMethod::Rejection);

  void sample(Rng& rng, std::span<double> out) const;
  std::vector<double> sample(Rng& rng) const;

  TauMethod method() const { return method_; }
  /// Upper bound on log P(f(t) > gamma) over the domain.
  double log_envelope() const { return log_envelope_; }
  /// Exact acceptance probability of the rejection sampler.
  double acceptance_rate() const { return acceptance_rate_; }

 private:
  const FieldModel* model_;
  double tilt_;
  TauMethod method_;
  double log_envelope_ = 0.0;
  double acceptance_rate_ = 1.0;
  bool uniform_ = false;
  // GridInversion state.
  std::size_t cells_per_axis_ = 0;
  std::vector<double> cell_cdf_;
};

/// Convenience wrapper for TauSampler::sample.
std::vector<double> sample_tau(const TauSampler& sampler, Rng& rng);

/// Exact draw from N(mean, sd^2) conditioned on exceeding `threshold`.
double sample_truncated_tail(double mean, double sd, double threshold, Rng& rng);

/// dP/dQ at a path whose excursion volume is estimated by `mes_estimate`:
/// normalizer / mes_estimate. Throws InvalidWeightError for mes_estimate <= 0.
double likelihood_ratio_weight(const MeasureContext& ctx, double mes_estimate);

}  // namespace excursion
