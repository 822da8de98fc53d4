#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "excursion/design.hpp"
#include "excursion/field.hpp"
#include "excursion/measure.hpp"
#include "excursion/rng.hpp"

namespace excursion {

/// Deterministic integrand xi(t) on the domain with a1 <= xi <= a2, a1 > 0.
struct IntegrandSpec {
  ScalarFn xi;
  IntegrandBounds bounds;

  static IntegrandSpec constant(double value);

  /// Spot-checks the bounds on a grid over the domain.
  void validate(const FieldModel& model) const;
};

/// Everything a replicate at level b needs, built once and shared read-only
/// by all workers. Keeps a pointer to `model`, which must outlive it.
class LevelSetup {
 public:
  LevelSetup(const FieldModel& model, double b, std::size_t m, DesignDensity density,
             TauMethod tau_method = TauMethod::Rejection);

  const FieldModel& model() const { return *model_; }
  const MeasureContext& context() const { return ctx_; }
  const TauSampler& tau_sampler() const { return tau_sampler_; }
  const ScaleFactors& scales() const { return scales_; }
  const DesignDensity& density() const { return density_; }
  std::size_t m() const { return m_; }
  double level() const { return ctx_.level(); }

 private:
  const FieldModel* model_;
  MeasureContext ctx_;
  TauSampler tau_sampler_;
  ScaleFactors scales_;
  DesignDensity density_;
  std::size_t m_;
};

/// One draw of the discretized estimator.
struct Replicate {
  std::vector<double> tau;
  double value_at_tau = 0.0;
  DesignDraw design;
  std::vector<double> field_values;
  double mes_hat = 0.0;
  bool exceeded = false;  // some in-domain design value is above b
  double z_hat = 0.0;
  std::optional<double> y_hat;
  double ridge = 0.0;
  std::uint64_t stream = 0;
};

Replicate run_tail_replicate(const LevelSetup& setup, Rng& rng, std::uint64_t stream = 0);
Replicate run_integral_replicate(const LevelSetup& setup, const IntegrandSpec& integrand, Rng& rng,
                                 std::uint64_t stream = 0);

/// Worker count from EXCURSION_WORKERS, else the hardware concurrency.
unsigned default_workers();

struct RunOptions {
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: default_workers()
  double max_error_fraction = 1e-3;
};

/// Replicate values in replicate order with failed replicates removed.
struct ReplicateBatch {
  std::vector<double> z;
  std::vector<double> y;  // empty unless an integrand was given
  std::size_t errored = 0;
  std::vector<std::string> errors;  // first few messages, in replicate order
  double wall_time_ms = 0.0;
};

/// Runs n independent replicates; replicate i uses make_stream(seed, i), so
/// the result does not depend on the worker count. Throws
/// ReplicateFailureError when more than max_error_fraction of them fail.
ReplicateBatch run_replicates(const LevelSetup& setup, const RunOptions& options,
                              const IntegrandSpec* integrand = nullptr);

enum class Target { TailProbability, ExcursionIntegral, ConditionalExpectation };

std::string target_name(Target target);

struct AccuracyTarget {
  double eps = 0.1;
  double delta = 0.05;
};

struct EstimateReport {
  Target target = Target::TailProbability;
  double level = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double log_estimate = 0.0;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
  std::size_t errored = 0;
  std::string config_digest;
  AccuracyTarget accuracy;
  // Chebyshev count Var / (delta eps^2 mean^2) for the requested accuracy.
  double required_replicates = 0.0;

  double relative_error() const { return estimate > 0.0 ? std_error / estimate : 0.0; }
};

/// Mean and standard error (sample sd / sqrt(n)) of replicate values.
/// Throws InsufficientReplicatesError when n < 2.
EstimateReport aggregate(std::span<const double> values, AccuracyTarget accuracy = {});

/// Ratio sum(y) / sum(z) over paired replicates with a delta-method standard
/// error. Throws NoHitError when every z is zero.
EstimateReport ratio_estimate(std::span<const double> y, std::span<const double> z, AccuracyTarget accuracy = {});

struct LevelEstimate {
  EstimateReport tail;
  std::optional<EstimateReport> integral;
  std::optional<EstimateReport> conditional;
};

/// Tail probability at setup.level() and, with an integrand, the excursion
/// integral and the conditional expectation from the same replicates.
LevelEstimate estimate_level(const LevelSetup& setup, const RunOptions& options,
                             const IntegrandSpec* integrand = nullptr, AccuracyTarget accuracy = {});

/// v(b) = E[integral of xi over the excursion set | sup f > b].
EstimateReport estimate_conditional(const LevelSetup& setup, const IntegrandSpec& integrand,
                                    const RunOptions& options, AccuracyTarget accuracy = {});

/// Pickands constant estimate w_hat / (b^{2/alpha} P(Z > b)).
double pickands_estimate(double alpha, double b, double w_hat);

}  // namespace excursion
