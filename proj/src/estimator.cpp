#include "excursion/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

#include "excursion/error.hpp"
#include "excursion/gaussian.hpp"
#include "excursion/mvn.hpp"

namespace excursion {

IntegrandSpec IntegrandSpec::constant(double value) {
  IntegrandSpec spec;
  spec.xi = [value](std::span<const double>) { return value; };
  spec.bounds = {value, value};
  return spec;
}

void IntegrandSpec::validate(const FieldModel& model) const {
  if (!xi) throw ConfigurationError("integrand function is missing");
  if (!(bounds.lower > 0.0) || !(bounds.lower <= bounds.upper)) {
    throw ConfigurationError("integrand bounds need 0 < a1 <= a2");
  }
  const BoxDomain& box = model.domain();
  const std::size_t d = box.dim();
  const std::size_t per_axis =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::pow(1e5, 1.0 / static_cast<double>(d))));
  const std::size_t nodes = std::min<std::size_t>(per_axis, 33);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> t(d);
  for (;;) {
    for (std::size_t a = 0; a < d; ++a) {
      t[a] = box.lower()[a] + box.width(a) * static_cast<double>(idx[a]) / static_cast<double>(nodes - 1);
    }
    const double v = xi(t);
    if (!(v >= bounds.lower && v <= bounds.upper)) {
      throw IntegrandBoundsError("integrand leaves its declared bounds on the domain");
    }
    std::size_t a = 0;
    while (a < d && ++idx[a] == nodes) idx[a++] = 0;
    if (a == d) break;
  }
}

LevelSetup::LevelSetup(const FieldModel& model, double b, std::size_t m, DesignDensity density, TauMethod tau_method)
    : model_(&model),
      ctx_(model, b),
      tau_sampler_(model, ctx_, tau_method),
      scales_(cluster_scale(model, b)),
      density_(std::move(density)),
      m_(m) {
  if (m_ == 0) throw ConfigurationError("design size m must be positive");
  if (density_.dim() != model.dim()) throw ConfigurationError("design density dimension mismatch");
}

namespace {

Replicate run_replicate(const LevelSetup& setup, const IntegrandSpec* integrand, Rng& rng, std::uint64_t stream) {
  const FieldModel& model = setup.model();
  const MeasureContext& ctx = setup.context();
  const double b = ctx.level();
  const double gamma = ctx.tilt();

  Replicate rep;
  rep.stream = stream;
  rep.tau = setup.tau_sampler().sample(rng);
  rep.value_at_tau = sample_truncated_tail(model.mean(rep.tau), model.sd(rep.tau), gamma, rng);
  rep.design = sample_design_points(rep.tau, setup.scales().zeta, setup.m(), setup.density(), model.domain(), rng);
  GaussianDraw draw = sample_conditional(model, rep.tau, rep.value_at_tau, rep.design.points, rng);
  rep.field_values = std::move(draw.values);
  rep.ridge = draw.ridge;

  rep.mes_hat = mes_hat(rep.field_values, gamma, rep.design);
  for (std::size_t i = 0; i < rep.field_values.size(); ++i) {
    if (rep.design.inside[i] && rep.field_values[i] > b) {
      rep.exceeded = true;
      break;
    }
  }
  // b > gamma, so an exceedance of b forces mes_hat > 0.
  const double weight = rep.mes_hat > 0.0 ? likelihood_ratio_weight(ctx, rep.mes_hat) : 0.0;
  rep.z_hat = rep.exceeded ? weight : 0.0;

  if (integrand) {
    std::vector<double> xi(rep.design.size(), 0.0);
    for (std::size_t i = 0; i < xi.size(); ++i) {
      if (rep.design.inside[i]) xi[i] = integrand->xi(rep.design.points[i]);
    }
    const double alpha = alpha_hat(xi, rep.field_values, b, rep.design, integrand->bounds);
    rep.y_hat = rep.mes_hat > 0.0 ? alpha * weight : 0.0;
  }
  return rep;
}

// Neumaier-compensated sum; the order of `values` fixes the result.
double compensated_sum(std::span<const double> values) {
  double sum = 0.0, carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

double sample_variance(std::span<const double> values, double mean) {
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  return compensated_sum(sq) / static_cast<double>(values.size() - 1);
}

void finish_report(EstimateReport& report, double variance) {
  const double n = static_cast<double>(report.n);
  report.std_error = std::sqrt(variance / n);
  report.log_estimate =
      report.estimate > 0.0 ? std::log(report.estimate) : -std::numeric_limits<double>::infinity();
  const double eps = report.accuracy.eps;
  const double delta = report.accuracy.delta;
  report.required_replicates = report.estimate > 0.0
                                   ? std::ceil(variance / (delta * eps * eps * report.estimate * report.estimate))
                                   : std::numeric_limits<double>::infinity();
}

}  // namespace

Replicate run_tail_replicate(const LevelSetup& setup, Rng& rng, std::uint64_t stream) {
  return run_replicate(setup, nullptr, rng, stream);
}

Replicate run_integral_replicate(const LevelSetup& setup, const IntegrandSpec& integrand, Rng& rng,
                                 std::uint64_t stream) {
  return run_replicate(setup, &integrand, rng, stream);
}

unsigned default_workers() {
  if (const char* env = std::getenv("EXCURSION_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ReplicateBatch run_replicates(const LevelSetup& setup, const RunOptions& options, const IntegrandSpec* integrand) {
  const std::size_t n = options.n;
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers ? options.workers : default_workers(),
                                                           static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  const auto start = std::chrono::steady_clock::now();

  std::vector<double> z(n, 0.0), y(integrand ? n : 0, 0.0);
  std::vector<char> failed(n, 0);
  std::vector<std::string> messages(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;
  constexpr std::size_t kChunk = 32;

  auto work = [&]() {
    for (;;) {
      const std::size_t begin = next.fetch_add(kChunk);
      if (begin >= n) return;
      const std::size_t end = std::min(n, begin + kChunk);
      for (std::size_t i = begin; i < end; ++i) {
        try {
          Rng rng = make_stream(options.seed, i);
          Replicate rep = run_replicate(setup, integrand, rng, i);
          z[i] = rep.z_hat;
          if (integrand) y[i] = *rep.y_hat;
        } catch (const Error& e) {
          failed[i] = 1;
          messages[i] = "replicate " + std::to_string(i) + ": " + e.what();
        } catch (...) {
          std::lock_guard<std::mutex> lock(fatal_mutex);
          if (!fatal) fatal = std::current_exception();
          next.store(n);
          return;
        }
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  ReplicateBatch batch;
  batch.z.reserve(n);
  if (integrand) batch.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (failed[i]) {
      ++batch.errored;
      if (batch.errors.size() < 5) batch.errors.push_back(messages[i]);
      continue;
    }
    batch.z.push_back(z[i]);
    if (integrand) batch.y.push_back(y[i]);
  }
  batch.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (static_cast<double>(batch.errored) > options.max_error_fraction * static_cast<double>(n)) {
    std::string msg = std::to_string(batch.errored) + " of " + std::to_string(n) + " replicates failed";
    if (!batch.errors.empty()) msg += "; first: " + batch.errors.front();
    throw ReplicateFailureError(msg);
  }
  return batch;
}

std::string target_name(Target target) {
  switch (target) {
    case Target::TailProbability: return "tail_probability";
    case Target::ExcursionIntegral: return "excursion_integral";
    case Target::ConditionalExpectation: return "conditional_expectation";
  }
  return "unknown";
}

EstimateReport aggregate(std::span<const double> values, AccuracyTarget accuracy) {
  if (values.size() < 2) throw InsufficientReplicatesError("aggregation needs at least two replicates");
  EstimateReport report;
  report.n = values.size();
  report.accuracy = accuracy;
  report.estimate = compensated_sum(values) / static_cast<double>(values.size());
  finish_report(report, sample_variance(values, report.estimate));
  return report;
}

EstimateReport ratio_estimate(std::span<const double> y, std::span<const double> z, AccuracyTarget accuracy) {
  if (y.size() != z.size()) throw ConfigurationError("ratio estimate needs paired replicates");
  if (z.size() < 2) throw InsufficientReplicatesError("ratio estimate needs at least two replicates");
  const double sz = compensated_sum(z);
  if (!(sz > 0.0)) throw NoHitError("no replicate hit the level; increase n");
  const double ratio = compensated_sum(y) / sz;
  std::vector<double> residual(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - ratio * z[i];
  const double mean_z = sz / static_cast<double>(z.size());

  EstimateReport report;
  report.target = Target::ConditionalExpectation;
  report.n = y.size();
  report.accuracy = accuracy;
  report.estimate = ratio;
  // Delta method: Var(R) ~ Var(y - R z) / (n mean_z^2).
  finish_report(report, sample_variance(residual, 0.0) / (mean_z * mean_z));
  return report;
}

LevelEstimate estimate_level(const LevelSetup& setup, const RunOptions& options, const IntegrandSpec* integrand,
                             AccuracyTarget accuracy) {
  if (integrand) integrand->validate(setup.model());
  const ReplicateBatch batch = run_replicates(setup, options, integrand);
  auto stamp = [&](EstimateReport& r, Target target) {
    r.target = target;
    r.level = setup.level();
    r.m = setup.m();
    r.seed = options.seed;
    r.wall_time_ms = batch.wall_time_ms;
    r.errored = batch.errored;
  };
  LevelEstimate out;
  out.tail = aggregate(batch.z, accuracy);
  stamp(out.tail, Target::TailProbability);
  if (integrand) {
    out.integral = aggregate(batch.y, accuracy);
    stamp(*out.integral, Target::ExcursionIntegral);
    if (out.tail.estimate > 0.0) {
      out.conditional = ratio_estimate(batch.y, batch.z, accuracy);
      stamp(*out.conditional, Target::ConditionalExpectation);
    }
  }
  return out;
}

EstimateReport estimate_conditional(const LevelSetup& setup, const IntegrandSpec& integrand, const RunOptions& options,
                                    AccuracyTarget accuracy) {
  integrand.validate(setup.model());
  const ReplicateBatch batch = run_replicates(setup, options, &integrand);
  EstimateReport report = ratio_estimate(batch.y, batch.z, accuracy);
  report.level = setup.level();
  report.m = setup.m();
  report.seed = options.seed;
  report.wall_time_ms = batch.wall_time_ms;
  report.errored = batch.errored;
  return report;
}

double pickands_estimate(double alpha, double b, double w_hat) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigurationError("Pickands index alpha must lie in (0, 2]");
  return w_hat * std::exp(-(2.0 / alpha) * std::log(b) - log_gaussian_tail(b));
}

}  // namespace excursion
