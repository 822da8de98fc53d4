#include "excursion/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "excursion/error.hpp"
#include "excursion/gaussian.hpp"

namespace excursion {

double gamma_level(double b) {
  if (!(b > 1.0) || !std::isfinite(b)) {
    throw InvalidLevelError("level b = " + std::to_string(b) +
                            " must exceed 1 so that the tilt b - 1/b is positive; use crude Monte Carlo instead");
  }
  return b - 1.0 / b;
}

LogIntegral normalizing_integral(const FieldModel& model, double level) {
  if (!std::isfinite(level)) throw InvalidLevelError("normalizing integral needs a finite level");
  if (const auto& cm = model.constant_marginals()) {
    LogIntegral out;
    out.log_value = std::log(model.domain().lebesgue_measure()) + log_gaussian_tail((level - cm->first) / cm->second);
    return out;
  }
  return integrate_log(model.domain(),
                       [&model, level](std::span<const double> t) { return log_marginal_tail(model, t, level); });
}

MeasureContext::MeasureContext(const FieldModel& model, double b)
    : level_(b), tilt_(gamma_level(b)), integral_(normalizing_integral(model, tilt_)) {}

double MeasureContext::normalizer() const { return std::exp(integral_.log_value); }

namespace {

constexpr double kMinAcceptance = 1e-6;

std::size_t envelope_nodes_per_axis(std::size_t dim) {
  if (dim <= 2) return 1024;
  return std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(std::pow(2.0, 21.0 / static_cast<double>(dim)))));
}

std::size_t inversion_cells_per_axis(std::size_t dim) {
  if (dim == 1) return 4096;
  return std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(std::pow(2.0, 16.0 / static_cast<double>(dim)))));
}

// Calls fn(point) for every node of a tensor grid with `per_axis` nodes per
// axis; `centered` places nodes at cell midpoints instead of the cell corners.
template <typename Fn>
void for_each_grid_node(const BoxDomain& box, std::size_t per_axis, bool centered, Fn&& fn) {
  const std::size_t d = box.dim();
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> point(d);
  for (;;) {
    for (std::size_t a = 0; a < d; ++a) {
      const double frac = centered ? (static_cast<double>(idx[a]) + 0.5) / static_cast<double>(per_axis)
                                   : static_cast<double>(idx[a]) / static_cast<double>(per_axis - 1);
      point[a] = box.lower()[a] + frac * box.width(a);
    }
    fn(std::span<const double>(point));
    std::size_t a = 0;
    while (a < d && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == d) break;
  }
}

}  // namespace

TauSampler::TauSampler(const FieldModel& model, const MeasureContext& ctx, TauMethod method)
    : model_(&model), tilt_(ctx.tilt()), method_(method) {
  const BoxDomain& box = model.domain();
  const std::size_t d = box.dim();

  if (model.constant_marginals()) {
    uniform_ = true;
    const auto [mu, sd] = *model.constant_marginals();
    log_envelope_ = log_gaussian_tail((tilt_ - mu) / sd);
    acceptance_rate_ = 1.0;
    return;
  }

  if (method_ == TauMethod::Rejection) {
    // Smallest standardized threshold over the grid, pushed down by the
    // Hoelder moduli over the worst-case distance to the nearest node.
    const std::size_t nodes = envelope_nodes_per_axis(d);
    double reach2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double half = 0.5 * box.width(a) / static_cast<double>(nodes - 1);
      reach2 += half * half;
    }
    const double reach = std::sqrt(reach2);
    const MarginalModulus& mod = model.modulus();
    const double dmu = mod.mean_constant * std::pow(reach, mod.mean_exponent);
    const double dsd = mod.sd_constant * std::pow(reach, mod.sd_exponent);
    double z_low = std::numeric_limits<double>::infinity();
    for_each_grid_node(box, nodes, false, [&](std::span<const double> t) {
      const double num = tilt_ - model.mean(t) - dmu;
      const double sd = model.sd(t);
      double z;
      if (num >= 0.0) {
        z = num / (sd + dsd);
      } else {
        z = sd > dsd ? num / (sd - dsd) : -std::numeric_limits<double>::infinity();
      }
      z_low = std::min(z_low, z);
    });
    log_envelope_ = log_gaussian_tail(z_low);
    acceptance_rate_ = std::exp(ctx.log_normalizer() - std::log(box.lebesgue_measure()) - log_envelope_);
    if (!(acceptance_rate_ >= kMinAcceptance)) {
      throw SamplerInefficiencyError("tau rejection sampler acceptance rate " + std::to_string(acceptance_rate_) +
                                     " is below 1e-6; select the grid-inversion sampler");
    }
    return;
  }

  cells_per_axis_ = inversion_cells_per_axis(d);
  std::vector<double> logw;
  for_each_grid_node(box, cells_per_axis_, true,
                     [&](std::span<const double> t) { logw.push_back(log_marginal_tail(model, t, tilt_)); });
  const double top = *std::max_element(logw.begin(), logw.end());
  log_envelope_ = top;
  cell_cdf_.resize(logw.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    acc += std::exp(logw[i] - top);
    cell_cdf_[i] = acc;
  }
  for (double& c : cell_cdf_) c /= acc;
  cell_cdf_.back() = 1.0;
}

void TauSampler::sample(Rng& rng, std::span<double> out) const {
  const BoxDomain& box = model_->domain();
  const std::size_t d = box.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  if (method_ == TauMethod::GridInversion && !uniform_) {
    const double u = unit(rng);
    auto it = std::upper_bound(cell_cdf_.begin(), cell_cdf_.end(), u);
    std::size_t cell = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cell_cdf_.begin(), static_cast<std::ptrdiff_t>(cell_cdf_.size()) - 1));
    const double h = 1.0 / static_cast<double>(cells_per_axis_);
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t k = cell % cells_per_axis_;
      cell /= cells_per_axis_;
      out[a] = box.lower()[a] + (static_cast<double>(k) + unit(rng)) * h * box.width(a);
    }
    return;
  }

  for (;;) {
    for (std::size_t a = 0; a < d; ++a) out[a] = box.lower()[a] + unit(rng) * box.width(a);
    if (uniform_) return;
    const double log_accept = log_marginal_tail(*model_, out, tilt_) - log_envelope_;
    if (std::log(open_uniform(rng)) < log_accept) return;
  }
}

std::vector<double> TauSampler::sample(Rng& rng) const {
  std::vector<double> out(model_->dim());
  sample(rng, out);
  return out;
}

std::vector<double> sample_tau(const TauSampler& sampler, Rng& rng) { return sampler.sample(rng); }

double sample_truncated_tail(double mean, double sd, double threshold, Rng& rng) {
  if (!(sd > 0.0)) throw ConfigurationError("truncated normal needs a positive standard deviation");
  const double c = (threshold - mean) / sd;
  for (;;) {
    double z;
    if (c < 1.0) {
      std::normal_distribution<double> normal;
      do {
        z = normal(rng);
      } while (z <= c);
    } else {
      // Exponential proposal shifted to c with the optimal rate.
      const double rate = 0.5 * (c + std::sqrt(c * c + 4.0));
      for (;;) {
        z = c - std::log(open_uniform(rng)) / rate;
        const double gap = z - rate;
        if (std::log(open_uniform(rng)) < -0.5 * gap * gap) break;
      }
    }
    const double x = mean + sd * z;
    if (x > threshold) return x;
  }
}

double likelihood_ratio_weight(const MeasureContext& ctx, double mes_estimate) {
  if (!(mes_estimate > 0.0) || !std::isfinite(mes_estimate)) {
    throw InvalidWeightError("excursion volume estimate must be positive and finite");
  }
  return std::exp(ctx.log_normalizer() - std::log(mes_estimate));
}

}  // namespace excursion
