#include "excursion/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "excursion/error.hpp"

namespace excursion {

namespace {

// Legendre polynomial P_n and its derivative at x.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussLegendre gauss_legendre(int order) {
  if (order < 1) throw ConfigurationError("Gauss-Legendre order must be positive");
  GaussLegendre rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(order, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(order, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

namespace {

struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > max) {
      sum = sum * std::exp(max - log_term) + 1.0;
      max = log_term;
    } else {
      sum += std::exp(log_term - max);
    }
  }
  double value() const { return sum > 0.0 ? max + std::log(sum) : -std::numeric_limits<double>::infinity(); }
};

double log_integrate_at(const BoxDomain& box, const std::function<double(std::span<const double>)>& log_integrand,
                        const GaussLegendre& rule, int refinement) {
  const std::size_t d = box.dim();
  const std::size_t cells = std::size_t{1} << refinement;
  const std::size_t q = rule.nodes.size();
  const std::size_t per_axis = cells * q;

  // Per-axis abscissae and log weights for the composite rule.
  std::vector<std::vector<double>> x(d, std::vector<double>(per_axis));
  std::vector<std::vector<double>> logw(d, std::vector<double>(per_axis));
  for (std::size_t a = 0; a < d; ++a) {
    const double h = box.width(a) / static_cast<double>(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      const double mid = box.lower()[a] + (static_cast<double>(c) + 0.5) * h;
      for (std::size_t k = 0; k < q; ++k) {
        x[a][c * q + k] = mid + 0.5 * h * rule.nodes[k];
        logw[a][c * q + k] = std::log(0.5 * h * rule.weights[k]);
      }
    }
  }

  std::vector<std::size_t> idx(d, 0);
  std::vector<double> point(d);
  LogSum acc;
  for (;;) {
    double lw = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      point[a] = x[a][idx[a]];
      lw += logw[a][idx[a]];
    }
    const double lf = log_integrand(point);
    if (std::isnan(lf)) throw QuadratureError("integrand evaluated to NaN");
    acc.add(lw + lf);
    std::size_t a = 0;
    while (a < d && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == d) break;
  }
  return acc.value();
}

}  // namespace

LogIntegral integrate_log(const BoxDomain& box, const std::function<double(std::span<const double>)>& log_integrand,
                          const QuadratureOptions& options) {
  const GaussLegendre rule = gauss_legendre(options.nodes_per_cell);
  const double per_cell = std::pow(static_cast<double>(options.nodes_per_cell), static_cast<double>(box.dim()));

  LogIntegral out;
  out.info.nodes_per_cell = options.nodes_per_cell;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k <= options.max_refinements; ++k) {
    const double cells = std::pow(2.0, static_cast<double>(k) * static_cast<double>(box.dim()));
    const double evaluations = static_cast<double>(out.info.evaluations) + cells * per_cell;
    if (evaluations > static_cast<double>(options.max_evaluations)) {
      throw QuadratureError("quadrature exceeded its evaluation budget at refinement " + std::to_string(k) +
                            " (last relative change " + std::to_string(out.info.relative_change) + ")");
    }
    const double current = log_integrate_at(box, log_integrand, rule, k);
    out.info.evaluations = static_cast<std::size_t>(evaluations);
    out.info.refinements = k;
    out.log_value = current;
    if (k > 0) {
      if (current == -std::numeric_limits<double>::infinity() &&
          previous == -std::numeric_limits<double>::infinity()) {
        out.info.relative_change = 0.0;
        return out;
      }
      out.info.relative_change = std::abs(std::expm1(current - previous));
      if (out.info.relative_change <= options.relative_tolerance) return out;
    }
    previous = current;
  }
  throw QuadratureError("quadrature did not converge in " + std::to_string(options.max_refinements) +
                        " refinements (last relative change " + std::to_string(out.info.relative_change) + ")");
}

}  // namespace excursion
