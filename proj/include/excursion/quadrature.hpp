#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "excursion/field.hpp"

namespace excursion {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int order);

struct QuadratureInfo {
  int nodes_per_cell = 0;
  int refinements = 0;  // cells per axis = 2^refinements
  std::size_t evaluations = 0;
  double relative_change = 0.0;  // between the last two refinements
};

struct LogIntegral {
  double log_value = 0.0;
  QuadratureInfo info;
};

struct QuadratureOptions {
  int nodes_per_cell = 8;
  double relative_tolerance = 1e-8;
  int max_refinements = 12;
  std::size_t max_evaluations = std::size_t{1} << 24;
};

/// log of the integral of exp(log_integrand) over the box, by tensor
/// Gauss-Legendre on dyadically refined cells. Terms are accumulated with a
/// streaming log-sum-exp so integrands spanning many decades stay exact.
/// Throws QuadratureError when refinement does not settle.
LogIntegral integrate_log(const BoxDomain& box, const std::function<double(std::span<const double>)>& log_integrand,
                          const QuadratureOptions& options = {});

}  // namespace excursion
