#include <doctest.h>

#include <cmath>
#include <vector>

#include "excursion/error.hpp"
#include "excursion/gaussian.hpp"
#include "excursion/measure.hpp"
#include "stat_helpers.hpp"

using namespace excursion;

namespace {

FieldModel linear_mean_model() {
  return make_field(BoxDomain::unit_cube(2), {KernelKind::SquaredExponential}, {0.0, {0.1, 0.1}});
}

// Standard normal conditioned on Z > c.
double truncated_cdf(double x, double c) {
  if (x <= c) return 0.0;
  return -std::expm1(log_gaussian_tail(x) - log_gaussian_tail(c));
}

}  // namespace

TEST_SUITE("measure") {
  TEST_CASE("gamma_level examples") {
    CHECK(gamma_level(2.0) == 1.5);
    CHECK(gamma_level(8.0) == 7.875);
    CHECK(gamma_level(3.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(gamma_level(1.0), InvalidLevelError);
    CHECK_THROWS_AS(gamma_level(0.3), InvalidLevelError);
    CHECK_THROWS_AS(gamma_level(std::nan("")), InvalidLevelError);
  }

  TEST_CASE("normalizing integral: constant field fast path is exact") {
    const FieldModel flat = make_field(BoxDomain::unit_cube(2), {KernelKind::SquaredExponential});
    const LogIntegral r = normalizing_integral(flat, 3.0);
    CHECK(std::exp(r.log_value) == doctest::Approx(0.0013498980316300945).epsilon(1e-13));
    CHECK(r.info.evaluations == 0);
    const FieldModel wide = make_field(BoxDomain({0.0, 0.0}, {2.0, 0.5}), {KernelKind::Exponential});
    CHECK(normalizing_integral(wide, 40.0).log_value == doctest::Approx(-804.60844201375379).epsilon(1e-14));
  }

  TEST_CASE("normalizing integral: linear mean against the frozen oracle") {
    const FieldModel model = linear_mean_model();
    CHECK(std::exp(normalizing_integral(model, 3.0).log_value) == doctest::Approx(0.0018802245299155424).epsilon(1e-8));
    CHECK(std::exp(normalizing_integral(model, 8.0).log_value) == doctest::Approx(1.4696442753210761e-15).epsilon(1e-8));
    CHECK(std::exp(normalizing_integral(model, 7.875).log_value) ==
          doctest::Approx(3.9691857204855848e-15).epsilon(1e-8));
  }

  TEST_CASE("h_b integrates to one") {
    const FieldModel model = linear_mean_model();
    for (double b : {3.0, 8.0}) {
      const MeasureContext ctx(model, b);
      const double log_i = ctx.log_normalizer();
      const LogIntegral r = integrate_log(model.domain(), [&](std::span<const double> t) {
        return log_marginal_tail(model, t, ctx.tilt()) - log_i;
      });
      CHECK(std::exp(r.log_value) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }

  TEST_CASE("log normalizer decreases in the level") {
    const FieldModel model = linear_mean_model();
    double previous = 1.0;
    for (double level = -3.0; level <= 30.0; level += 0.75) {
      const double v = normalizing_integral(model, level).log_value;
      CHECK(v < previous);
      previous = v;
    }
  }

  TEST_CASE("tau is uniform when the marginals are constant") {
    const FieldModel cos = make_field(BoxDomain({0.0}, {0.75}), {KernelKind::Cosine});
    const MeasureContext ctx(cos, 6.0);
    const TauSampler sampler(cos, ctx);
    CHECK(sampler.acceptance_rate() == 1.0);
    Rng rng = make_stream(21, 0);
    std::vector<double> draws;
    for (int i = 0; i < 10000; ++i) draws.push_back(sample_tau(sampler, rng)[0]);
    const double d = testing::ks_distance(draws, [](double x) { return x / 0.75; });
    CHECK(testing::ks_p_value(d, draws.size()) > 0.01);
  }

  TEST_CASE("tau is pulled toward the high-mean corner") {
    const FieldModel model = linear_mean_model();
    const MeasureContext ctx(model, 8.0);
    for (TauMethod method : {TauMethod::Rejection, TauMethod::GridInversion}) {
      const TauSampler sampler(model, ctx, method);
      Rng rng = make_stream(22, 0);
      std::vector<double> x, y;
      for (int i = 0; i < 10000; ++i) {
        const auto t = sampler.sample(rng);
        x.push_back(t[0]);
        y.push_back(t[1]);
      }
      const auto mx = testing::moments(x), my = testing::moments(y);
      CHECK(mx.mean - 0.5 >= 4.0 * mx.std_error);
      CHECK(my.mean - 0.5 >= 4.0 * my.std_error);
    }
  }

  TEST_CASE("tau histogram matches h_b on a 50x50 grid") {
    const FieldModel model = linear_mean_model();
    const MeasureContext ctx(model, 4.0);
    constexpr int kCells = 50;
    std::vector<double> expected(kCells * kCells);
    for (int i = 0; i < kCells; ++i) {
      for (int j = 0; j < kCells; ++j) {
        const BoxDomain cell({i / 50.0, j / 50.0}, {(i + 1) / 50.0, (j + 1) / 50.0});
        const LogIntegral r = integrate_log(
            cell, [&](std::span<const double> t) { return log_marginal_tail(model, t, ctx.tilt()); });
        expected[i * kCells + j] = std::exp(r.log_value - ctx.log_normalizer());
      }
    }
    for (TauMethod method : {TauMethod::Rejection, TauMethod::GridInversion}) {
      const TauSampler sampler(model, ctx, method);
      Rng rng = make_stream(23, 0);
      constexpr int kDraws = 100000;
      std::vector<double> counts(kCells * kCells, 0.0);
      for (int k = 0; k < kDraws; ++k) {
        const auto t = sampler.sample(rng);
        const int i = std::min(kCells - 1, static_cast<int>(t[0] * kCells));
        const int j = std::min(kCells - 1, static_cast<int>(t[1] * kCells));
        counts[i * kCells + j] += 1.0;
      }
      double chi2 = 0.0;
      for (std::size_t c = 0; c < counts.size(); ++c) {
        const double e = expected[c] * kDraws;
        chi2 += (counts[c] - e) * (counts[c] - e) / e;
      }
      CHECK(testing::chi_squared_p_value(chi2, kCells * kCells - 1) > 0.001);
    }
  }

  TEST_CASE("envelope bounds the marginal tail everywhere") {
    const FieldModel model = linear_mean_model();
    const MeasureContext ctx(model, 8.0);
    const TauSampler sampler(model, ctx);
    Rng rng = make_stream(24, 0);
    std::uniform_real_distribution<double> u;
    for (int i = 0; i < 20000; ++i) {
      const std::vector<double> t{u(rng), u(rng)};
      CHECK_LE(log_marginal_tail(model, t, ctx.tilt()), sampler.log_envelope());
    }
    CHECK_LE(log_marginal_tail(model, std::vector<double>{1.0, 1.0}, ctx.tilt()), sampler.log_envelope());
    CHECK(sampler.acceptance_rate() > 0.2);
    CHECK(sampler.acceptance_rate() <= 1.0);
  }

  TEST_CASE("loose moduli make rejection inefficient; grid inversion still works") {
    // A constant field described through generic functions with a very loose
    // Hoelder constant: the certified envelope is close to 1.
    MarginalModulus loose;
    loose.mean_constant = 1e6;
    const FieldModel model(
        BoxDomain({0.0}, {1.0}), [](std::span<const double>) { return 0.0; },
        [](std::span<const double>) { return 1.0; }, make_correlation({}), kernel_regularity({}), loose);
    const MeasureContext ctx(model, 5.0);
    CHECK_THROWS_AS(TauSampler(model, ctx), SamplerInefficiencyError);
    const TauSampler fallback(model, ctx, TauMethod::GridInversion);
    Rng rng = make_stream(25, 0);
    std::vector<double> draws;
    for (int i = 0; i < 10000; ++i) draws.push_back(fallback.sample(rng)[0]);
    const double d = testing::ks_distance(draws, [](double x) { return x; });
    CHECK(testing::ks_p_value(d, draws.size()) > 0.01);
  }

  TEST_CASE("truncated tail sampler: KS distance and support") {
    for (double c : {-2.0, 0.0, 3.0, 8.0, 20.0}) {
      Rng rng = make_stream(26, static_cast<std::uint64_t>(c + 100));
      std::vector<double> draws;
      for (int i = 0; i < 100000; ++i) draws.push_back(sample_truncated_tail(0.0, 1.0, c, rng));
      CAPTURE(c);
      CHECK(*std::min_element(draws.begin(), draws.end()) > c);
      CHECK(testing::ks_distance(draws, [c](double x) { return truncated_cdf(x, c); }) < 0.01);
    }
  }

  TEST_CASE("truncated tail sampler: analytic means") {
    for (auto [c, mean] : {std::pair{3.0, 3.2830986549304365}, std::pair{8.0, 8.1213681122361127},
                           std::pair{20.0, 20.049753068527851}}) {
      Rng rng = make_stream(27, static_cast<std::uint64_t>(c));
      std::vector<double> draws;
      for (int i = 0; i < 100000; ++i) draws.push_back(sample_truncated_tail(0.0, 1.0, c, rng));
      const auto m = testing::moments(draws);
      CAPTURE(c);
      CHECK(std::abs(m.mean - mean) < 4.0 * m.std_error);
    }
    // Location-scale: N(1, 4) above 7 is 1 + 2 (Z | Z > 3).
    Rng rng = make_stream(27, 99);
    std::vector<double> draws;
    for (int i = 0; i < 100000; ++i) draws.push_back((sample_truncated_tail(1.0, 2.0, 7.0, rng) - 1.0) / 2.0);
    CHECK(testing::ks_distance(draws, [](double x) { return truncated_cdf(x, 3.0); }) < 0.01);
  }

  TEST_CASE("truncated tail sampler: a very low threshold is the plain normal") {
    Rng rng = make_stream(28, 0);
    std::vector<double> draws;
    for (int i = 0; i < 100000; ++i) draws.push_back(sample_truncated_tail(0.0, 1.0, -30.0, rng));
    const auto m = testing::moments(draws);
    CHECK(std::abs(m.mean) < 4.0 * m.std_error);
    CHECK(std::abs(m.variance - 1.0) < 4.0 * std::sqrt(2.0 / 1e5));
  }

  TEST_CASE("likelihood ratio weight") {
    const FieldModel flat = make_field(BoxDomain::unit_cube(2), {KernelKind::SquaredExponential});
    // b with gamma = 3 gives I_gamma = tail(3) on the unit square.
    const double b = 0.5 * (3.0 + std::sqrt(13.0));
    const MeasureContext ctx(flat, b);
    CHECK(ctx.normalizer() == doctest::Approx(0.0013498980316300945).epsilon(1e-12));
    CHECK(likelihood_ratio_weight(ctx, 2e-4) == doctest::Approx(0.0013498980316300945 / 2e-4).epsilon(1e-12));
    CHECK(likelihood_ratio_weight(ctx, ctx.normalizer()) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(likelihood_ratio_weight(ctx, 0.0), InvalidWeightError);
    CHECK_THROWS_AS(likelihood_ratio_weight(ctx, -1.0), InvalidWeightError);
  }
}
