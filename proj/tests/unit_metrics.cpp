#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "bmlab/bounds.hpp"
#include "bmlab/covariance.hpp"
#include "bmlab/diagrams.hpp"
#include "bmlab/errors.hpp"
#include "bmlab/hermite.hpp"
#include "bmlab/metrics.hpp"
#include "bmlab/paths.hpp"
#include "bmlab/special.hpp"

using namespace bmlab;

namespace {

std::vector<double> normal_samples(std::size_t R, double mu, double sigma,
                                   std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(mu, sigma);
  std::vector<double> out(R);
  for (auto& x : out) x = nd(gen);
  return out;
}

}  // namespace

TEST_CASE("wasserstein distance by quantile integration") {
  SUBCASE("normal quantile grid collapses toward zero") {
    std::size_t R = 100000;
    std::vector<double> xs(R);
    for (std::size_t i = 0; i < R; ++i)
      xs[i] = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(R));
    auto est = metrics::dist_wasserstein(xs);
    CHECK(est.value >= 0.0);
    CHECK(est.value <= 0.02);
  }

  SUBCASE("a pure shift is recovered") {
    auto xs = normal_samples(100000, 0.5, 1.0, 91);
    auto est = metrics::dist_wasserstein(xs);
    CHECK(est.value == doctest::Approx(0.5).epsilon(0.04));
    CHECK(est.se > 0.0);
  }

  SUBCASE("point mass at zero integrates to the absolute first moment") {
    std::vector<double> xs(1000, 0.0);
    auto est = metrics::dist_wasserstein(xs);
    CHECK(est.value == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-10));
  }

  SUBCASE("too few samples") {
    std::vector<double> xs(99, 0.0);
    CHECK_THROWS_AS(metrics::dist_wasserstein(xs), bmlab::ConfigError);
  }
}

TEST_CASE("total variation estimates") {
  SUBCASE("unit shift against the closed form") {
    auto xs = normal_samples(100000, 1.0, 1.0, 77);
    auto est = metrics::dist_tv(xs);
    double truth = 2.0 * normal_cdf(0.5) - 1.0;
    CHECK(est.kde_value == doctest::Approx(truth).epsilon(0.06));
    CHECK(est.lower_bound_value <= truth + 0.02);
    CHECK(est.lower_bound_value >= 0.36);
    CHECK(est.lower_bound_value <= est.kde_value + 3.0 * est.se);
    // sensitivity values stay in the sane range
    CHECK(est.kde_half_bw >= 0.0);
    CHECK(est.kde_half_bw <= 1.0);
    CHECK(est.kde_double_bw >= 0.0);
    CHECK(est.kde_double_bw <= 1.0);
  }

  SUBCASE("identical laws stay near zero") {
    auto xs = normal_samples(100000, 0.0, 1.0, 78);
    auto est = metrics::dist_tv(xs);
    CHECK(est.lower_bound_value <= 0.02);
    CHECK(est.lower_bound_value <= est.kde_value + 3.0 * est.se);
  }

  SUBCASE("consistency holds on a smaller shifted ensemble") {
    auto xs = normal_samples(20000, 0.25, 1.0, 79);
    auto est = metrics::dist_tv(xs);
    CHECK(est.lower_bound_value <= est.kde_value + 3.0 * est.se);
    CHECK(est.kde_value >= 0.0);
    CHECK(est.kde_value <= 1.0);
  }

  SUBCASE("too few samples") {
    std::vector<double> xs(999, 0.0);
    CHECK_THROWS_AS(metrics::dist_tv(xs), bmlab::ConfigError);
  }
}

TEST_CASE("kolmogorov distance") {
  SUBCASE("unit shift maximizer sits at one half") {
    auto xs = normal_samples(100000, 1.0, 1.0, 83);
    auto est = metrics::dist_kolmogorov(xs);
    double truth = normal_cdf(0.5) - normal_cdf(-0.5);
    CHECK(est.value == doctest::Approx(truth).epsilon(0.03));
    auto tv = metrics::dist_tv(xs);
    // half-lines are intervals, up to grid resolution and tail mass
    CHECK(est.value <= tv.lower_bound_value + 0.05);
  }

  SUBCASE("identical laws") {
    auto xs = normal_samples(10000, 0.0, 1.0, 84);
    auto est = metrics::dist_kolmogorov(xs);
    CHECK(est.value <= 0.03);
    CHECK(est.se >= 0.0);
  }
}

TEST_CASE("cumulant statistics") {
  SUBCASE("standard normal has vanishing third and fourth cumulants") {
    auto xs = normal_samples(20000, 0.0, 1.0, 87);
    auto c = metrics::cumulants(xs);
    CHECK(std::abs(c.k3) <= 4.0 * c.k3_se);
    CHECK(std::abs(c.k4) <= 4.0 * c.k4_se);
  }

  SUBCASE("squares of normals have positive excess kurtosis") {
    auto xs = normal_samples(20000, 0.0, 1.0, 88);
    for (auto& x : xs) x = x * x;
    auto c = metrics::cumulants(xs);
    CHECK(c.k4 > 0.0);
    CHECK(c.k4 > 4.0 * c.k4_se);
  }

  SUBCASE("third cumulant of the normalized quadratic statistic") {
    auto h2 = hermite::HermiteSeries::from_coeffs({0.0, 0.0, 1.0});
    auto model = paths::CovarianceModel::iid();
    auto e = paths::simulate(model, 100, 20000, 89);
    auto F = paths::statistic_F(e, h2);
    double varF = paths::variance_F_exact(h2, model, e.n);
    for (auto& f : F) f /= std::sqrt(varF);
    auto c = metrics::cumulants(F);
    double want =
        diagrams::exact_third_moment(h2, model, e.n) / std::pow(varF, 1.5);
    CHECK(std::abs(c.k3 - want) <= 4.0 * c.k3_se);
  }

  SUBCASE("too few samples") {
    std::vector<double> xs(999, 0.0);
    CHECK_THROWS_AS(metrics::cumulants(xs), bmlab::ConfigError);
  }
}

TEST_CASE("partial covariance sums") {
  auto iid = paths::CovarianceModel::iid();
  for (double p : {1.0, 4.0 / 3.0, 1.5, 2.0}) {
    CHECK(bounds::S_p(iid, 100, p) == doctest::Approx(1.0).epsilon(1e-15));
  }
  auto ar = paths::CovarianceModel::ar1(0.5);
  // 1 + 2 sum_{k=1..n} 2^{-k} -> 3
  CHECK(bounds::S_p(ar, 100, 1.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(bounds::S_p(ar, 100, 2.0) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  auto pt = paths::CovarianceModel::power_tail(0.75, 0);
  double prev = 0.0;
  for (long long n : {16, 64, 256, 1024}) {
    double cur = bounds::S_p(pt, n, 1.0);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("theorem bound terms") {
  auto iid = paths::CovarianceModel::iid();
  auto ar = paths::CovarianceModel::ar1(0.5);

  SUBCASE("independent case anchors at one tenth") {
    auto tv = bounds::bound_tv_d2(iid, 100);
    CHECK(tv.term1 == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(tv.term2 == doctest::Approx(0.1).epsilon(1e-14));
    auto tvh = bounds::bound_tv_dge3(iid, 100, 3);
    CHECK(tvh.term1 == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(tvh.term2 == doctest::Approx(0.1).epsilon(1e-14));
    auto w = bounds::bound_w_d2(iid, 100);
    CHECK(w.term1 == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(w.term2 == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(bounds::bound_tv_optimal_d2(iid, 100) ==
          doctest::Approx(0.1).epsilon(1e-14));
    CHECK(bounds::bound_npy(iid, 100) == doctest::Approx(0.1).epsilon(1e-14));
    auto ho3 = bounds::bound_hermite_optimal(iid, 100, 3);
    CHECK(ho3.term1 == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(ho3.term2 == 0.0);
    auto ho4 = bounds::bound_hermite_optimal(iid, 100, 4);
    CHECK(ho4.term2 == doctest::Approx(0.1).epsilon(1e-14));
  }

  SUBCASE("geometric sums by hand") {
    auto tv = bounds::bound_tv_d2(ar, 100);
    CHECK(tv.term1 == doctest::Approx(0.17320508).epsilon(1e-6));
    auto tvh = bounds::bound_tv_dge3(ar, 10000, 3);
    CHECK(tvh.term2 == doctest::Approx(0.02236068).epsilon(1e-6));
  }

  SUBCASE("the optimal rate term is the second wasserstein term") {
    for (long long n : {64, 256, 1024}) {
      CHECK(bounds::bound_tv_optimal_d2(ar, n) == bounds::bound_w_d2(ar, n).term2);
    }
  }

  SUBCASE("terms are positive and saturate for summable models") {
    double r1 = bounds::bound_tv_d2(ar, 1 << 10).term1 * std::sqrt(1024.0);
    double r2 = bounds::bound_tv_d2(ar, 1 << 14).term1 * std::sqrt(16384.0);
    CHECK(r1 > 0.0);
    CHECK(r2 / r1 == doctest::Approx(1.0).epsilon(1e-4));
    double h1 = bounds::bound_hermite_optimal(ar, 1 << 10, 3).term1 * 1024.0;
    double h2 = bounds::bound_hermite_optimal(ar, 1 << 14, 3).term1 * 16384.0;
    CHECK(h2 / h1 == doctest::Approx(1.0).epsilon(1e-4));
  }

  SUBCASE("power tail slope of the dominant term") {
    // at alpha = 3/4 the first term dominates and its asymptotic slope is
    // -alpha/2; finite grids sit above that and drift toward it as n grows
    auto pt = paths::CovarianceModel::power_tail(0.75, 0);
    auto slope_over = [&](int lo, int hi) {
      std::vector<std::pair<double, double>> pts;
      for (int e = lo; e <= hi; ++e) {
        long long n = 1LL << e;
        pts.push_back({static_cast<double>(n), bounds::bound_tv_d2(pt, n).term1});
      }
      return metrics::rate_fit(pts).slope;
    };
    double near = slope_over(8, 13);
    double far = slope_over(10, 15);
    CHECK(near == doctest::Approx(-0.35046931).epsilon(1e-6));
    CHECK(far == doctest::Approx(-0.35855904).epsilon(1e-6));
    CHECK(far < near);
    CHECK(bounds::rate_classifier(0.75, 2, bounds::Metric::tv).exponent ==
          doctest::Approx(-0.375));
  }
}

TEST_CASE("rate classifier tables") {
  using bounds::Metric;
  auto c = bounds::rate_classifier(0.75, 2, Metric::tv);
  CHECK(c.exponent == doctest::Approx(-0.375));
  CHECK(!c.log_factor);
  c = bounds::rate_classifier(0.55, 2, Metric::tv);
  CHECK(c.exponent == doctest::Approx(-0.1));
  c = bounds::rate_classifier(0.55, 2, Metric::w);
  CHECK(c.exponent == doctest::Approx(-0.15));
  c = bounds::rate_classifier(0.6, 2, Metric::w);
  CHECK(c.exponent == doctest::Approx(-0.3));
  c = bounds::rate_classifier(0.8, 2, Metric::w);
  CHECK(c.exponent == doctest::Approx(-0.4));
  c = bounds::rate_classifier(1.0, 2, Metric::tv);
  CHECK(c.exponent == doctest::Approx(-0.5));
  CHECK(c.log_factor);
  c = bounds::rate_classifier(1.0, 2, Metric::w);
  CHECK(c.exponent == doctest::Approx(-0.5));
  CHECK(c.log_factor);
  c = bounds::rate_classifier(2.5, 2, Metric::tv);
  CHECK(c.exponent == doctest::Approx(-0.5));
  CHECK(!c.log_factor);

  CHECK_THROWS_AS(bounds::rate_classifier(0.5, 2, Metric::tv),
                  bmlab::ConfigError);
  CHECK_THROWS_AS(bounds::rate_classifier(0.75, 3, Metric::tv),
                  bmlab::ConfigError);
}

TEST_CASE("log-log rate fitting") {
  SUBCASE("exact power law") {
    std::vector<std::pair<double, double>> pts;
    for (double n : {16.0, 64.0, 256.0, 1024.0})
      pts.push_back({n, 3.0 / std::sqrt(n)});
    auto fit = metrics::rate_fit(pts);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
    CHECK(fit.ci_95 >= 0.0);
    CHECK(fit.ci_95 <= 1e-10);
  }

  SUBCASE("mild multiplicative noise") {
    std::mt19937_64 gen(4242);
    std::normal_distribution<double> nd(0.0, 0.01);
    std::vector<std::pair<double, double>> pts;
    for (int e = 4; e <= 11; ++e) {
      double n = std::pow(2.0, e);
      pts.push_back({n, 2.0 * std::pow(n, -0.375) * std::exp(nd(gen))});
    }
    auto fit = metrics::rate_fit(pts);
    CHECK(fit.slope == doctest::Approx(-0.375).epsilon(0.05));
    CHECK(fit.ci_95 > 0.0);
  }

  SUBCASE("square-root log correction restores the clean slope") {
    std::vector<std::pair<double, double>> pts;
    for (double n : {16.0, 64.0, 256.0, 1024.0, 4096.0})
      pts.push_back({n, 3.0 * std::sqrt(std::log(n) / n)});
    auto fit = metrics::rate_fit(pts, true);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  }

  SUBCASE("validation") {
    std::vector<std::pair<double, double>> three = {
        {2.0, 1.0}, {4.0, 0.5}, {8.0, 0.25}};
    CHECK_THROWS_AS(metrics::rate_fit(three), bmlab::ConfigError);
    std::vector<std::pair<double, double>> one = {{2.0, 1.0}};
    CHECK_THROWS_AS(metrics::rate_fit(one), bmlab::ConfigError);
    std::vector<std::pair<double, double>> bad = {
        {2.0, 1.0}, {4.0, 0.5}, {8.0, 0.0}, {16.0, 0.1}};
    CHECK_THROWS_AS(metrics::rate_fit(bad), bmlab::DegeneratePoints);
  }
}
