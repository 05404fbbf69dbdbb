#include "bmlab/bounds.hpp"

#include <cmath>
#include <string>

#include "bmlab/errors.hpp"

namespace bmlab::bounds {

double S_p(const paths::CovarianceModel& model, long long n, double p) {
  if (n < 0) throw ConfigError("S_p needs n >= 0, got " + std::to_string(n));
  if (!(p > 0.0)) throw ConfigError("S_p needs a positive exponent");
  double acc = 1.0;
  for (long long k = 1; k <= n; ++k) {
    double r = std::abs(model.rho(k));
    if (r > 0.0) acc += 2.0 * std::pow(r, p);
  }
  return acc;
}

TwoTerms bound_tv_d2(const paths::CovarianceModel& model, long long n) {
  double rn = 1.0 / std::sqrt(static_cast<double>(n));
  return {rn * std::sqrt(S_p(model, n, 1.0)),
          rn * std::pow(S_p(model, n, 4.0 / 3.0), 1.5)};
}

TwoTerms bound_tv_dge3(const paths::CovarianceModel& model, long long n, int d) {
  if (d < 3)
    throw ConfigError("bound_tv_dge3 covers ranks d >= 3, got " +
                      std::to_string(d));
  double rn = 1.0 / std::sqrt(static_cast<double>(n));
  double s2 = std::sqrt(S_p(model, n, 2.0));
  return {rn * S_p(model, n, static_cast<double>(d - 1)) * s2,
          rn * s2 * std::sqrt(S_p(model, n, 1.0))};
}

TwoTerms bound_w_d2(const paths::CovarianceModel& model, long long n) {
  double rn = 1.0 / std::sqrt(static_cast<double>(n));
  double s32 = S_p(model, n, 1.5);
  return {rn * std::sqrt(S_p(model, n, 1.0)), rn * s32 * s32};
}

double bound_tv_optimal_d2(const paths::CovarianceModel& model, long long n) {
  double s32 = S_p(model, n, 1.5);
  return s32 * s32 / std::sqrt(static_cast<double>(n));
}

TwoTerms bound_hermite_optimal(const paths::CovarianceModel& model, long long n,
                               int d) {
  if (d < 2)
    throw ConfigError("bound_hermite_optimal needs rank d >= 2, got " +
                      std::to_string(d));
  double nd = static_cast<double>(n);
  double sd1 = S_p(model, n, static_cast<double>(d - 1));
  TwoTerms out;
  out.term1 = sd1 * sd1 * S_p(model, n, 2.0) / nd;
  if (d % 2 == 0) {
    double s = S_p(model, n, 3.0 * d / 4.0);
    out.term2 = s * s / std::sqrt(nd);
  }
  return out;
}

double bound_npy(const paths::CovarianceModel& model, long long n) {
  return std::pow(S_p(model, n, 1.0), 1.5) / std::sqrt(static_cast<double>(n));
}

RateClass rate_classifier(double alpha, int d, Metric metric) {
  if (d != 2)
    throw ConfigError("rate tables are published for rank 2 only; got d = " +
                      std::to_string(d));
  if (!(alpha > 0.5))
    throw ConfigError("rate tables cover alpha > 1/2; got alpha = " +
                      std::to_string(alpha));
  // alpha = 1 has its own (log n)^{1/2} row in both tables; it wins over the
  // endpoint of the neighboring interval
  if (alpha == 1.0) return {-0.5, true};
  if (alpha > 1.0) return {-0.5, false};
  if (metric == Metric::tv) {
    if (alpha < 2.0 / 3.0) return {1.0 - 2.0 * alpha, false};
    return {-alpha / 2.0, false};
  }
  if (alpha <= 0.6) return {1.5 - 3.0 * alpha, false};
  return {-alpha / 2.0, false};
}

}  // namespace bmlab::bounds
