#include "bmlab/special.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "bmlab/errors.hpp"

namespace bmlab {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

// Acklam's rational approximation to the normal quantile.
double acklam(double p) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

std::array<double, 171> make_factorials() {
  std::array<double, 171> f{};
  f[0] = 1.0;
  for (int q = 1; q <= 170; ++q) f[q] = f[q - 1] * static_cast<double>(q);
  return f;
}

const std::array<double, 171>& factorial_table() {
  static const std::array<double, 171> t = make_factorials();
  return t;
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_quantile_fast(double p) {
  if (!(p > 0.0 && p < 1.0)) throw NumericalError("normal_quantile: p outside (0,1)");
  return acklam(p);
}

double normal_quantile(double p) {
  double x = normal_quantile_fast(p);
  // One Halley step; pdf(x) > 0 everywhere so the division is safe.
  double e = normal_cdf(x) - p;
  double u = e / normal_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double factorial(int q) {
  if (q < 0) throw NumericalError("factorial of negative integer");
  if (q > 170) throw NumericalError("factorial overflows double beyond 170!");
  return factorial_table()[static_cast<std::size_t>(q)];
}

double log_factorial(int q) {
  if (q < 0) throw NumericalError("log_factorial of negative integer");
  if (q <= 170) return std::log(factorial_table()[static_cast<std::size_t>(q)]);
  return std::lgamma(static_cast<double>(q) + 1.0);
}

double factorial_weighted_sq(int q, double c) {
  if (c == 0.0) return 0.0;
  if (q <= 150) return factorial(q) * c * c;
  double lg = log_factorial(q) + 2.0 * std::log(std::fabs(c));
  if (lg > 708.0) throw NumericalError("factorial_weighted_sq overflow");
  return std::exp(lg);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace bmlab
