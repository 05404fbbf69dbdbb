#pragma once

#include <cstdint>

namespace bmlab {

double normal_pdf(double x);
double normal_cdf(double x);

// Inverse standard normal CDF, p in (0,1). Rational approximation refined by a
// Halley step against erfc; relative error below 1e-14 on (1e-300, 1-1e-16).
double normal_quantile(double p);

// Unrefined rational approximation (~1e-9 absolute), used in the sampling hot
// path where that error is far below any statistical resolution.
double normal_quantile_fast(double p);

// q! as a double; exact (in double rounding) for q <= 170, throws beyond.
double factorial(int q);
double log_factorial(int q);  // lgamma(q+1), table-backed for small q

// q! * c^2 without intermediate overflow for large q.
double factorial_weighted_sq(int q, double c);

double binomial(int n, int k);       // exact for results below 2^53
double log_binomial(int n, int k);

}  // namespace bmlab
