#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bmlab/covariance.hpp"

namespace bmlab::bounds {

// S_p(n) = sum_{|k| <= n} |rho(k)|^p, the partial sum every rate bound is
// built from.  Nondecreasing in n; equals 1 for independent points.
double S_p(const paths::CovarianceModel& model, long long n, double p);

struct TwoTerms {
  double term1 = 0.0;
  double term2 = 0.0;
};

// Unit-constant evaluations of the theorem right-hand sides.  The unknown
// absolute constants are set to 1: level comparisons are meaningless, slope
// comparisons are not.
//
//   tv_d2:            n^{-1/2} S_1^{1/2}          + n^{-1/2} S_{4/3}^{3/2}
//   tv_dge3 (d >= 3): n^{-1/2} S_{d-1} S_2^{1/2}  + n^{-1/2} S_2^{1/2} S_1^{1/2}
//   w_d2:             n^{-1/2} S_1^{1/2}          + n^{-1/2} S_{3/2}^2
//   tv_optimal_d2:    n^{-1/2} S_{3/2}^2
//   hermite_optimal:  n^{-1}  S_{d-1}^2 S_2       + n^{-1/2} S_{3d/4}^2 [d even]
//   npy:              n^{-1/2} S_1^{3/2}
TwoTerms bound_tv_d2(const paths::CovarianceModel& model, long long n);
TwoTerms bound_tv_dge3(const paths::CovarianceModel& model, long long n, int d);
TwoTerms bound_w_d2(const paths::CovarianceModel& model, long long n);
double bound_tv_optimal_d2(const paths::CovarianceModel& model, long long n);
TwoTerms bound_hermite_optimal(const paths::CovarianceModel& model, long long n,
                               int d);
double bound_npy(const paths::CovarianceModel& model, long long n);

enum class Metric { tv, w };

// Rate exponent tables for |rho(k)| ~ |k|^{-alpha}, alpha > 1/2, rank 2.
// The published tables stop at d = 2; other ranks are refused rather than
// extrapolated.  log_factor flags the (log n)^{1/2} boundary case alpha = 1.
struct RateClass {
  double exponent = 0.0;
  bool log_factor = false;
};
RateClass rate_classifier(double alpha, int d, Metric metric);

// One experiment's numeric surface: a named-column table with one row per n,
// the fitted slopes, and the configuration echo.  Writers elsewhere turn this
// into CSV/JSON/SVG; invariants (distances in range, S_p monotone) are the
// producer's responsibility.
struct BoundFit {
  std::string column;
  double slope = 0.0;
  double intercept = 0.0;
  double ci_95 = 0.0;
};

struct BoundReport {
  std::vector<std::string> columns;        // first column is "n"
  std::vector<std::vector<double>> rows;   // aligned with columns
  std::vector<BoundFit> fits;
  nlohmann::ordered_json config_echo;
};

}  // namespace bmlab::bounds
