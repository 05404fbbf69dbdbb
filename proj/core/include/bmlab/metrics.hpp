#pragma once

#include <utility>
#include <vector>

namespace bmlab::metrics {

struct DistEstimate {
  double value = 0.0;
  double se = 0.0;
};

// Exact 1-Wasserstein distance between the empirical measure of the samples
// and N(0,1), by closed-form integration of |x_(i) - Phi^{-1}(u)| over each
// quantile cell.  Needs at least 100 samples.  The standard error comes from
// recomputing the statistic on 10 fixed contiguous batches.
DistEstimate dist_wasserstein(const std::vector<double>& samples);

// Two total-variation readings against N(0,1), never a single number: an
// interval-class maximum over all pairs from 201 equispaced points in [-5,5]
// (a certified lower bound on the true distance), plus a kernel plug-in
// (1/2) int |fhat - phi| with Gaussian kernel at the Silverman bandwidth.
// kde_half_bw / kde_double_bw re-read the plug-in at half and twice the
// bandwidth as a sensitivity report.  se batches the plug-in value.  Needs at
// least 1000 samples.
struct TvEstimate {
  double lower_bound_value = 0.0;
  double kde_value = 0.0;
  double se = 0.0;
  double kde_half_bw = 0.0;
  double kde_double_bw = 0.0;
};
TvEstimate dist_tv(const std::vector<double>& samples);

// sup-CDF discrepancy against Phi over the sorted samples
DistEstimate dist_kolmogorov(const std::vector<double>& samples);

// Unbiased k-statistics for the third and fourth cumulants, standard errors
// by the same 10-batch scheme.  Needs at least 1000 samples.
struct CumulantEstimate {
  double k3 = 0.0;
  double k3_se = 0.0;
  double k4 = 0.0;
  double k4_se = 0.0;
};
CumulantEstimate cumulants(const std::vector<double>& samples);

// Least squares of log value on log n; with log_correction the response is
// log value - (1/2) log log n, which removes an (log n)^{1/2} factor.  ci_95
// is the normal-approximation half-width for the slope from the residual
// variance.  Needs >= 4 points with distinct n; nonpositive values raise
// DegeneratePoints.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_95 = 0.0;
};
RateFit rate_fit(const std::vector<std::pair<double, double>>& points,
                 bool log_correction = false);

}  // namespace bmlab::metrics
