#pragma once

#include <string>
#include <vector>

namespace bmlab::paths {

// Stationary unit-variance covariance rho(k) = E[X_0 X_k], rho(-k) = rho(k).
class CovarianceModel {
 public:
  enum class Family { Iid, Ar1, FgnIncrement, PowerTail, Custom };

  static CovarianceModel iid();
  static CovarianceModel ar1(double r);                      // rho(k) = r^|k|, |r| < 1
  static CovarianceModel fgn_increment(double H);            // 0 < H < 1
  static CovarianceModel power_tail(double alpha, long long table_cutoff = 0);  // (1+|k|)^-alpha
  static CovarianceModel custom(std::vector<double> table);  // table[k] = rho(k), k >= 0; zero beyond

  double rho(long long k) const;
  Family family() const { return family_; }
  double param() const { return param_; }
  long long table_cutoff() const { return table_cutoff_; }
  const std::vector<double>& table() const { return table_; }
  std::string name() const;

 private:
  CovarianceModel() = default;
  Family family_ = Family::Iid;
  double param_ = 0.0;
  long long table_cutoff_ = 0;  // power_tail: rho truncated to 0 beyond (0 = none)
  std::vector<double> table_;
};

// S_p(n) = sum_{|k|<=n} |rho(k)|^p.
double summability(const CovarianceModel& model, double p, long long n);

struct SummabilityDiag {
  double value = 0.0;
  bool saturated = false;  // |S_p(2n) - S_p(n)| below tolerance
};
SummabilityDiag summability_diag(const CovarianceModel& model, double p, long long n, double tol = 1e-9);

// Largest lag L <= n_cap with |rho(L)| > tol (0 when none); convolution and
// diagram sums restrict to |k| <= L, which is exact at double precision.
long long effective_lag_cutoff(const CovarianceModel& model, long long n_cap, double tol = 1e-12);

}  // namespace bmlab::paths
