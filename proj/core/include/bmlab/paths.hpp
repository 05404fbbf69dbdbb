#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bmlab/covariance.hpp"
#include "bmlab/hermite.hpp"

namespace bmlab::paths {

struct PathEnsemble {
  long long n = 0;
  long long R = 0;
  std::vector<double> data;  // row-major, R rows of length n
  CovarianceModel model = CovarianceModel::iid();
  std::uint64_t seed = 0;
  bool used_dense_fallback = false;
  bool clamped_spectrum = false;  // negative embedding/covariance eigenvalues set to 0
  int embedding_doublings = 0;    // extra doublings beyond the base power of two

  double* row(long long r) { return data.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(n); }
  const double* row(long long r) const {
    return data.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(n);
  }
};

struct SimulateOptions {
  int threads = 1;
  double neg_tol_factor = 1e-9;      // negatives above -tol*max(lambda) are roundoff
  int max_extra_doublings = 2;
  long long dense_fallback_max_n = 4096;
  // materialized ensembles are capped; stream replicates instead for big runs
  long long max_materialized_doubles = 1LL << 27;
};

struct SimMeta {
  bool used_dense_fallback = false;
  bool clamped_spectrum = false;
  int embedding_doublings = 0;
  long long embedding_size = 0;
};

// Exact-in-distribution stationary gaussian rows via circulant embedding
// (FFT), falling back to a dense symmetric factorization for stubborn models
// at n <= dense_fallback_max_n. Replicate r depends only on (seed, r), so the
// output is identical for any thread count.
PathEnsemble simulate(const CovarianceModel& model, long long n, long long R, std::uint64_t seed,
                      const SimulateOptions& opt = {});

// Streaming variant: sink(rep, x) is called once per replicate with a pointer
// to that replicate's n values (buffer reused per worker). sink must only
// write to per-replicate slots.
void simulate_stream(const CovarianceModel& model, long long n, long long R, std::uint64_t seed,
                     const std::function<void(long long rep, const double* x)>& sink,
                     const SimulateOptions& opt = {}, SimMeta* meta = nullptr);

// F_n = n^{-1/2} sum_i g(X_i) per replicate.
std::vector<double> statistic_F(const PathEnsemble& paths, const hermite::HermiteSeries& s, int threads = 1);

// Var(F_n) = sum_q q! c_q^2 sum_{|k|<n} (1 - |k|/n) rho(k)^q, exact double sum.
double variance_F_exact(const hermite::HermiteSeries& s, const CovarianceModel& model, long long n);

// Y_n = F_n / sqrt(varF); throws NormalizationError when varF <= 0.
std::vector<double> normalize_Y(std::vector<double> F, double varF);

}  // namespace bmlab::paths
