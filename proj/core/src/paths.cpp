#include "bmlab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <mutex>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <fftw3.h>

#include "bmlab/errors.hpp"
#include "bmlab/parallel.hpp"
#include "bmlab/rng.hpp"
#include "bmlab/special.hpp"

namespace bmlab::paths {

namespace {

constexpr const char* kStreamName = "paths";
constexpr std::size_t kChunk = 32;  // replicates per work unit, fixed for thread-count stability

// plan creation/destruction is the only non-thread-safe part of FFTW
std::mutex& fftw_mutex() {
  static std::mutex mu;
  return mu;
}

struct FftwRealFree {
  void operator()(double* p) const { fftw_free(p); }
};
struct FftwComplexFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double[], FftwRealFree>;
using ComplexBuf = std::unique_ptr<fftw_complex[], FftwComplexFree>;

RealBuf alloc_real(long long count) {
  double* p = fftw_alloc_real(static_cast<std::size_t>(count));
  if (!p) throw BudgetError("fft buffer allocation failed");
  return RealBuf(p);
}

ComplexBuf alloc_complex(long long count) {
  fftw_complex* p = fftw_alloc_complex(static_cast<std::size_t>(count));
  if (!p) throw BudgetError("fft buffer allocation failed");
  return ComplexBuf(p);
}

struct PlanFree {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanFree>;

long long base_embedding_size(long long n) {
  const long long target = std::max(2LL, 2 * (n - 1));
  long long m = 2;
  while (m < target) m *= 2;
  return m;
}

// lambda_k of the circulant extension c_j = rho(min(j, m-j)); returns false
// when a genuinely negative eigenvalue rules this embedding size out
bool embedding_spectrum(const CovarianceModel& model, long long m, double neg_tol_factor,
                        std::vector<double>& sqrt_lambda, bool& clamped) {
  auto c = alloc_real(m);
  auto spec = alloc_complex(m / 2 + 1);
  Plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(m), c.get(), spec.get(), FFTW_ESTIMATE));
  }
  if (!plan) throw NumericalError("fft planning failed");
  for (long long j = 0; j < m; ++j) c[static_cast<std::size_t>(j)] = model.rho(std::min(j, m - j));
  fftw_execute(plan.get());

  const long long half = m / 2;
  double lmax = 0.0;
  for (long long k = 0; k <= half; ++k) lmax = std::max(lmax, spec[static_cast<std::size_t>(k)][0]);
  const double floor_ok = -neg_tol_factor * std::max(lmax, std::numeric_limits<double>::min());

  sqrt_lambda.assign(static_cast<std::size_t>(half) + 1, 0.0);
  clamped = false;
  for (long long k = 0; k <= half; ++k) {
    const double lam = spec[static_cast<std::size_t>(k)][0];
    if (lam < floor_ok) return false;
    if (lam < 0.0) clamped = true;
    sqrt_lambda[static_cast<std::size_t>(k)] = std::sqrt(std::max(lam, 0.0));
  }
  return true;
}

void run_iid(long long n, long long R, std::uint64_t seed,
             const std::function<void(long long, const double*)>& sink, int threads) {
  parallel_for_chunks(static_cast<std::size_t>(R), kChunk, threads, [&](std::size_t b, std::size_t e) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::size_t rep = b; rep < e; ++rep) {
      CounterRng rng = CounterRng::substream(seed, kStreamName, rep);
      for (auto& v : x) v = rng.next_gaussian();
      sink(static_cast<long long>(rep), x.data());
    }
  });
}

void run_circulant(long long n, long long R, std::uint64_t seed, long long m,
                   const std::vector<double>& sqrt_lambda,
                   const std::function<void(long long, const double*)>& sink, int threads) {
  auto proto_in = alloc_complex(m / 2 + 1);
  auto proto_out = alloc_real(m);
  Plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan.reset(fftw_plan_dft_c2r_1d(static_cast<int>(m), proto_in.get(), proto_out.get(), FFTW_ESTIMATE));
  }
  if (!plan) throw NumericalError("fft planning failed");

  const long long half = m / 2;
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  const double inv_sqrt_2 = 1.0 / std::sqrt(2.0);

  parallel_for_chunks(static_cast<std::size_t>(R), kChunk, threads, [&](std::size_t b, std::size_t e) {
    auto w = alloc_complex(half + 1);
    auto y = alloc_real(m);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::size_t rep = b; rep < e; ++rep) {
      CounterRng rng = CounterRng::substream(seed, kStreamName, rep);
      w[0][0] = sqrt_lambda[0] * rng.next_gaussian();
      w[0][1] = 0.0;
      w[static_cast<std::size_t>(half)][0] = sqrt_lambda[static_cast<std::size_t>(half)] * rng.next_gaussian();
      w[static_cast<std::size_t>(half)][1] = 0.0;
      for (long long k = 1; k < half; ++k) {
        const double s = sqrt_lambda[static_cast<std::size_t>(k)] * inv_sqrt_2;
        w[static_cast<std::size_t>(k)][0] = s * rng.next_gaussian();
        w[static_cast<std::size_t>(k)][1] = s * rng.next_gaussian();
      }
      fftw_execute_dft_c2r(plan.get(), w.get(), y.get());
      for (long long i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] * inv_sqrt_m;
      sink(static_cast<long long>(rep), x.data());
    }
  });
}

void run_dense(const CovarianceModel& model, long long n, long long R, std::uint64_t seed,
               const std::function<void(long long, const double*)>& sink, int threads, bool& clamped) {
  Eigen::MatrixXd sigma(n, n);
  for (long long i = 0; i < n; ++i)
    for (long long j = 0; j < n; ++j) sigma(i, j) = model.rho(i - j);

  Eigen::MatrixXd L;
  clamped = false;
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    if (es.info() != Eigen::Success) throw NumericalError("dense covariance factorization failed");
    clamped = es.eigenvalues().minCoeff() < 0.0;
    L = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  parallel_for_chunks(static_cast<std::size_t>(R), kChunk, threads, [&](std::size_t b, std::size_t e) {
    Eigen::VectorXd xi(n), x(n);
    for (std::size_t rep = b; rep < e; ++rep) {
      CounterRng rng = CounterRng::substream(seed, kStreamName, rep);
      for (long long i = 0; i < n; ++i) xi(i) = rng.next_gaussian();
      x.noalias() = L * xi;
      sink(static_cast<long long>(rep), x.data());
    }
  });
}

}  // namespace

void simulate_stream(const CovarianceModel& model, long long n, long long R, std::uint64_t seed,
                     const std::function<void(long long, const double*)>& sink,
                     const SimulateOptions& opt, SimMeta* meta_out) {
  if (n < 1) throw ConfigError("path length must be >= 1");
  if (R < 0) throw ConfigError("replicate count must be >= 0");
  const int threads = std::max(1, opt.threads);

  SimMeta meta;
  if (model.family() == CovarianceModel::Family::Iid || n == 1) {
    meta.embedding_size = n;
    run_iid(n, R, seed, sink, threads);
  } else {
    std::vector<double> sqrt_lambda;
    bool clamped = false;
    bool embedded = false;
    const long long m0 = base_embedding_size(n);
    long long m = m0;
    for (int d = 0; d <= opt.max_extra_doublings; ++d, m *= 2) {
      if (embedding_spectrum(model, m, opt.neg_tol_factor, sqrt_lambda, clamped)) {
        embedded = true;
        meta.embedding_doublings = d;
        meta.embedding_size = m;
        meta.clamped_spectrum = clamped;
        break;
      }
    }
    if (embedded) {
      run_circulant(n, R, seed, meta.embedding_size, sqrt_lambda, sink, threads);
    } else if (n <= opt.dense_fallback_max_n) {
      meta.used_dense_fallback = true;
      meta.embedding_doublings = opt.max_extra_doublings;
      meta.embedding_size = n;
      bool dense_clamped = false;
      run_dense(model, n, R, seed, sink, threads, dense_clamped);
      meta.clamped_spectrum = dense_clamped;
    } else {
      throw NumericalError("circulant embedding failed and n is beyond the dense fallback cap");
    }
  }
  if (meta_out) *meta_out = meta;
}

PathEnsemble simulate(const CovarianceModel& model, long long n, long long R, std::uint64_t seed,
                      const SimulateOptions& opt) {
  if (n < 1) throw ConfigError("path length must be >= 1");
  if (R < 0) throw ConfigError("replicate count must be >= 0");
  if (n * R > opt.max_materialized_doubles)
    throw BudgetError("ensemble exceeds the materialization cap; use simulate_stream");

  PathEnsemble e;
  e.n = n;
  e.R = R;
  e.model = model;
  e.seed = seed;
  e.data.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(R));

  SimMeta meta;
  simulate_stream(
      model, n, R, seed,
      [&](long long rep, const double* x) {
        std::memcpy(e.row(rep), x, static_cast<std::size_t>(n) * sizeof(double));
      },
      opt, &meta);
  e.used_dense_fallback = meta.used_dense_fallback;
  e.clamped_spectrum = meta.clamped_spectrum;
  e.embedding_doublings = meta.embedding_doublings;
  return e;
}

std::vector<double> statistic_F(const PathEnsemble& paths, const hermite::HermiteSeries& s, int threads) {
  if (paths.n < 1) throw ConfigError("ensemble has no samples");
  if (paths.data.size() != static_cast<std::size_t>(paths.n) * static_cast<std::size_t>(paths.R))
    throw ConfigError("ensemble data size does not match n * R");
  std::vector<double> F(static_cast<std::size_t>(paths.R));
  const double inv = 1.0 / std::sqrt(static_cast<double>(paths.n));
  parallel_for_chunks(static_cast<std::size_t>(paths.R), kChunk, std::max(1, threads),
                      [&](std::size_t b, std::size_t e) {
                        for (std::size_t rep = b; rep < e; ++rep) {
                          const double* x = paths.row(static_cast<long long>(rep));
                          double acc = 0.0;
                          for (long long i = 0; i < paths.n; ++i) acc += hermite::eval_series(s, x[i]);
                          F[rep] = inv * acc;
                        }
                      });
  return F;
}

double variance_F_exact(const hermite::HermiteSeries& s, const CovarianceModel& model, long long n) {
  if (n < 1) throw ConfigError("variance needs n >= 1");
  if (s.qmax() < 1) return 0.0;

  // truncating at the effective lag loses at most ~|rho| <= 1e-12 per shell
  const long long L = std::min(n - 1, effective_lag_cutoff(model, n - 1));
  std::vector<double> sum_q(static_cast<std::size_t>(s.qmax()) + 1, 1.0);  // k = 0 shell
  for (long long k = 1; k <= L; ++k) {
    const double r = model.rho(k);
    if (r == 0.0) continue;
    const double w = 2.0 * (1.0 - static_cast<double>(k) / static_cast<double>(n));
    double rp = 1.0;
    for (int q = 1; q <= s.qmax(); ++q) {
      rp *= r;
      sum_q[static_cast<std::size_t>(q)] += w * rp;
    }
  }
  double value = 0.0;
  for (int q = 1; q <= s.qmax(); ++q)
    value += factorial_weighted_sq(q, s.c(q)) * sum_q[static_cast<std::size_t>(q)];
  return value;
}

std::vector<double> normalize_Y(std::vector<double> F, double varF) {
  if (!(varF > 0.0)) throw NormalizationError("variance must be positive to normalize");
  const double inv = 1.0 / std::sqrt(varF);
  for (double& v : F) v *= inv;
  return F;
}

}  // namespace bmlab::paths
