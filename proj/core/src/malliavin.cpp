#include "bmlab/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "bmlab/errors.hpp"
#include "bmlab/parallel.hpp"

namespace bmlab::malliavin {

namespace {

constexpr long long kChunk = 32;
constexpr double kPi = 3.14159265358979323846;

// symmetric kernel values kern[t] for t in [0, L]
std::vector<double> lag_kernel(const paths::CovarianceModel& model, long long n,
                               int power) {
  long long L = paths::effective_lag_cutoff(model, n - 1);
  std::vector<double> kern(static_cast<std::size_t>(L) + 1);
  for (long long t = 0; t <= L; ++t)
    kern[static_cast<std::size_t>(t)] = std::pow(model.rho(t), power);
  return kern;
}

// out[i] = sum_{|i-j| <= L} kern(|i-j|) v[j]; exact whenever L covers every
// live lag of the model inside the window
void band_conv(const double* v, long long n, const std::vector<double>& kern,
               double* out) {
  long long L = static_cast<long long>(kern.size()) - 1;
  for (long long i = 0; i < n; ++i) {
    long long jlo = std::max<long long>(0, i - L);
    long long jhi = std::min<long long>(n - 1, i + L);
    double acc = 0.0;
    for (long long j = jlo; j <= jhi; ++j)
      acc += kern[static_cast<std::size_t>(std::llabs(i - j))] * v[j];
    out[i] = acc;
  }
}

void eval_into(const hermite::HermiteSeries& s, const double* x, long long n,
               double* out) {
  for (long long i = 0; i < n; ++i) out[i] = hermite::eval_series(s, x[i]);
}

void require_rank(const hermite::HermiteSeries& s, int need, const char* what) {
  if (s.rank < need)
    throw RankError(std::string(what) + " needs a series of rank >= " +
                    std::to_string(need) + ", got rank " +
                    std::to_string(s.rank));
}

template <typename PerReplicate>
std::vector<double> over_replicates(const paths::PathEnsemble& e, int threads,
                                    PerReplicate fn) {
  std::vector<double> out(static_cast<std::size_t>(e.R));
  parallel_for_chunks(e.R, kChunk, threads, [&](long long lo, long long hi) {
    for (long long r = lo; r < hi; ++r)
      out[static_cast<std::size_t>(r)] = fn(e.row(r));
  });
  return out;
}

TermEstimate mean_estimate(const std::vector<double>& v) {
  double R = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= R;
  double s2 = 0.0;
  for (double x : v) s2 += (x - m) * (x - m);
  s2 /= (R - 1.0);
  return {m, std::sqrt(s2 / R)};
}

// unbiased sample variance; its standard error comes from the usual central
// fourth-moment expansion of Var(s^2)
TermEstimate var_estimate(const std::vector<double>& v) {
  double R = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= R;
  double s2 = 0.0, m4 = 0.0;
  for (double x : v) {
    double d2 = (x - m) * (x - m);
    s2 += d2;
    m4 += d2 * d2;
  }
  s2 /= (R - 1.0);
  m4 /= R;
  double se2 = (m4 - s2 * s2 * (R - 3.0) / (R - 1.0)) / R;
  return {s2, std::sqrt(std::max(se2, 0.0))};
}

std::vector<double> scaled(std::vector<double> v, double factor) {
  for (double& x : v) x *= factor;
  return v;
}

std::vector<double> abs_of(std::vector<double> v) {
  for (double& x : v) x = std::abs(x);
  return v;
}

std::vector<double> squares_of(std::vector<double> v) {
  for (double& x : v) x *= x;
  return v;
}

}  // namespace

std::vector<double> inner_DF_u(const paths::PathEnsemble& e,
                               const hermite::HermiteSeries& s,
                               const paths::CovarianceModel& model,
                               bool literal_reference, int threads) {
  require_rank(s, 1, "inner_DF_u");
  long long n = e.n;
  auto gp = hermite::derivative(s, 1);
  auto g1 = hermite::shift_T(s, 1);
  if (literal_reference) {
    if (n > 512)
      throw BudgetError("literal inner_DF_u reference is quadratic in n and "
                        "capped at n <= 512; use the factored route");
    return over_replicates(e, threads, [&](const double* x) {
      double acc = 0.0;
      for (long long i = 0; i < n; ++i) {
        double ai = hermite::eval_series(gp, x[i]);
        for (long long j = 0; j < n; ++j)
          acc += ai * hermite::eval_series(g1, x[j]) * model.rho(i - j);
      }
      return acc / static_cast<double>(n);
    });
  }
  auto kern = lag_kernel(model, n, 1);
  return over_replicates(e, threads, [&](const double* x) {
    std::vector<double> a(static_cast<std::size_t>(n)),
        b(static_cast<std::size_t>(n)), B(static_cast<std::size_t>(n));
    eval_into(gp, x, n, a.data());
    eval_into(g1, x, n, b.data());
    band_conv(b.data(), n, kern, B.data());
    double acc = 0.0;
    for (long long i = 0; i < n; ++i) acc += a[static_cast<std::size_t>(i)] *
                                              B[static_cast<std::size_t>(i)];
    return acc / static_cast<double>(n);
  });
}

std::vector<double> inner_D2F_v(const paths::PathEnsemble& e,
                                const hermite::HermiteSeries& s,
                                const paths::CovarianceModel& model,
                                int threads) {
  require_rank(s, 2, "inner_D2F_v");
  long long n = e.n;
  auto gpp = hermite::derivative(s, 2);
  auto g2 = hermite::shift_T(s, 2);
  auto kern2 = lag_kernel(model, n, 2);
  return over_replicates(e, threads, [&](const double* x) {
    std::vector<double> c(static_cast<std::size_t>(n)),
        w(static_cast<std::size_t>(n)), W(static_cast<std::size_t>(n));
    eval_into(gpp, x, n, c.data());
    eval_into(g2, x, n, w.data());
    band_conv(w.data(), n, kern2, W.data());
    double acc = 0.0;
    for (long long i = 0; i < n; ++i) acc += c[static_cast<std::size_t>(i)] *
                                              W[static_cast<std::size_t>(i)];
    return acc / static_cast<double>(n);
  });
}

std::vector<double> inner_DFxDF_v(const paths::PathEnsemble& e,
                                  const hermite::HermiteSeries& s,
                                  const paths::CovarianceModel& model,
                                  int threads) {
  require_rank(s, 2, "inner_DFxDF_v");
  long long n = e.n;
  auto gp = hermite::derivative(s, 1);
  auto g2 = hermite::shift_T(s, 2);
  auto kern = lag_kernel(model, n, 1);
  return over_replicates(e, threads, [&](const double* x) {
    std::vector<double> a(static_cast<std::size_t>(n)),
        w(static_cast<std::size_t>(n)), A(static_cast<std::size_t>(n));
    eval_into(gp, x, n, a.data());
    eval_into(g2, x, n, w.data());
    band_conv(a.data(), n, kern, A.data());
    double acc = 0.0;
    for (long long k = 0; k < n; ++k) {
      double Ak = A[static_cast<std::size_t>(k)];
      acc += w[static_cast<std::size_t>(k)] * Ak * Ak;
    }
    return acc / std::pow(static_cast<double>(n), 1.5);
  });
}

std::vector<double> iterated_D(const paths::PathEnsemble& e,
                               const hermite::HermiteSeries& s,
                               const paths::CovarianceModel& model, int order,
                               int threads) {
  if (order != 2 && order != 3)
    throw ConfigError("iterated_D supports orders 2 and 3, got " +
                      std::to_string(order));
  require_rank(s, 2, "iterated_D");
  long long n = e.n;
  if (order == 2 && n > 1024)
    throw BudgetError("iterated_D order 2 is capped at n <= 1024; lower n");
  if (order == 3 && n > 256)
    throw BudgetError("iterated_D order 3 is capped at n <= 256; lower n");

  auto gp = hermite::derivative(s, 1);
  auto gpp = hermite::derivative(s, 2);
  auto g1 = hermite::shift_T(s, 1);
  auto g1p = hermite::derivative(g1, 1);
  auto kern = lag_kernel(model, n, 1);

  if (order == 2) {
    // n^{-3/2} [ sum_i g''(X_i) B_i^2 + sum_j g'*conv(X)_j g_1'(X_j) B_j ]
    return over_replicates(e, threads, [&](const double* x) {
      std::vector<double> a(static_cast<std::size_t>(n)),
          b(static_cast<std::size_t>(n)), c(static_cast<std::size_t>(n)),
          d(static_cast<std::size_t>(n)), A(static_cast<std::size_t>(n)),
          B(static_cast<std::size_t>(n));
      eval_into(gp, x, n, a.data());
      eval_into(g1, x, n, b.data());
      eval_into(gpp, x, n, c.data());
      eval_into(g1p, x, n, d.data());
      band_conv(a.data(), n, kern, A.data());
      band_conv(b.data(), n, kern, B.data());
      double acc = 0.0;
      for (long long i = 0; i < n; ++i) {
        std::size_t u = static_cast<std::size_t>(i);
        acc += c[u] * B[u] * B[u] + d[u] * A[u] * B[u];
      }
      return acc / std::pow(static_cast<double>(n), 1.5);
    });
  }

  auto gppp = hermite::derivative(s, 3);
  auto g1pp = hermite::derivative(g1, 2);
  // n^{-2} [ sum e_i B_i^3 + 3 sum c_i B_i conv(dB)_i
  //          + sum f_j A_j B_j^2 + sum A_j d_j conv(dB)_j ]
  // where dB_j = g_1'(X_j) B_j; the chain term reuses conv(dB)
  return over_replicates(e, threads, [&](const double* x) {
    std::vector<double> a(static_cast<std::size_t>(n)),
        b(static_cast<std::size_t>(n)), c(static_cast<std::size_t>(n)),
        d(static_cast<std::size_t>(n)), ev(static_cast<std::size_t>(n)),
        f(static_cast<std::size_t>(n)), A(static_cast<std::size_t>(n)),
        B(static_cast<std::size_t>(n)), dB(static_cast<std::size_t>(n)),
        CdB(static_cast<std::size_t>(n));
    eval_into(gp, x, n, a.data());
    eval_into(g1, x, n, b.data());
    eval_into(gpp, x, n, c.data());
    eval_into(g1p, x, n, d.data());
    eval_into(gppp, x, n, ev.data());
    eval_into(g1pp, x, n, f.data());
    band_conv(a.data(), n, kern, A.data());
    band_conv(b.data(), n, kern, B.data());
    for (long long j = 0; j < n; ++j) {
      std::size_t u = static_cast<std::size_t>(j);
      dB[u] = d[u] * B[u];
    }
    band_conv(dB.data(), n, kern, CdB.data());
    double acc = 0.0;
    for (long long i = 0; i < n; ++i) {
      std::size_t u = static_cast<std::size_t>(i);
      acc += ev[u] * B[u] * B[u] * B[u];
      acc += 3.0 * c[u] * B[u] * CdB[u];
      acc += f[u] * A[u] * B[u] * B[u];
      acc += A[u] * d[u] * CdB[u];
    }
    return acc / (static_cast<double>(n) * static_cast<double>(n));
  });
}

nlohmann::ordered_json BoundEstimate::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json t(nlohmann::ordered_json::value_t::object);
  for (const auto& [name, est] : terms) {
    nlohmann::ordered_json one;
    one["value"] = est.value;
    one["se"] = est.se;
    t[name] = one;
  }
  j["terms"] = std::move(t);
  j["total"] = total;
  j["total_se"] = total_se;
  j["n"] = n;
  j["R"] = R;
  j["seed"] = seed;
  j["functional_budget"] = functional_budget;
  return j;
}

BoundEstimate stein_bound_estimates(const paths::PathEnsemble& e,
                                    const hermite::HermiteSeries& s,
                                    const paths::CovarianceModel& model,
                                    Prop which, int threads) {
  if (e.R < 2)
    throw ConfigError("bound estimation needs at least 2 replicates, got " +
                      std::to_string(e.R));
  double varF = paths::variance_F_exact(s, model, e.n);
  if (!(varF > 0.0) || !std::isfinite(varF))
    throw NormalizationError("exact variance of F is not positive; cannot "
                             "normalize the functionals");
  BoundEstimate be;
  be.n = e.n;
  be.R = e.R;
  be.seed = e.seed;

  switch (which) {
    case Prop::tv: {
      auto dfu = scaled(inner_DF_u(e, s, model, false, threads), 1.0 / varF);
      auto v = var_estimate(dfu);
      be.terms["var_DFu"] = v;
      be.total = 2.0 * std::sqrt(std::max(v.value, 0.0));
      be.total_se = v.value > 0.0 ? v.se / std::sqrt(v.value) : 0.0;
      be.functional_budget = e.R;
      break;
    }
    case Prop::w: {
      auto d2f = scaled(inner_D2F_v(e, s, model, threads), 1.0 / varF);
      auto dfx = abs_of(scaled(inner_DFxDF_v(e, s, model, threads),
                               1.0 / std::pow(varF, 1.5)));
      auto v = var_estimate(d2f);
      auto m = mean_estimate(dfx);
      be.terms["var_D2Fv"] = v;
      be.terms["E_absDFxDF"] = m;
      be.total = std::sqrt(2.0 / kPi) * std::sqrt(std::max(v.value, 0.0)) +
                 2.0 * m.value;
      double se_sqrt = v.value > 0.0
                           ? std::sqrt(2.0 / kPi) * v.se / (2.0 * std::sqrt(v.value))
                           : 0.0;
      be.total_se = std::hypot(se_sqrt, 2.0 * m.se);
      be.functional_budget = 2 * e.R;
      break;
    }
    case Prop::tv_iterated: {
      auto dfu = scaled(inner_DF_u(e, s, model, false, threads), 1.0 / varF);
      auto F = paths::statistic_F(e, s, threads);
      std::vector<double> y3(F.size());
      double y_scale = std::pow(varF, 1.5);
      for (std::size_t i = 0; i < F.size(); ++i)
        y3[i] = F[i] * F[i] * F[i] / y_scale;
      auto d2u = scaled(iterated_D(e, s, model, 2, threads),
                        1.0 / std::pow(varF, 1.5));
      auto d3u = scaled(iterated_D(e, s, model, 3, threads),
                        1.0 / (varF * varF));

      auto v = var_estimate(dfu);
      auto m3 = mean_estimate(y3);
      auto ed2 = mean_estimate(squares_of(d2u));
      auto edu = mean_estimate(squares_of(dfu));
      auto ed3 = mean_estimate(abs_of(d3u));
      be.terms["var_DFu"] = v;
      be.terms["abs_EF3"] = {std::abs(m3.value), m3.se};
      be.terms["term_ED2u2"] = ed2;
      be.terms["term_EDu2"] = edu;
      be.terms["E_absD3u"] = ed3;
      double c1 = 8.0 + std::sqrt(32.0 * kPi);
      double c2 = std::sqrt(2.0 * kPi);
      double c3 = std::sqrt(32.0 * kPi);
      double c4 = 4.0 * kPi;
      be.total = c1 * v.value + c2 * std::abs(m3.value) + c3 * ed2.value +
                 c4 * ed3.value;
      be.total_se =
          std::sqrt(c1 * c1 * v.se * v.se + c2 * c2 * m3.se * m3.se +
                    c3 * c3 * ed2.se * ed2.se + c4 * c4 * ed3.se * ed3.se);
      be.functional_budget = 4 * e.R;
      break;
    }
  }
  return be;
}

}  // namespace bmlab::malliavin
