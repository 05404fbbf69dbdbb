#include "bmlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bmlab/errors.hpp"
#include "bmlab/special.hpp"

namespace bmlab::metrics {

namespace {

constexpr int kBatches = 10;

// sd of a statistic recomputed on 10 fixed contiguous slices, scaled to the
// batch-mean scale; the partition depends only on the sample count
template <typename Fn>
double batched_se(const std::vector<double>& samples, Fn stat) {
  std::size_t R = samples.size();
  double vals[kBatches];
  for (int b = 0; b < kBatches; ++b) {
    std::size_t lo = R * static_cast<std::size_t>(b) / kBatches;
    std::size_t hi = R * static_cast<std::size_t>(b + 1) / kBatches;
    std::vector<double> slice(samples.begin() + static_cast<std::ptrdiff_t>(lo),
                              samples.begin() + static_cast<std::ptrdiff_t>(hi));
    vals[b] = stat(slice);
  }
  double m = 0.0;
  for (double v : vals) m += v;
  m /= kBatches;
  double s2 = 0.0;
  for (double v : vals) s2 += (v - m) * (v - m);
  s2 /= (kBatches - 1);
  return std::sqrt(s2 / kBatches);
}

// int_0^u Phi^{-1}(t) dt = -phi(Phi^{-1}(u)); the endpoints vanish
double w1_of_sorted(const std::vector<double>& xs) {
  std::size_t R = xs.size();
  double Rd = static_cast<double>(R);
  double acc = 0.0;
  double Ga = 0.0;  // running -phi(quantile(i/R))
  for (std::size_t i = 0; i < R; ++i) {
    double a = static_cast<double>(i) / Rd;
    double b = static_cast<double>(i + 1) / Rd;
    double Gb = (i + 1 == R) ? 0.0 : -normal_pdf(normal_quantile(b));
    double x = xs[i];
    double u = normal_cdf(x);
    if (u <= a) {
      acc += (Gb - Ga) - x * (b - a);
    } else if (u >= b) {
      acc += x * (b - a) - (Gb - Ga);
    } else {
      double Gx = -normal_pdf(x);
      acc += x * (u - a) - (Gx - Ga) + (Gb - Gx) - x * (b - u);
    }
    Ga = Gb;
  }
  return acc;
}

double w1_estimate(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return w1_of_sorted(xs);
}

double ks_estimate(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  double Rd = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double u = normal_cdf(xs[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / Rd - u);
    d = std::max(d, u - static_cast<double>(i) / Rd);
  }
  return d;
}

double silverman_bandwidth(const std::vector<double>& sorted) {
  std::size_t R = sorted.size();
  double m = 0.0;
  for (double x : sorted) m += x;
  m /= static_cast<double>(R);
  double s2 = 0.0;
  for (double x : sorted) s2 += (x - m) * (x - m);
  s2 /= static_cast<double>(R - 1);
  double sd = std::sqrt(s2);
  double iqr = sorted[(3 * R) / 4] - sorted[R / 4];
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1e-6;
  return 0.9 * spread * std::pow(static_cast<double>(R), -0.2);
}

// (1/2) int_{-6}^{6} |fhat - phi| via linear binning onto the integration
// lattice and a truncated Gaussian kernel (reach 8h, relative tail < 1e-14)
double kde_tv_value(const std::vector<double>& samples, double h) {
  constexpr double kLo = -6.0, kStep = 0.01;  // integrates up to +6.0
  constexpr int kGrid = 1201;
  int W = static_cast<int>(std::ceil(8.0 * h / kStep));
  int nb = kGrid + 2 * W;
  double blo = kLo - W * kStep;
  std::vector<double> cnt(static_cast<std::size_t>(nb), 0.0);
  for (double x : samples) {
    double pos = (x - blo) / kStep;
    if (pos < 0.0 || pos >= static_cast<double>(nb - 1)) continue;
    auto idx = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(idx);
    cnt[idx] += 1.0 - frac;
    cnt[idx + 1] += frac;
  }
  std::vector<double> kern(static_cast<std::size_t>(W) + 1);
  for (int o = 0; o <= W; ++o)
    kern[static_cast<std::size_t>(o)] = normal_pdf(o * kStep / h);
  double norm = 1.0 / (static_cast<double>(samples.size()) * h);
  double integral = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    double f = 0.0;
    int c = i + W;
    for (int o = -W; o <= W; ++o)
      f += kern[static_cast<std::size_t>(std::abs(o))] *
           cnt[static_cast<std::size_t>(c + o)];
    double g = kLo + i * kStep;
    double diff = std::abs(f * norm - normal_pdf(g));
    // trapezoid: half weight at both ends
    integral += (i == 0 || i == kGrid - 1) ? 0.5 * diff : diff;
  }
  return 0.5 * integral * kStep;
}

}  // namespace

DistEstimate dist_wasserstein(const std::vector<double>& samples) {
  if (samples.size() < 100)
    throw ConfigError("wasserstein estimator needs at least 100 samples, got " +
                      std::to_string(samples.size()));
  DistEstimate est;
  est.value = w1_estimate(samples);
  est.se = batched_se(samples, w1_estimate);
  return est;
}

DistEstimate dist_kolmogorov(const std::vector<double>& samples) {
  if (samples.size() < 10)
    throw ConfigError("kolmogorov estimator needs at least 10 samples, got " +
                      std::to_string(samples.size()));
  DistEstimate est;
  est.value = ks_estimate(samples);
  est.se = batched_se(samples, ks_estimate);
  return est;
}

TvEstimate dist_tv(const std::vector<double>& samples) {
  if (samples.size() < 1000)
    throw ConfigError("total variation estimators need at least 1000 samples, "
                      "got " +
                      std::to_string(samples.size()));
  std::vector<double> xs(samples);
  std::sort(xs.begin(), xs.end());
  double Rd = static_cast<double>(xs.size());

  constexpr int kPts = 201;
  double emp[kPts], tgt[kPts];
  for (int t = 0; t < kPts; ++t) {
    double g = -5.0 + 0.05 * t;
    auto it = std::upper_bound(xs.begin(), xs.end(), g);
    emp[t] = static_cast<double>(it - xs.begin()) / Rd;
    tgt[t] = normal_cdf(g);
  }
  TvEstimate est;
  for (int t = 0; t < kPts; ++t)
    for (int u = t + 1; u < kPts; ++u)
      est.lower_bound_value = std::max(
          est.lower_bound_value, std::abs((emp[u] - emp[t]) - (tgt[u] - tgt[t])));

  double h = silverman_bandwidth(xs);
  est.kde_value = kde_tv_value(samples, h);
  est.kde_half_bw = kde_tv_value(samples, 0.5 * h);
  est.kde_double_bw = kde_tv_value(samples, 2.0 * h);
  est.se = batched_se(samples, [h](const std::vector<double>& slice) {
    return kde_tv_value(slice, h);
  });
  return est;
}

namespace {

// k-statistics: unbiased estimators of the third and fourth cumulants
void kstats(const std::vector<double>& v, double& k3, double& k4) {
  double R = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= R;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    double d = x - m, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= R;
  m3 /= R;
  m4 /= R;
  k3 = R * R * m3 / ((R - 1.0) * (R - 2.0));
  k4 = R * R * ((R + 1.0) * m4 - 3.0 * (R - 1.0) * m2 * m2) /
       ((R - 1.0) * (R - 2.0) * (R - 3.0));
}

}  // namespace

CumulantEstimate cumulants(const std::vector<double>& samples) {
  if (samples.size() < 1000)
    throw ConfigError("cumulant estimation needs at least 1000 samples, got " +
                      std::to_string(samples.size()));
  CumulantEstimate est;
  kstats(samples, est.k3, est.k4);
  est.k3_se = batched_se(samples, [](const std::vector<double>& s) {
    double a, b;
    kstats(s, a, b);
    return a;
  });
  est.k4_se = batched_se(samples, [](const std::vector<double>& s) {
    double a, b;
    kstats(s, a, b);
    return b;
  });
  return est;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& points,
                 bool log_correction) {
  if (points.size() < 4)
    throw ConfigError("rate fitting needs at least 4 points, got " +
                      std::to_string(points.size()));
  for (const auto& [n, v] : points) {
    if (!(n > 0.0) || (log_correction && n <= 1.0))
      throw ConfigError("rate fitting needs n > " +
                        std::string(log_correction ? "1" : "0") +
                        " at every point");
    if (!(v > 0.0))
      throw DegeneratePoints("rate fitting on the log scale needs positive "
                             "values; got " +
                             std::to_string(v) + " at n = " + std::to_string(n));
  }
  std::size_t m = points.size();
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = std::log(points[i].first);
    ys[i] = std::log(points[i].second);
    if (log_correction) ys[i] -= 0.5 * std::log(std::log(points[i].first));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("rate fitting needs distinct n values");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssr += r * r;
  }
  double sigma2 = ssr / static_cast<double>(m - 2);
  fit.ci_95 = 1.96 * std::sqrt(sigma2 / sxx);
  return fit;
}

}  // namespace bmlab::metrics
