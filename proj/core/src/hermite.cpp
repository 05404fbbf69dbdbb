#include "bmlab/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "bmlab/errors.hpp"
#include "bmlab/special.hpp"

namespace bmlab::hermite {

namespace {

// rank relative to the largest coefficient; exact zeros never count
int detect_rank(const std::vector<double>& c) {
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) return 0;
  for (std::size_t q = 1; q < c.size(); ++q)
    if (std::fabs(c[q]) > 1e-10 * scale) return static_cast<int>(q);
  return 0;
}

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights the
// squared first eigenvector components (times the total measure mass).
Quadrature golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub, double mass) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("quadrature eigensolve failed");
  const auto n = diag.size();
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    q.nodes[static_cast<std::size_t>(j)] = es.eigenvalues()(j);
    const double v0 = es.eigenvectors()(0, j);
    q.weights[static_cast<std::size_t>(j)] = mass * v0 * v0;
  }
  return q;
}

const Quadrature& gauss_legendre(int order) {
  if (order < 2 || order > 512) throw ConfigError("legendre order out of range");
  static std::map<int, Quadrature> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int i = 1; i < order; ++i)
    sub(i - 1) = static_cast<double>(i) / std::sqrt(4.0 * i * i - 1.0);
  return cache.emplace(order, golub_welsch(diag, sub, 2.0)).first->second;
}

}  // namespace

HermiteSeries HermiteSeries::from_coeffs(std::vector<double> c) {
  if (c.empty()) c.push_back(0.0);
  HermiteSeries s;
  s.coeffs = std::move(c);
  s.rank = detect_rank(s.coeffs);
  return s;
}

double HermiteSeries::l2_norm_sq() const {
  double acc = 0.0;
  for (int q = 0; q <= qmax(); ++q) acc += factorial_weighted_sq(q, coeffs[static_cast<std::size_t>(q)]);
  return acc;
}

namespace {

// evaluates the normalized polynomials Hhat_0..Hhat_N at x; returns Hhat_N
// and fills sumsq with sum_{k<N} Hhat_k^2 (the inverse Christoffel weight)
double normalized_sweep(int N, double x, double* deriv, double* sumsq) {
  double h0 = 1.0, h1 = x, ss = 1.0;
  if (N == 0) {
    if (deriv) *deriv = 0.0;
    if (sumsq) *sumsq = 0.0;
    return 1.0;
  }
  for (int k = 1; k < N; ++k) {
    ss += h1 * h1;
    const double h2 = (x * h1 - std::sqrt(static_cast<double>(k)) * h0) /
                      std::sqrt(static_cast<double>(k + 1));
    h0 = h1;
    h1 = h2;
  }
  if (deriv) *deriv = std::sqrt(static_cast<double>(N)) * h0;
  if (sumsq) *sumsq = ss;
  return h1;
}

}  // namespace

const Quadrature& gauss_hermite(int order) {
  if (order < 1 || order > 2048) throw ConfigError("gauss-hermite order out of range");
  static std::map<int, Quadrature> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(std::max(order - 1, 0));
  for (int i = 1; i < order; ++i) sub(i - 1) = std::sqrt(static_cast<double>(i));
  Quadrature q = golub_welsch(diag, sub, 1.0);

  // the eigensolve seeds ~1e-12; two Newton steps on Hhat_order and
  // Christoffel weights bring nodes and weights to machine precision
  for (std::size_t j = 0; j < q.nodes.size(); ++j) {
    double x = q.nodes[j];
    for (int it2 = 0; it2 < 2; ++it2) {
      double deriv = 0.0;
      const double hn = normalized_sweep(order, x, &deriv, nullptr);
      if (deriv != 0.0) x -= hn / deriv;
    }
    double sumsq = 1.0;
    normalized_sweep(order, x, nullptr, &sumsq);
    q.nodes[j] = x;
    q.weights[j] = 1.0 / sumsq;
  }
  return cache.emplace(order, std::move(q)).first->second;
}

double gauss_expect(const std::function<double(double)>& h, double half_range, int panels,
                    int nodes_per_panel) {
  if (!(half_range > 0.0)) throw ConfigError("half_range must be positive");
  if (panels < 1) throw ConfigError("panels must be >= 1");
  const Quadrature& gl = gauss_legendre(nodes_per_panel);
  const double width = 2.0 * half_range / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = -half_range + (p + 0.5) * width;
    const double half = 0.5 * width;
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      const double x = mid + half * gl.nodes[j];
      acc += half * gl.weights[j] * h(x) * normal_pdf(x);
    }
  }
  return acc;
}

double eval_hermite(int q, double x, int max_q) {
  if (q < 0) throw ConfigError("hermite order must be >= 0");
  if (q > max_q) throw ConfigError("hermite order above the configured cap");
  if (q == 0) return 1.0;
  double h0 = 1.0, h1 = x;
  for (int k = 1; k < q; ++k) {
    const double h2 = x * h1 - static_cast<double>(k) * h0;
    h0 = h1;
    h1 = h2;
  }
  if (!std::isfinite(h1)) throw NumericalError("hermite evaluation overflowed");
  return h1;
}

double eval_series(const HermiteSeries& s, double x) {
  // Clenshaw for the three-term recurrence: b_k = c_k + x b_{k+1} - (k+1) b_{k+2}
  double b1 = 0.0, b2 = 0.0;
  for (int k = s.qmax(); k >= 0; --k) {
    const double b0 = s.coeffs[static_cast<std::size_t>(k)] + x * b1 - static_cast<double>(k + 1) * b2;
    b2 = b1;
    b1 = b0;
  }
  if (!std::isfinite(b1)) throw NumericalError("series evaluation overflowed");
  return b1;
}

HermiteSeries project(const std::function<double(double)>& f, int Q_max, int quad_order,
                      ProjectInfo* info, bool require_rank, double tail_rel_tol) {
  if (Q_max < 0) throw ConfigError("Q_max must be >= 0");
  const int order = quad_order > 0 ? quad_order : 2 * Q_max + 8;
  if (order < Q_max + 4) throw ConfigError("quadrature order must be at least Q_max + 4");
  const Quadrature& quad = gauss_hermite(order);

  // accumulate against the normalized polynomials Hhat_q = H_q / sqrt(q!),
  // which stay O(1) on the node range; a_q = E[f Hhat_q] = sqrt(q!) c_q
  std::vector<double> a(static_cast<std::size_t>(Q_max) + 1, 0.0);
  double ef2 = 0.0;
  for (std::size_t j = 0; j < quad.nodes.size(); ++j) {
    const double x = quad.nodes[j];
    const double fx = f(x);
    const double wf = quad.weights[j] * fx;
    ef2 += wf * fx;
    double h0 = 1.0, h1 = x;
    a[0] += wf;
    if (Q_max >= 1) a[1] += wf * x;
    for (int q = 1; q < Q_max; ++q) {
      const double h2 = (x * h1 - std::sqrt(static_cast<double>(q)) * h0) /
                        std::sqrt(static_cast<double>(q + 1));
      a[static_cast<std::size_t>(q) + 1] += wf * h2;
      h0 = h1;
      h1 = h2;
    }
  }

  std::vector<double> c(a.size());
  double captured = 0.0;
  for (int q = 0; q <= Q_max; ++q) {
    const double aq = a[static_cast<std::size_t>(q)];
    captured += aq * aq;  // q! c_q^2
    if (q <= 170) {
      c[static_cast<std::size_t>(q)] = aq / std::sqrt(factorial(q));
    } else {
      const double lq = std::log(std::fabs(aq));
      c[static_cast<std::size_t>(q)] =
          aq == 0.0 ? 0.0 : std::copysign(std::exp(lq - 0.5 * log_factorial(q)), aq);
    }
  }

  const double tail = std::max(0.0, ef2 - captured);
  if (info) {
    info->tail_mass = tail;
    info->warning.clear();
    if (tail > tail_rel_tol * std::max(ef2, std::numeric_limits<double>::min())) {
      std::ostringstream os;
      os << "truncation tail mass " << tail << " exceeds " << tail_rel_tol << " of E[f^2] = " << ef2;
      info->warning = os.str();
    }
  }

  auto s = HermiteSeries::from_coeffs(std::move(c));
  if (require_rank && s.rank == 0)
    throw RankError("no coefficient with q >= 1 above the detection tolerance");
  return s;
}

HermiteSeries shift_T(const HermiteSeries& s, int k) {
  if (k < 1 || k > s.rank) throw RankError("shift order must satisfy 1 <= k <= rank");
  std::vector<double> c(static_cast<std::size_t>(s.qmax() - k) + 1);
  for (int q = 0; q <= s.qmax() - k; ++q) c[static_cast<std::size_t>(q)] = s.c(q + k);
  return HermiteSeries::from_coeffs(std::move(c));
}

HermiteSeries abs_op_A(const HermiteSeries& s) {
  std::vector<double> c(s.coeffs.size());
  for (std::size_t q = 0; q < c.size(); ++q) c[q] = std::fabs(s.coeffs[q]);
  return HermiteSeries::from_coeffs(std::move(c));
}

HermiteSeries derivative(const HermiteSeries& s, int order) {
  if (order < 0) throw ConfigError("derivative order must be >= 0");
  if (order == 0) return s;
  if (order > s.qmax()) return HermiteSeries::from_coeffs({0.0});
  std::vector<double> c(static_cast<std::size_t>(s.qmax() - order) + 1);
  for (int q = order; q <= s.qmax(); ++q) {
    double fall = 1.0;
    for (int j = 0; j < order; ++j) fall *= static_cast<double>(q - j);
    c[static_cast<std::size_t>(q - order)] = s.c(q) * fall;
  }
  return HermiteSeries::from_coeffs(std::move(c));
}

SigmaSq sigma_sq(const HermiteSeries& s, const paths::CovarianceModel& model, long long lag_cutoff) {
  if (lag_cutoff < 0) throw ConfigError("lag cutoff must be >= 0");
  const int d = s.rank;
  if (d == 0) throw NormalizationError("series has hermite rank 0, sigma^2 degenerates");

  // S_q = sum_{|k|<=L} rho(k)^q accumulated per lag shell with running powers
  std::vector<double> sum_q(static_cast<std::size_t>(s.qmax()) + 1, 1.0);  // k = 0 shell
  std::vector<double> abs_q(static_cast<std::size_t>(s.qmax()) + 1, 1.0);
  for (long long k = 1; k <= lag_cutoff; ++k) {
    const double r = model.rho(k);
    if (r == 0.0) continue;
    double rp = 1.0;
    for (int q = 1; q < d; ++q) rp *= r;
    for (int q = d; q <= s.qmax(); ++q) {
      rp *= r;
      sum_q[static_cast<std::size_t>(q)] += 2.0 * rp;
      abs_q[static_cast<std::size_t>(q)] += 2.0 * std::fabs(rp);
    }
  }

  double value = 0.0, abs_scale = 0.0;
  for (int q = d; q <= s.qmax(); ++q) {
    const double wq = factorial_weighted_sq(q, s.c(q));
    value += wq * sum_q[static_cast<std::size_t>(q)];
    abs_scale += wq * abs_q[static_cast<std::size_t>(q)];
  }

  SigmaSq out;
  out.value = value;
  out.tail_abs = lag_cutoff >= 1
                     ? 2.0 * std::pow(std::fabs(model.rho(lag_cutoff)), d) * factorial_weighted_sq(d, s.c(d))
                     : 0.0;
  out.summable = paths::summability_diag(model, static_cast<double>(d), std::max(lag_cutoff, 1LL)).saturated;
  if (!(value > 1e-12 * abs_scale))
    throw NormalizationError("sigma^2 partial sum is not positive at the working cutoff");
  return out;
}

namespace {

struct LogCoeffs {
  std::vector<double> lg;   // log |c_q|, -inf for zero
  std::vector<int> sign;    // -1, 0, +1

  static LogCoeffs from(const std::vector<double>& c) {
    LogCoeffs out;
    out.lg.resize(c.size());
    out.sign.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == 0.0) {
        out.lg[i] = -std::numeric_limits<double>::infinity();
        out.sign[i] = 0;
      } else {
        out.lg[i] = std::log(std::fabs(c[i]));
        out.sign[i] = c[i] > 0.0 ? 1 : -1;
      }
    }
    return out;
  }

  int qmax() const { return static_cast<int>(lg.size()) - 1; }
};

// direct double-precision linearized product; valid while C(p,r)C(q,r)r!
// and the running sums stay inside the double range
std::vector<double> product_direct(const std::vector<double>& a, const std::vector<double>& b) {
  const int pa = static_cast<int>(a.size()) - 1;
  const int pb = static_cast<int>(b.size()) - 1;
  std::vector<double> out(static_cast<std::size_t>(pa + pb) + 1, 0.0);
  for (int p = 0; p <= pa; ++p) {
    if (a[static_cast<std::size_t>(p)] == 0.0) continue;
    for (int q = 0; q <= pb; ++q) {
      if (b[static_cast<std::size_t>(q)] == 0.0) continue;
      const double ab = a[static_cast<std::size_t>(p)] * b[static_cast<std::size_t>(q)];
      for (int r = 0; r <= std::min(p, q); ++r) {
        out[static_cast<std::size_t>(p + q - 2 * r)] += ab * binomial(p, r) * binomial(q, r) * factorial(r);
      }
    }
  }
  return out;
}

// signed log-sum-exp accumulation with an online max shift per output order
LogCoeffs product_log(const LogCoeffs& a, const LogCoeffs& b) {
  const int pa = a.qmax();
  const int pb = b.qmax();
  const std::size_t nout = static_cast<std::size_t>(pa + pb) + 1;
  std::vector<double> lmax(nout, -std::numeric_limits<double>::infinity());
  std::vector<double> pos(nout, 0.0), neg(nout, 0.0);
  for (int p = 0; p <= pa; ++p) {
    if (a.sign[static_cast<std::size_t>(p)] == 0) continue;
    for (int q = 0; q <= pb; ++q) {
      if (b.sign[static_cast<std::size_t>(q)] == 0) continue;
      const double base = a.lg[static_cast<std::size_t>(p)] + b.lg[static_cast<std::size_t>(q)];
      const int sg = a.sign[static_cast<std::size_t>(p)] * b.sign[static_cast<std::size_t>(q)];
      for (int r = 0; r <= std::min(p, q); ++r) {
        const std::size_t m = static_cast<std::size_t>(p + q - 2 * r);
        const double lt = base + log_binomial(p, r) + log_binomial(q, r) + log_factorial(r);
        if (lt > lmax[m]) {
          const double scale = std::exp(lmax[m] - lt);
          pos[m] *= scale;
          neg[m] *= scale;
          lmax[m] = lt;
        }
        const double e = std::exp(lt - lmax[m]);
        if (sg > 0)
          pos[m] += e;
        else
          neg[m] += e;
      }
    }
  }
  LogCoeffs out;
  out.lg.resize(nout);
  out.sign.resize(nout);
  for (std::size_t m = 0; m < nout; ++m) {
    const double diff = pos[m] - neg[m];
    if (diff == 0.0 || !std::isfinite(lmax[m])) {
      out.lg[m] = -std::numeric_limits<double>::infinity();
      out.sign[m] = 0;
    } else {
      out.lg[m] = lmax[m] + std::log(std::fabs(diff));
      out.sign[m] = diff > 0.0 ? 1 : -1;
    }
  }
  return out;
}

}  // namespace

HermiteSeries truncated_power(const HermiteSeries& s, int M, int N, bool force_log_space) {
  if (M < 1) throw ConfigError("power M must be >= 1");
  if (N < 0) throw ConfigError("truncation order N must be >= 0");
  const int top = std::min(N, s.qmax());
  std::vector<double> base(s.coeffs.begin(), s.coeffs.begin() + top + 1);
  if (M == 1) return HermiteSeries::from_coeffs(std::move(base));

  // stay in plain doubles while the combinatorial factors are small
  const auto small_enough = [&](int qa, int qb) { return !force_log_space && qa + qb <= 34; };

  bool in_log = false;
  std::vector<double> acc = base;
  LogCoeffs lacc;
  for (int step = 1; step < M; ++step) {
    const int qa = in_log ? lacc.qmax() : static_cast<int>(acc.size()) - 1;
    if (!in_log && small_enough(qa, top)) {
      acc = product_direct(acc, base);
      for (double v : acc)
        if (!std::isfinite(v)) throw NumericalError("product coefficient overflowed");
    } else {
      if (!in_log) {
        lacc = LogCoeffs::from(acc);
        in_log = true;
      }
      lacc = product_log(lacc, LogCoeffs::from(base));
    }
  }

  if (in_log) {
    std::vector<double> out(lacc.lg.size());
    for (std::size_t m = 0; m < out.size(); ++m) {
      if (lacc.sign[m] == 0) {
        out[m] = 0.0;
      } else {
        if (lacc.lg[m] > 708.0) throw NumericalError("product coefficient overflows the double range");
        out[m] = lacc.sign[m] * std::exp(lacc.lg[m]);
      }
    }
    return HermiteSeries::from_coeffs(std::move(out));
  }
  return HermiteSeries::from_coeffs(std::move(acc));
}

CriterionTrace lemma33_criterion(const HermiteSeries& s, int ell, int M) {
  if (M < 3) throw ConfigError("criterion needs M >= 3");
  if (ell < 0) throw ConfigError("ell must be >= 0");
  CriterionTrace out;
  out.terms.resize(s.coeffs.size());
  out.partial_sums.resize(s.coeffs.size());
  double run = 0.0;
  for (int q = 0; q <= s.qmax(); ++q) {
    double t;
    const double cq = s.c(q);
    if (q == 0) {
      t = ell == 0 ? std::fabs(cq) : 0.0;
    } else if (cq == 0.0) {
      t = 0.0;
    } else {
      const double lt = std::log(std::fabs(cq)) + (0.5 * ell - 0.25) * std::log(static_cast<double>(q)) +
                        0.5 * log_factorial(q) + 0.5 * q * std::log(static_cast<double>(M - 1));
      t = std::exp(lt);  // +inf when past the double range: growth is the verdict anyway
    }
    out.terms[static_cast<std::size_t>(q)] = t;
    run += t;
    out.partial_sums[static_cast<std::size_t>(q)] = run;
  }

  // trend over the last few observed nonzero terms (q >= 1)
  std::vector<double> nz;
  for (int q = 1; q <= s.qmax(); ++q)
    if (out.terms[static_cast<std::size_t>(q)] > 0.0) nz.push_back(out.terms[static_cast<std::size_t>(q)]);
  bool growing = false;
  const std::size_t ratios = nz.size() >= 2 ? std::min<std::size_t>(nz.size() - 1, 8) : 0;
  for (std::size_t i = nz.size() - ratios; i < nz.size(); ++i) {
    if (!(nz[i] < 0.95 * nz[i - 1])) growing = true;
  }
  out.classification = growing ? CriterionTrace::Class::Growing : CriterionTrace::Class::Saturating;
  return out;
}

namespace {

// c_{2q}(|x| - E|Z|) = sqrt(2/pi) (-1)^{q-1} / (2^q q! (2q-1)), log-evaluated
std::vector<double> abs_coeffs(int Q_max) {
  std::vector<double> c(static_cast<std::size_t>(Q_max) + 1, 0.0);
  const double la = 0.5 * std::log(2.0 / M_PI);
  for (int q = 1; 2 * q <= Q_max; ++q) {
    const double lg = la - q * std::log(2.0) - log_factorial(q) - std::log(2.0 * q - 1.0);
    c[static_cast<std::size_t>(2 * q)] = (q % 2 == 1 ? 1.0 : -1.0) * std::exp(lg);
  }
  return c;
}

// half-range moments I_q(p) = int_0^inf x^p H_q(x) phi(x) dx via
// I_{q+1}(p) = I_q(p+1) - q I_{q-1}(p); I_0(p) = 2^{p/2-1} Gamma((p+1)/2) / sqrt(pi)
std::vector<double> abspow_coeffs(double p, int Q_max) {
  const int Q = Q_max;
  std::vector<std::vector<double>> T(static_cast<std::size_t>(Q) + 1,
                                     std::vector<double>(static_cast<std::size_t>(Q) + 2, 0.0));
  for (int j = 0; j <= Q + 1; ++j) {
    const double sp = p + j;
    T[0][static_cast<std::size_t>(j)] =
        std::exp((0.5 * sp - 1.0) * std::log(2.0) + std::lgamma(0.5 * (sp + 1.0)) - 0.5 * std::log(M_PI));
  }
  if (Q >= 1)
    for (int j = 0; j <= Q; ++j) T[1][static_cast<std::size_t>(j)] = T[0][static_cast<std::size_t>(j) + 1];
  for (int q = 1; q < Q; ++q)
    for (int j = 0; j + q + 1 <= Q + 1 && j <= Q - q - 1; ++j)
      T[static_cast<std::size_t>(q) + 1][static_cast<std::size_t>(j)] =
          T[static_cast<std::size_t>(q)][static_cast<std::size_t>(j) + 1] -
          static_cast<double>(q) * T[static_cast<std::size_t>(q) - 1][static_cast<std::size_t>(j)];

  std::vector<double> c(static_cast<std::size_t>(Q) + 1, 0.0);
  for (int q = 2; q <= Q; q += 2)
    c[static_cast<std::size_t>(q)] = 2.0 * T[static_cast<std::size_t>(q)][0] / factorial(q);
  return c;  // c_0 stays 0: the function is centered by its mean
}

}  // namespace

HermiteSeries catalog(const std::string& name, int Q_max) {
  if (Q_max < 0) throw ConfigError("Q_max must be >= 0");
  std::vector<double> c(static_cast<std::size_t>(Q_max) + 1, 0.0);

  if (name.size() >= 2 && name[0] == 'H') {
    int q = 0;
    try {
      std::size_t used = 0;
      q = std::stoi(name.substr(1), &used);
      if (used != name.size() - 1) throw std::invalid_argument(name);
    } catch (const std::exception&) {
      throw ConfigError("unknown catalog entry: " + name);
    }
    if (q < 1 || q > Q_max) throw ConfigError("catalog H<q> needs 1 <= q <= Q_max");
    c[static_cast<std::size_t>(q)] = 1.0;
    return HermiteSeries::from_coeffs(std::move(c));
  }
  if (name == "x^2") {
    if (Q_max < 2) throw ConfigError("x^2 needs Q_max >= 2");
    c[0] = 1.0;
    c[2] = 1.0;
    return HermiteSeries::from_coeffs(std::move(c));
  }
  if (name == "abs") return HermiteSeries::from_coeffs(abs_coeffs(Q_max));
  if (name.rfind("abspow:", 0) == 0) {
    double p = 0.0;
    try {
      std::size_t used = 0;
      p = std::stod(name.substr(7), &used);
      if (used != name.size() - 7) throw std::invalid_argument(name);
    } catch (const std::exception&) {
      throw ConfigError("unknown catalog entry: " + name);
    }
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("abspow exponent must be positive");
    if (Q_max < 2) throw ConfigError("abspow needs Q_max >= 2");
    return HermiteSeries::from_coeffs(abspow_coeffs(p, Q_max));
  }
  throw ConfigError("unknown catalog entry: " + name);
}

std::string series_to_json(const HermiteSeries& s) {
  nlohmann::ordered_json j;
  j["coeffs"] = s.coeffs;
  j["rank"] = s.rank;
  return j.dump();
}

HermiteSeries series_from_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    return HermiteSeries::from_coeffs(j.at("coeffs").get<std::vector<double>>());
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad series json: ") + e.what());
  }
}

}  // namespace bmlab::hermite
