#include "bmlab/diagrams.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>

#include "bmlab/errors.hpp"

namespace bmlab::diagrams {

namespace {

using boost::multiprecision::cpp_int;

const cpp_int& big_factorial(int n) {
  static const std::vector<cpp_int> table = [] {
    std::vector<cpp_int> t(13);
    t[0] = 1;
    for (int i = 1; i <= 12; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table[n];
}

struct EnumSpec {
  std::vector<int> q;
  std::vector<std::pair<int, int>> edges;  // lexicographic (j,k)
  std::vector<int> lo;                     // per-edge lower bounds
  std::vector<char> cross;                 // per-edge crossing flags
  int last_cross = -1;
  bool remainders = false;
  long long max_count = 0;
};

void validate_inputs(const std::vector<int>& q, const DiagramOptions& opts) {
  int M = static_cast<int>(q.size());
  if (M < 1) throw ConfigError("diagram degrees must be nonempty");
  if (M > 8) throw ConfigError("at most 8 diagram slots supported");
  for (int d : q)
    if (d < 0 || d > 12)
      throw ConfigError("diagram degrees must lie in [0, 12]");
  if (!opts.cross_side.empty()) {
    if (static_cast<int>(opts.cross_side.size()) != M)
      throw ConfigError("cross_side must label every slot");
    bool has0 = false, has1 = false;
    for (int s : opts.cross_side) {
      if (s == 0)
        has0 = true;
      else if (s == 1)
        has1 = true;
      else
        throw ConfigError("cross_side labels must be 0 or 1");
    }
    if (!has0 || !has1)
      throw ConfigError("cross_side must name two nonempty sides");
  }
  for (const auto& [edge, b] : opts.min_beta) {
    if (edge.first < 0 || edge.second <= edge.first || edge.second >= M)
      throw ConfigError("min_beta edge out of range");
    if (b < 0) throw ConfigError("min_beta bounds must be nonnegative");
  }
  if (opts.max_count < 0) throw ConfigError("max_count must be nonnegative");
}

int future_capacity(const EnumSpec& spec, const std::vector<int>& rem, int e,
                    int v) {
  int cap = 0;
  for (int e2 = e + 1; e2 < static_cast<int>(spec.edges.size()); ++e2) {
    auto [a, b] = spec.edges[e2];
    if (a == v)
      cap += rem[b];
    else if (b == v)
      cap += rem[a];
  }
  return cap;
}

void dfs(const EnumSpec& spec, int e, int cross_sum, std::vector<int>& rem,
         std::vector<int>& beta, std::vector<Diagram>& out) {
  const int E = static_cast<int>(spec.edges.size());
  if (e == E) {
    if (spec.last_cross >= 0 && cross_sum == 0) return;
    if (!spec.remainders)
      for (int r : rem)
        if (r != 0) return;
    if (static_cast<long long>(out.size()) + 1 > spec.max_count)
      throw BudgetError("diagram family exceeds the configured count budget");
    Diagram d;
    d.beta = beta;
    cpp_int num = 1, den = 1;
    for (int qi : spec.q) num *= big_factorial(qi);
    for (int b : beta) den *= big_factorial(b);
    if (spec.remainders) {
      d.gamma = rem;
      for (int g : rem) den *= big_factorial(g);
    }
    d.weight = BigRational(num, den);
    out.push_back(std::move(d));
    return;
  }
  auto [j, k] = spec.edges[e];
  int hi = std::min(rem[j], rem[k]);
  int lo = spec.lo[e];
  if (!spec.remainders) {
    lo = std::max(lo, rem[j] - future_capacity(spec, rem, e, j));
    lo = std::max(lo, rem[k] - future_capacity(spec, rem, e, k));
  }
  if (e == spec.last_cross && cross_sum == 0) lo = std::max(lo, 1);
  for (int b = lo; b <= hi; ++b) {
    rem[j] -= b;
    rem[k] -= b;
    beta[e] = b;
    dfs(spec, e + 1, cross_sum + (spec.cross[e] ? b : 0), rem, beta, out);
    rem[j] += b;
    rem[k] += b;
    beta[e] = 0;
  }
}

std::string cache_key(const std::vector<int>& q, const DiagramOptions& opts) {
  std::ostringstream os;
  for (int d : q) os << d << ',';
  os << '|' << (opts.allow_remainders ? 'r' : 'e') << '|';
  for (int s : opts.cross_side) os << s;
  os << '|';
  for (const auto& [edge, b] : opts.min_beta)
    os << edge.first << '.' << edge.second << ':' << b << ';';
  return os.str();
}

template <typename T>
T weight_value(const BigRational& w);

template <>
double weight_value<double>(const BigRational& w) {
  return w.convert_to<double>();
}

template <>
BigRational weight_value<BigRational>(const BigRational& w) {
  return w;
}

template <typename T>
void validate_corr(const std::vector<T>& corr, int M) {
  if (static_cast<int>(corr.size()) != M * M)
    throw ConfigError("correlation matrix size must be M x M");
  for (int j = 0; j < M; ++j) {
    if (!(corr[j * M + j] == T(1)))
      throw ConfigError("correlation matrix must have unit diagonal");
    for (int k = j + 1; k < M; ++k)
      if (!(corr[j * M + k] == corr[k * M + j]))
        throw ConfigError("correlation matrix must be symmetric");
  }
}

template <typename T>
T eval_product_moment(const std::vector<int>& q, const std::vector<T>& corr,
                      const DiagramOptions& opts) {
  int M = static_cast<int>(q.size());
  validate_corr(corr, M);
  const auto& ds = enumerate_diagrams(q, opts);
  T total(0);
  for (const auto& d : ds) {
    T term = weight_value<T>(d.weight);
    int e = 0;
    for (int j = 0; j < M; ++j)
      for (int k = j + 1; k < M; ++k, ++e)
        for (int rep = 0; rep < d.beta[e]; ++rep) term *= corr[j * M + k];
    total += term;
  }
  return total;
}

// flattened exponent/coefficient pairs for the 4-slot covariance sums
struct VarTerm {
  std::array<int, 6> e;  // exponents on rho at the six pair lags
  double coef;
};

std::vector<VarTerm> var_terms(const hermite::HermiteSeries& s, int N) {
  std::vector<int> qs;
  for (int q = 1; q <= N; ++q)
    if (s.c(q) != 0.0) qs.push_back(q);
  DiagramOptions cross;
  cross.cross_side = {0, 0, 1, 1};
  std::map<std::array<int, 6>, double> merged;
  for (int q1 : qs)
    for (int q2 : qs)
      for (int q3 : qs)
        for (int q4 : qs) {
          const auto& ds =
              enumerate_diagrams({q1 - 1, q2 - 1, q3 - 1, q4 - 1}, cross);
          if (ds.empty()) continue;
          double base = static_cast<double>(q1) * q3 * s.c(q1) * s.c(q2) *
                        s.c(q3) * s.c(q4);
          for (const auto& d : ds) {
            std::array<int, 6> e = {d.beta[0] + 1, d.beta[1], d.beta[2],
                                    d.beta[3],     d.beta[4], d.beta[5] + 1};
            merged[e] += base * d.weight.convert_to<double>();
          }
        }
  std::vector<VarTerm> out;
  out.reserve(merged.size());
  for (const auto& [e, c] : merged)
    if (c != 0.0) out.push_back({e, c});
  return out;
}

// signed powers rho(a)^p for |a| <= amax, p <= pmax, laid out row-major by |a|
std::vector<double> rho_power_table(const paths::CovarianceModel& model,
                                    long long amax, int pmax) {
  std::vector<double> t((amax + 1) * (pmax + 1));
  for (long long a = 0; a <= amax; ++a) {
    double r = model.rho(a);
    t[a * (pmax + 1)] = 1.0;
    for (int p = 1; p <= pmax; ++p) t[a * (pmax + 1) + p] = t[a * (pmax + 1) + p - 1] * r;
  }
  return t;
}

double finalize_variance(double total, double gross) {
  if (total < 0.0) {
    if (total > -1e-9 * std::max(1.0, gross)) return 0.0;
    throw NumericalError("variance of the inner product came out negative");
  }
  return total;
}

int series_degree(const hermite::HermiteSeries& s) {
  int N = s.qmax();
  while (N >= 1 && s.c(N) == 0.0) --N;
  return N;
}

// ---- normalized lag-sum machinery ----

struct EdgeSpec {
  int a, b, mult;
};

// |rho(k)|^mult over k in [-L, L], indexed k + L
std::vector<double> abs_power_band(const paths::CovarianceModel& model,
                                   long long L, int mult) {
  std::vector<double> f(2 * L + 1);
  for (long long k = -L; k <= L; ++k)
    f[k + L] = std::pow(std::abs(model.rho(k)), mult);
  return f;
}

double tree_component_sum(const paths::CovarianceModel& model, long long n,
                          long long L, const std::vector<int>& verts,
                          const std::vector<EdgeSpec>& edges) {
  // BFS orientation from the first vertex, then leaf-to-root contraction
  int root = verts[0];
  std::map<int, std::vector<std::pair<int, int>>> adj;  // vertex -> (other, edge idx)
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    adj[edges[i].a].push_back({edges[i].b, i});
    adj[edges[i].b].push_back({edges[i].a, i});
  }
  std::vector<int> order;
  std::map<int, int> parent_edge, parent;
  std::map<int, char> seen;
  order.push_back(root);
  seen[root] = 1;
  for (size_t h = 0; h < order.size(); ++h) {
    int v = order[h];
    for (auto [u, ei] : adj[v])
      if (!seen[u]) {
        seen[u] = 1;
        parent[u] = v;
        parent_edge[u] = ei;
        order.push_back(u);
      }
  }
  std::map<int, std::vector<double>> acc;
  for (int v : verts) acc[v] = std::vector<double>(n, 1.0);
  for (int h = static_cast<int>(order.size()) - 1; h >= 1; --h) {
    int v = order[h];
    auto f = abs_power_band(model, L, edges[parent_edge[v]].mult);
    const auto& child = acc[v];
    auto& up = acc[parent[v]];
    for (long long i = 0; i < n; ++i) {
      double sum = 0.0;
      long long jlo = std::max<long long>(0, i - L);
      long long jhi = std::min<long long>(n - 1, i + L);
      for (long long j = jlo; j <= jhi; ++j) sum += child[j] * f[i - j + L];
      up[i] *= sum;
    }
  }
  double total = 0.0;
  for (long long i = 0; i < n; ++i) total += acc[root][i];
  return total;
}

double cycle_component_sum(const paths::CovarianceModel& model, long long n,
                           long long L, const std::vector<int>& verts,
                           const std::vector<EdgeSpec>& edges) {
  // order the vertices around the cycle
  std::map<int, std::vector<std::pair<int, int>>> adj;
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    adj[edges[i].a].push_back({edges[i].b, i});
    adj[edges[i].b].push_back({edges[i].a, i});
  }
  std::vector<int> ring = {verts[0]};
  std::vector<int> ring_edge;
  int prev = -1;
  while (true) {
    int v = ring.back();
    auto [u0, e0] = adj[v][0];
    auto [u1, e1] = adj[v][1];
    int nxt = (u0 != prev || u1 == prev) ? u0 : u1;
    int ne = (nxt == u0) ? e0 : e1;
    if (u0 == prev) {
      nxt = u1;
      ne = e1;
    }
    if (nxt == ring.front() && ring.size() == verts.size()) {
      ring_edge.push_back(ne);
      break;
    }
    prev = v;
    ring.push_back(nxt);
    ring_edge.push_back(ne);
  }
  const int m = static_cast<int>(ring.size());
  long long band_final = std::min(n - 1, static_cast<long long>(m - 1) * L);
  if (static_cast<double>(n) * (2.0 * band_final + 1) > 1.5e8)
    throw BudgetError("cycle reduction would need too much memory");
  double flops = 0.0;
  for (int e = 1; e + 1 < m; ++e)
    flops += static_cast<double>(n) *
             (2.0 * std::min<long long>(n - 1, static_cast<long long>(e + 1) * L) + 1) *
             (2.0 * L + 1);
  if (flops > 5e9)
    throw BudgetError("cycle reduction would cost too many operations");

  auto f0 = abs_power_band(model, L, edges[ring_edge[0]].mult);
  long long band = std::min(n - 1, L);
  std::vector<double> P(n * (2 * band + 1), 0.0);
  for (long long i = 0; i < n; ++i)
    for (long long j = std::max<long long>(0, i - band);
         j <= std::min(n - 1, i + band); ++j)
      if (std::llabs(i - j) <= L) P[i * (2 * band + 1) + (j - i + band)] = f0[i - j + L];
  for (int e = 1; e + 1 < m; ++e) {
    auto fe = abs_power_band(model, L, edges[ring_edge[e]].mult);
    long long nb = std::min(n - 1, band + L);
    std::vector<double> Q(n * (2 * nb + 1), 0.0);
    for (long long i = 0; i < n; ++i)
      for (long long j = std::max<long long>(0, i - nb);
           j <= std::min(n - 1, i + nb); ++j) {
        long long klo = std::max({static_cast<long long>(0), i - band, j - L});
        long long khi = std::min({n - 1, i + band, j + L});
        double sum = 0.0;
        for (long long k = klo; k <= khi; ++k)
          sum += P[i * (2 * band + 1) + (k - i + band)] * fe[k - j + L];
        Q[i * (2 * nb + 1) + (j - i + nb)] = sum;
      }
    P.swap(Q);
    band = nb;
  }
  auto flast = abs_power_band(model, L, edges[ring_edge[m - 1]].mult);
  double total = 0.0;
  for (long long i = 0; i < n; ++i)
    for (long long j = std::max<long long>(0, i - band);
         j <= std::min(n - 1, i + band); ++j)
      if (std::llabs(j - i) <= L)
        total += P[i * (2 * band + 1) + (j - i + band)] * flast[j - i + L];
  return total;
}

double literal_component_sum(const paths::CovarianceModel& model, long long n,
                             const std::vector<int>& verts,
                             const std::vector<EdgeSpec>& edges) {
  const int m = static_cast<int>(verts.size());
  std::map<int, int> local;
  for (int i = 0; i < m; ++i) local[verts[i]] = i;
  // per-edge |rho|^mult by |lag|
  std::vector<std::vector<double>> f(edges.size());
  for (size_t e = 0; e < edges.size(); ++e) {
    f[e].resize(n);
    for (long long d = 0; d < n; ++d)
      f[e][d] = std::pow(std::abs(model.rho(d)), edges[e].mult);
  }
  std::vector<long long> idx(m, 0);
  double total = 0.0;
  while (true) {
    double prod = 1.0;
    for (size_t e = 0; e < edges.size() && prod != 0.0; ++e)
      prod *= f[e][std::llabs(idx[local[edges[e].a]] - idx[local[edges[e].b]])];
    total += prod;
    int pos = m - 1;
    while (pos >= 0 && ++idx[pos] == n) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

// ---- summation inequality machinery ----

struct GridFn {
  long long lo = 0;
  std::vector<double> v = {1.0};  // delta at 0 by default
  long long hi() const { return lo + static_cast<long long>(v.size()) - 1; }
};

GridFn convolve(const GridFn& g, const GridFn& h) {
  GridFn r;
  r.lo = g.lo + h.lo;
  r.v.assign(g.v.size() + h.v.size() - 1, 0.0);
  for (size_t i = 0; i < g.v.size(); ++i) {
    if (g.v[i] == 0.0) continue;
    for (size_t j = 0; j < h.v.size(); ++j) r.v[i + j] += g.v[i] * h.v[j];
  }
  return r;
}

class FCache {
 public:
  FCache(const std::function<double(long long)>& f, long long range)
      : lo_(-range), v_(2 * range + 1) {
    for (long long a = -range; a <= range; ++a) v_[a - lo_] = f(a);
  }
  double operator()(long long a) const { return v_[a - lo_]; }

 private:
  long long lo_;
  std::vector<double> v_;
};

GridFn sign_atom(const FCache& fc, long long K, int sign) {
  GridFn g;
  g.lo = -K;
  g.v.resize(2 * K + 1);
  for (long long x = -K; x <= K; ++x) g.v[x + K] = fc(sign > 0 ? x : -x);
  return g;
}

}  // namespace

const std::vector<Diagram>& enumerate_diagrams(const std::vector<int>& q,
                                               const DiagramOptions& opts) {
  validate_inputs(q, opts);
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<const std::vector<Diagram>>> cache;
  std::string key = cache_key(q, opts);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) {
    if (static_cast<long long>(it->second->size()) > opts.max_count)
      throw BudgetError("diagram family exceeds the configured count budget");
    return *it->second;
  }

  const int M = static_cast<int>(q.size());
  auto result = std::make_unique<std::vector<Diagram>>();
  long long total_degree = std::accumulate(q.begin(), q.end(), 0LL);
  if (opts.allow_remainders || total_degree % 2 == 0) {
    EnumSpec spec;
    spec.q = q;
    spec.remainders = opts.allow_remainders;
    spec.max_count = opts.max_count;
    for (int j = 0; j < M; ++j)
      for (int k = j + 1; k < M; ++k) spec.edges.push_back({j, k});
    spec.lo.assign(spec.edges.size(), 0);
    for (const auto& [edge, b] : opts.min_beta)
      spec.lo[edge_index(edge.first, edge.second, M)] = b;
    spec.cross.assign(spec.edges.size(), 0);
    if (!opts.cross_side.empty())
      for (int e = 0; e < static_cast<int>(spec.edges.size()); ++e) {
        auto [j, k] = spec.edges[e];
        if (opts.cross_side[j] != opts.cross_side[k]) {
          spec.cross[e] = 1;
          spec.last_cross = e;
        }
      }
    std::vector<int> rem = q, beta(spec.edges.size(), 0);
    dfs(spec, 0, 0, rem, beta, *result);
  }
  auto [pos, inserted] = cache.emplace(key, std::move(result));
  return *pos->second;
}

double product_moment(const std::vector<int>& q,
                      const std::vector<double>& corr) {
  return eval_product_moment(q, corr, DiagramOptions{});
}

BigRational product_moment_exact(const std::vector<int>& q,
                                 const std::vector<BigRational>& corr) {
  return eval_product_moment(q, corr, DiagramOptions{});
}

double hermite_product_cov(const std::array<int, 4>& orders,
                           const std::vector<double>& corr) {
  DiagramOptions opts;
  opts.cross_side = {0, 0, 1, 1};
  return eval_product_moment(
      {orders[0], orders[1], orders[2], orders[3]}, corr, opts);
}

double exact_var_DFu(const hermite::HermiteSeries& s,
                     const paths::CovarianceModel& model, long long n,
                     bool literal_reference) {
  if (n < 1) throw ConfigError("sample size must be positive");
  int N = series_degree(s);
  if (N > 8)
    throw ConfigError("inner-product variance supports series degree <= 8");
  if (literal_reference && n > 64)
    throw BudgetError("literal 4-fold reference loop capped at n = 64");
  if (!literal_reference && n > 4096)
    throw BudgetError("lag-reduced variance capped at n = 4096");
  if (N < 1) return 0.0;

  auto terms = var_terms(s, N);
  if (terms.empty()) return 0.0;
  int pmax = 0;
  for (const auto& t : terms) pmax = std::max(pmax, *std::max_element(t.e.begin(), t.e.end()));

  // extended-precision accumulation: the sums run over up to n^4 products
  // with heavy cancellation, and the reduced and literal paths must agree
  // far below the double roundoff of a naive accumulation
  long double total = 0.0L, gross = 0.0L;
  if (literal_reference) {
    auto rp = rho_power_table(model, n - 1, pmax);
    const int W = pmax + 1;
    for (long long i1 = 0; i1 < n; ++i1)
      for (long long i2 = 0; i2 < n; ++i2)
        for (long long i3 = 0; i3 < n; ++i3)
          for (long long i4 = 0; i4 < n; ++i4) {
            const double* r12 = &rp[std::llabs(i1 - i2) * W];
            const double* r13 = &rp[std::llabs(i1 - i3) * W];
            const double* r14 = &rp[std::llabs(i1 - i4) * W];
            const double* r23 = &rp[std::llabs(i2 - i3) * W];
            const double* r24 = &rp[std::llabs(i2 - i4) * W];
            const double* r34 = &rp[std::llabs(i3 - i4) * W];
            for (const auto& t : terms) {
              double p = t.coef * r12[t.e[0]] * r13[t.e[1]] * r14[t.e[2]] *
                         r23[t.e[3]] * r24[t.e[4]] * r34[t.e[5]];
              total += p;
              gross += std::abs(p);
            }
          }
  } else {
    long long L =
        std::min<long long>(n - 1, paths::effective_lag_cutoff(model, n - 1));
    // only lag triples whose index tuples fit inside [0, n) contribute;
    // the t-window below is exactly that set, so count it for the budget
    auto t_window = [&](long long k1, long long d34) {
      long long a = std::min<long long>(0, k1), b = std::max<long long>(0, k1);
      long long c = std::min<long long>(0, d34), d = std::max<long long>(0, d34);
      long long tlo = std::max(-3 * L, b - c - n + 1);
      long long thi = std::min(3 * L, a - d + n - 1);
      return std::pair<long long, long long>(tlo, thi);
    };
    double productive = 0.0;
    for (long long k1 = -L; k1 <= L; ++k1)
      for (long long d34 = -L; d34 <= L; ++d34) {
        auto [tlo, thi] = t_window(k1, d34);
        if (thi >= tlo) productive += static_cast<double>(thi - tlo + 1);
      }
    if (productive * static_cast<double>(terms.size()) > 5e9)
      throw BudgetError("lag-reduced variance cost too large for this model");
    auto rp = rho_power_table(model, 5 * L, pmax);
    const int W = pmax + 1;
    for (long long k1 = -L; k1 <= L; ++k1) {
      const double* r12 = &rp[std::llabs(k1) * W];
      for (long long d34 = -L; d34 <= L; ++d34) {
        const double* r34 = &rp[std::llabs(d34) * W];
        auto [tlo, thi] = t_window(k1, d34);
        for (long long t = tlo; t <= thi; ++t) {
          long long mx = std::max({static_cast<long long>(0), k1, t, t + d34});
          long long mn = std::min({static_cast<long long>(0), k1, t, t + d34});
          long long w = n - (mx - mn);
          const double* r13 = &rp[std::llabs(t) * W];
          const double* r14 = &rp[std::llabs(t + d34) * W];
          const double* r23 = &rp[std::llabs(t - k1) * W];
          const double* r24 = &rp[std::llabs(t + d34 - k1) * W];
          long double acc = 0.0L, gacc = 0.0L;
          for (const auto& tm : terms) {
            double p = tm.coef * r12[tm.e[0]] * r13[tm.e[1]] * r14[tm.e[2]] *
                       r23[tm.e[3]] * r24[tm.e[4]] * r34[tm.e[5]];
            acc += p;
            gacc += std::abs(p);
          }
          total += static_cast<long double>(w) * acc;
          gross += static_cast<long double>(w) * gacc;
        }
      }
    }
  }
  long double n2 =
      static_cast<long double>(n) * static_cast<long double>(n);
  return finalize_variance(static_cast<double>(total / n2),
                           static_cast<double>(gross / n2));
}

double exact_third_moment(const hermite::HermiteSeries& s,
                          const paths::CovarianceModel& model, long long n) {
  if (n < 1) throw ConfigError("sample size must be positive");
  if (n > 4096) throw BudgetError("third moment capped at n = 4096");
  int N = series_degree(s);
  if (N < 1) return 0.0;

  std::vector<int> qs;
  for (int q = 1; q <= N; ++q)
    if (s.c(q) != 0.0) qs.push_back(q);
  std::map<std::array<int, 3>, double> merged;
  for (int q1 : qs)
    for (int q2 : qs)
      for (int q3 : qs) {
        const auto& ds = enumerate_diagrams({q1, q2, q3});
        if (ds.empty()) continue;
        double base = s.c(q1) * s.c(q2) * s.c(q3);
        for (const auto& d : ds)
          merged[{d.beta[0], d.beta[1], d.beta[2]}] +=
              base * d.weight.convert_to<double>();
      }
  if (merged.empty()) return 0.0;
  std::vector<VarTerm> terms;
  int pmax = 0;
  for (const auto& [e, c] : merged)
    if (c != 0.0) {
      terms.push_back({{e[0], e[1], e[2], 0, 0, 0}, c});
      pmax = std::max({pmax, e[0], e[1], e[2]});
    }

  long long L =
      std::min<long long>(n - 1, paths::effective_lag_cutoff(model, n - 1));
  long long kmax = std::min(2 * L, n - 1);
  auto k2_window = [&](long long k1) {
    long long lo = std::max(-2 * L, std::max<long long>(0, k1) - n + 1);
    long long hi = std::min(2 * L, std::min<long long>(0, k1) + n - 1);
    return std::pair<long long, long long>(lo, hi);
  };
  double productive = 0.0;
  for (long long k1 = -kmax; k1 <= kmax; ++k1) {
    auto [lo, hi] = k2_window(k1);
    if (hi >= lo) productive += static_cast<double>(hi - lo + 1);
  }
  if (productive * static_cast<double>(terms.size()) > 2e9)
    throw BudgetError("lag-reduced third moment cost too large for this model");
  auto rp = rho_power_table(model, 4 * L, pmax);
  const int W = pmax + 1;
  double total = 0.0;
  for (long long k1 = -kmax; k1 <= kmax; ++k1) {
    const double* r12 = &rp[std::llabs(k1) * W];
    auto [lo, hi] = k2_window(k1);
    for (long long k2 = lo; k2 <= hi; ++k2) {
      long long mx = std::max({static_cast<long long>(0), k1, k2});
      long long mn = std::min({static_cast<long long>(0), k1, k2});
      long long w = n - (mx - mn);
      const double* r13 = &rp[std::llabs(k2) * W];
      const double* r23 = &rp[std::llabs(k2 - k1) * W];
      double acc = 0.0;
      for (const auto& tm : terms)
        acc += tm.coef * r12[tm.e[0]] * r13[tm.e[1]] * r23[tm.e[2]];
      total += w * acc;
    }
  }
  return total / std::pow(static_cast<double>(n), 1.5);
}

double A_n_beta(const paths::CovarianceModel& model, long long n, int M,
                const std::map<std::pair<int, int>, int>& beta,
                double norm_exponent) {
  if (M < 2 || M > 8) throw ConfigError("lag sums support 2 to 8 slots");
  if (n < 1) throw ConfigError("sample size must be positive");
  std::vector<EdgeSpec> edges;
  for (const auto& [edge, b] : beta) {
    if (edge.first < 0 || edge.second <= edge.first || edge.second >= M)
      throw ConfigError("edge out of range");
    if (b < 0) throw ConfigError("edge multiplicities must be nonnegative");
    if (b > 0) edges.push_back({edge.first, edge.second, b});
  }

  // connected components of the shape graph
  std::vector<std::vector<int>> adj(M);
  for (const auto& e : edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::vector<int> comp(M, -1);
  int ncomp = 0;
  for (int v = 0; v < M; ++v) {
    if (comp[v] >= 0 || adj[v].empty()) continue;
    std::vector<int> stack = {v};
    comp[v] = ncomp;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : adj[u])
        if (comp[w] < 0) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
    }
    ++ncomp;
  }
  int isolated = 0;
  for (int v = 0; v < M; ++v)
    if (adj[v].empty()) ++isolated;

  long long L =
      std::min<long long>(n - 1, paths::effective_lag_cutoff(model, n - 1));
  double total = std::pow(static_cast<double>(n), isolated);
  for (int c = 0; c < ncomp; ++c) {
    std::vector<int> verts;
    for (int v = 0; v < M; ++v)
      if (comp[v] == c) verts.push_back(v);
    std::vector<EdgeSpec> ce;
    for (const auto& e : edges)
      if (comp[e.a] == c) ce.push_back(e);
    const size_t vcount = verts.size();
    bool all_deg2 = true;
    for (int v : verts)
      if (adj[v].size() != 2) all_deg2 = false;
    if (ce.size() == vcount - 1) {
      if (static_cast<double>(vcount) * n > 1.5e8)
        throw BudgetError("tree reduction would need too much memory");
      if (static_cast<double>(ce.size()) * n * (2.0 * L + 1) > 5e9)
        throw BudgetError("tree reduction would cost too many operations");
      total *= tree_component_sum(model, n, L, verts, ce);
    } else if (ce.size() == vcount && all_deg2) {
      total *= cycle_component_sum(model, n, L, verts, ce);
    } else {
      long long cap = vcount <= 6 ? 64 : 24;
      if (n > cap)
        throw BudgetError("irregular diagram shape needs the literal loop, "
                          "capped at n = " + std::to_string(cap));
      total *= literal_component_sum(model, n, verts, ce);
    }
  }
  return total / std::pow(static_cast<double>(n), norm_exponent);
}

std::vector<IneqPoint> summation_inequality_check(
    const std::function<double(long long)>& f, int M, int variant,
    const std::vector<int>& v, const std::vector<int>& w,
    const std::vector<long long>& K_grid) {
  if (M < 1 || M > 4)
    throw ConfigError("summation trace supports 1 to 4 coordinates");
  if (variant < 1 || variant > 3) throw ConfigError("variant must be 1, 2 or 3");
  if (static_cast<int>(v.size()) != M)
    throw ConfigError("v must have one component per coordinate");
  for (int x : v)
    if (x < -1 || x > 1) throw ConfigError("v components must be in {-1,0,1}");
  if (variant == 1)
    for (int x : v)
      if (x == 0) throw ConfigError("variant 1 requires all v components nonzero");
  if (variant != 3 && !w.empty())
    throw ConfigError("w is only used by variant 3");
  if (variant == 3) {
    if (M < 3) throw ConfigError("variant 3 requires at least 3 coordinates");
    if (static_cast<int>(w.size()) != M)
      throw ConfigError("w must have one component per coordinate");
    bool vzero = true, wzero = true, eq = true, neg = true;
    for (int j = 0; j < M; ++j) {
      if (w[j] < -1 || w[j] > 1)
        throw ConfigError("w components must be in {-1,0,1}");
      if (v[j] != 0) vzero = false;
      if (w[j] != 0) wzero = false;
      if (v[j] != w[j]) eq = false;
      if (v[j] != -w[j]) neg = false;
    }
    if (vzero || wzero || eq || neg)
      throw ConfigError("variant 3 requires linearly independent v and w");
  }

  std::vector<IneqPoint> out;
  for (long long K : K_grid) {
    if (K < 0) throw ConfigError("grid points must be nonnegative");
    FCache fc(f, static_cast<long long>(M) * K + 1);
    double S1 = 0.0, S1p = 0.0;
    for (long long k = -K; k <= K; ++k) {
      S1 += fc(k);
      S1p += std::pow(fc(k), 1.0 + 1.0 / M);
    }
    double lhs = 0.0;
    int zeros = 0;
    if (variant != 3) {
      GridFn acc;
      for (int j = 0; j < M; ++j) {
        if (v[j] == 0)
          ++zeros;
        else
          acc = convolve(acc, sign_atom(fc, K, v[j]));
      }
      for (long long a = acc.lo; a <= acc.hi(); ++a)
        lhs += acc.v[a - acc.lo] * fc(a);
      lhs *= std::pow(S1, zeros);
    } else {
      GridFn u, t, ss, so;
      for (int j = 0; j < M; ++j) {
        if (v[j] == 0 && w[j] == 0)
          ++zeros;
        else if (w[j] == 0)
          u = convolve(u, sign_atom(fc, K, v[j]));
        else if (v[j] == 0)
          t = convolve(t, sign_atom(fc, K, w[j]));
        else if (v[j] == w[j])
          ss = convolve(ss, sign_atom(fc, K, v[j]));
        else
          so = convolve(so, sign_atom(fc, K, v[j]));
      }
      // a = x + z1 + z2 and b = y + z1 - z2 with x ~ u, y ~ t, z1 ~ ss, z2 ~ so
      long long clo = ss.lo + so.lo, chi = ss.hi() + so.hi();
      long long dlo = ss.lo - so.hi(), dhi = ss.hi() - so.lo;
      std::vector<double> U(chi - clo + 1, 0.0), T(dhi - dlo + 1, 0.0);
      for (long long zc = clo; zc <= chi; ++zc) {
        double sum = 0.0;
        for (long long x = u.lo; x <= u.hi(); ++x)
          sum += u.v[x - u.lo] * fc(x + zc);
        U[zc - clo] = sum;
      }
      for (long long zd = dlo; zd <= dhi; ++zd) {
        double sum = 0.0;
        for (long long y = t.lo; y <= t.hi(); ++y)
          sum += t.v[y - t.lo] * fc(y + zd);
        T[zd - dlo] = sum;
      }
      for (long long z1 = ss.lo; z1 <= ss.hi(); ++z1) {
        double s1v = ss.v[z1 - ss.lo];
        if (s1v == 0.0) continue;
        for (long long z2 = so.lo; z2 <= so.hi(); ++z2)
          lhs += s1v * so.v[z2 - so.lo] * U[z1 + z2 - clo] * T[z1 - z2 - dlo];
      }
      lhs *= std::pow(S1, zeros);
    }
    double rhs = variant == 1   ? std::pow(S1p, M)
                 : variant == 2 ? std::pow(S1, M - 1)
                                : std::pow(S1, M - 2);
    out.push_back({K, lhs, rhs, lhs / rhs});
  }
  return out;
}

nlohmann::ordered_json diagrams_to_json(const std::vector<Diagram>& diagrams,
                                        int M) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& d : diagrams) {
    nlohmann::ordered_json entry;
    nlohmann::ordered_json beta = nlohmann::ordered_json::array();
    int e = 0;
    for (int j = 0; j < M; ++j)
      for (int k = j + 1; k < M; ++k, ++e)
        if (d.beta[e] > 0) beta.push_back({j, k, d.beta[e]});
    entry["beta"] = beta;
    entry["C_num"] = boost::multiprecision::numerator(d.weight).str();
    entry["C_den"] = boost::multiprecision::denominator(d.weight).str();
    if (!d.gamma.empty()) entry["gamma"] = d.gamma;
    arr.push_back(entry);
  }
  return arr;
}

}  // namespace bmlab::diagrams
