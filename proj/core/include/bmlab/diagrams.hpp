#pragma once

#include <array>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "bmlab/covariance.hpp"
#include "bmlab/hermite.hpp"

namespace bmlab::diagrams {

using BigRational = boost::multiprecision::cpp_rational;

// One pairing pattern between M slots of given degrees.  beta holds the strict
// upper triangle of the symmetric edge-multiplicity matrix, flattened
// row-major: (0,1), (0,2), ..., (0,M-1), (1,2), ...  In the default mode the
// incident multiplicities of every slot sum to its degree exactly; with
// remainders enabled, gamma[i] >= 0 holds the unpaired degree of slot i and
// the weight picks up the extra 1/gamma_i! factors.
struct Diagram {
  std::vector<int> beta;
  std::vector<int> gamma;  // empty when remainders are disabled
  BigRational weight;      // prod(q_i!) / (prod(beta_jk!) * prod(gamma_i!))
};

struct DiagramOptions {
  bool allow_remainders = false;
  // 0/1 side label per slot; when nonempty, keep only diagrams with at least
  // one edge between the two sides
  std::vector<int> cross_side;
  std::map<std::pair<int, int>, int> min_beta;  // per-edge lower bounds
  long long max_count = 2'000'000;
};

// position of edge (j,k), j < k, in the flattened upper triangle
inline int edge_index(int j, int k, int M) {
  return j * M - j * (j + 1) / 2 + (k - j - 1);
}

// Exhaustive depth-first enumeration in ascending lexicographic order of the
// flattened beta vector, with degree-feasibility pruning.  Results are
// memoized per (degrees, options) for the lifetime of the process; the
// returned reference stays valid.  Degrees with odd total give an empty list
// in the default mode.  Throws ConfigError for M > 8, degrees outside
// [0, 12], or malformed options; BudgetError when the family exceeds
// max_count.
const std::vector<Diagram>& enumerate_diagrams(const std::vector<int>& q,
                                               const DiagramOptions& opts = {});

// E[prod_i H_{q_i}(X_i)] for jointly Gaussian unit-variance X with the given
// correlation matrix (row-major M x M, symmetric, unit diagonal): the diagram
// sum of C_{q,beta} * prod corr^beta.
double product_moment(const std::vector<int>& q, const std::vector<double>& corr);
BigRational product_moment_exact(const std::vector<int>& q,
                                 const std::vector<BigRational>& corr);

// Cov(H_{p0}(X_0) H_{p1}(X_1), H_{p2}(X_2) H_{p3}(X_3)): the 4-slot diagram
// sum restricted to patterns with at least one edge across the {0,1}|{2,3}
// cut, which is exactly the full moment minus the disconnected product.
double hermite_product_cov(const std::array<int, 4>& orders,
                           const std::vector<double>& corr);

// Exact variance of the Malliavin inner product <DF_n, u_n> for the series
// truncated at degree N <= 8 under the given covariance model.  The default
// route rewrites the 4-fold index sum over lag variables with multiplicity
// weights, costing O(L^3) per diagram term where L is the effective lag
// cutoff; set literal_reference for the direct 4-fold loop (n <= 64).
// Throws BudgetError beyond n = 4096 (reduced), n = 64 (literal), or when
// the lag-space volume is impractically large.
double exact_var_DFu(const hermite::HermiteSeries& s,
                     const paths::CovarianceModel& model, long long n,
                     bool literal_reference = false);

// Exact E[F_n^3] for F_n = n^{-1/2} sum_i g(X_i), g given by the series with
// its constant term ignored.  Lag-reduced; n <= 4096.
double exact_third_moment(const hermite::HermiteSeries& s,
                          const paths::CovarianceModel& model, long long n);

// Normalized absolute-correlation lag sum
//   n^{-expo} * sum over (i_1..i_M) in [0,n)^M of prod |rho(i_j - i_k)|^beta_jk.
// Trees (and forests) reduce to banded convolutions, single cycles to banded
// Toeplitz traces; any other shape runs the literal M-fold loop, capped at
// n <= 64 for M <= 6 and n <= 24 for M in {7,8}.  Isolated slots contribute a
// factor n each.
double A_n_beta(const paths::CovarianceModel& model, long long n, int M,
                const std::map<std::pair<int, int>, int>& beta,
                double norm_exponent);

struct IneqPoint {
  long long K = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

// Truncated-grid trace of the convolution-type summation inequalities.  LHS
// sums f(k.v) [variant 3: f(k.v) f(k.w)] * prod_j f(k_j) over |k_j| <= K;
// RHS is (sum |k|<=K f^{1+1/M})^M for variant 1, (sum f)^{M-1} for variant 2,
// (sum f)^{M-2} for variant 3.  Components of v (and w) must lie in
// {-1,0,1}; variant 1 requires all nonzero, variant 3 requires M >= 3 and
// v, w linearly independent.  The constant in the inequality is unspecified,
// so the trace is diagnostic: ratios should stay bounded as K grows.
std::vector<IneqPoint> summation_inequality_check(
    const std::function<double(long long)>& f, int M, int variant,
    const std::vector<int>& v, const std::vector<int>& w,
    const std::vector<long long>& K_grid);

// Debug dump: list of {beta: [[j,k,b]], C_num, C_den}, plus gamma for
// remainder-mode diagrams.
nlohmann::ordered_json diagrams_to_json(const std::vector<Diagram>& diagrams,
                                        int M);

}  // namespace bmlab::diagrams
