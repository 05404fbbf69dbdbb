#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmlab/covariance.hpp"
#include "bmlab/hermite.hpp"
#include "bmlab/paths.hpp"

namespace bmlab::malliavin {

// Per-replicate inner products between derivatives of F_n = n^{-1/2} sum g(X_i)
// and the lowest-chaos helper directions built from the same path.  All of
// these factor through lag convolutions, so the cost is O(n L) per replicate
// where L is the effective lag cutoff of the covariance model.
//
// inner_DF_u:    (1/n)       sum_{i,j}   g'(X_i)  g_1(X_j)               rho(i-j)
// inner_D2F_v:   (1/n)       sum_{i,j}   g''(X_i) g_2(X_j)               rho(i-j)^2
// inner_DFxDF_v: n^{-3/2}    sum_{i,j,k} g'(X_i)  g'(X_j)  g_2(X_k)      rho(i-k) rho(j-k)
//
// g_k denotes the series with every coefficient shifted down k chaos levels
// (shift_T applied k times).  inner_DF_u requires rank >= 1, the other two
// require rank >= 2; violations raise RankError.
//
// literal_reference switches inner_DF_u to the direct O(n^2) double loop for
// cross-checking; it refuses n > 512 with BudgetError.
std::vector<double> inner_DF_u(const paths::PathEnsemble& paths,
                               const hermite::HermiteSeries& s,
                               const paths::CovarianceModel& model,
                               bool literal_reference = false, int threads = 1);
std::vector<double> inner_D2F_v(const paths::PathEnsemble& paths,
                                const hermite::HermiteSeries& s,
                                const paths::CovarianceModel& model,
                                int threads = 1);
std::vector<double> inner_DFxDF_v(const paths::PathEnsemble& paths,
                                  const hermite::HermiteSeries& s,
                                  const paths::CovarianceModel& model,
                                  int threads = 1);

// Iterated directional derivatives D^2_u F (order 2) and D^3_u F (order 3)
// along u = n^{-1/2} sum g_1(X_j) e_j.  Both factor into banded convolutions;
// order 2 accepts n <= 1024 and order 3 accepts n <= 256, beyond which a
// BudgetError asks for a smaller n.  Other orders raise ConfigError.
std::vector<double> iterated_D(const paths::PathEnsemble& paths,
                               const hermite::HermiteSeries& s,
                               const paths::CovarianceModel& model, int order,
                               int threads = 1);

enum class Prop { tv, tv_iterated, w };

struct TermEstimate {
  double value = 0.0;
  double se = 0.0;
};

// Monte Carlo estimate of one distance bound, assembled from the functional
// vectors above after rescaling F to unit exact variance.  total combines the
// terms with the bound's constants; total_se propagates the per-term standard
// errors through that combination.  functional_budget counts R times the
// number of distinct functional vectors that were evaluated.
//
// Term names by proposition:
//   tv:          var_DFu                                  total = 2 sqrt(var)
//   w:           var_D2Fv, E_absDFxDF
//   tv_iterated: var_DFu, abs_EF3, term_ED2u2, term_EDu2, E_absD3u
// term_EDu2 is reported for diagnosis only (it concentrates near 1 and would
// make the bound vacuous); the iterated total uses term_ED2u2.
struct BoundEstimate {
  std::map<std::string, TermEstimate> terms;
  double total = 0.0;
  double total_se = 0.0;
  long long n = 0;
  long long R = 0;
  std::uint64_t seed = 0;
  long long functional_budget = 0;

  nlohmann::ordered_json to_json() const;
};

BoundEstimate stein_bound_estimates(const paths::PathEnsemble& paths,
                                    const hermite::HermiteSeries& s,
                                    const paths::CovarianceModel& model,
                                    Prop which, int threads = 1);

}  // namespace bmlab::malliavin
