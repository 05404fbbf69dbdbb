#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bmlab/covariance.hpp"

namespace bmlab::hermite {

// Finite expansion sum_q c_q H_q in probabilists' Hermite polynomials
// (H0=1, H1=x, H_{q+1} = x H_q - q H_{q-1}; orthogonal against the standard
// gaussian measure with E[H_q^2] = q!). Note the sqrt(2) pitfall: these are
// He_q, not the physicists' H_q; He_q(x) = 2^{-q/2} H_q^{phys}(x/sqrt(2)).
struct HermiteSeries {
  std::vector<double> coeffs;  // index q = 0..qmax
  int rank = 0;                // smallest q >= 1 with c_q != 0; 0 for constants

  int qmax() const { return static_cast<int>(coeffs.size()) - 1; }
  double c(int q) const { return (q >= 0 && q <= qmax()) ? coeffs[static_cast<std::size_t>(q)] : 0.0; }
  double l2_norm_sq() const;  // sum_q q! c_q^2

  static HermiteSeries from_coeffs(std::vector<double> c);
};

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite rule against the standard gaussian weight (weights sum to 1).
// Cached per order; Golub-Welsch on the symmetric Jacobi matrix.
const Quadrature& gauss_hermite(int order);

// E[h(Z)], Z ~ N(0,1), by composite Gauss-Legendre over [-half_range, half_range].
// Converges at machine precision for piecewise-smooth h (quadrature route for
// integrands with kinks, where a single Gauss-Hermite rule stalls).
double gauss_expect(const std::function<double(double)>& h, double half_range = 13.0,
                    int panels = 64, int nodes_per_panel = 64);

double eval_hermite(int q, double x, int max_q = 64);
double eval_series(const HermiteSeries& s, double x);

struct ProjectInfo {
  double tail_mass = 0.0;  // estimate of sum_{q>Q_max} q! c_q^2
  std::string warning;     // nonempty if tail mass exceeds tolerance
};

// c_q = E[f(Z) H_q(Z)] / q! by Gauss-Hermite quadrature. quad_order <= 0
// selects the default 2*Q_max + 8. Throws RankError when every coefficient
// with q >= 1 is below the detection tolerance and require_rank is set.
HermiteSeries project(const std::function<double(double)>& f, int Q_max, int quad_order = -1,
                      ProjectInfo* info = nullptr, bool require_rank = true,
                      double tail_rel_tol = 1e-6);

HermiteSeries shift_T(const HermiteSeries& s, int k);  // valid for 1 <= k <= rank
HermiteSeries abs_op_A(const HermiteSeries& s);
HermiteSeries derivative(const HermiteSeries& s, int order);

struct SigmaSq {
  double value = 0.0;
  double tail_abs = 0.0;  // |last lag shell| of the rank-d sum, saturation proxy
  bool summable = true;   // false when S_d shows no saturation on the cutoff scale
};

// sigma^2 = sum_{q>=d} q! c_q^2 sum_{|k|<=lag_cutoff} rho(k)^q. Throws
// NormalizationError when the partial sum is <= 0 within tolerance.
SigmaSq sigma_sq(const HermiteSeries& s, const paths::CovarianceModel& model, long long lag_cutoff);

// Exact Hermite coefficients of (s truncated at N)^M via successive
// linearized products. Large orders accumulate in log space with sign
// tracking; throws NumericalError if a coefficient overflows the double range.
// force_log_space routes small products through the log accumulator too
// (cross-validation of the two arithmetic paths).
HermiteSeries truncated_power(const HermiteSeries& s, int M, int N, bool force_log_space = false);

struct CriterionTrace {
  enum class Class { Saturating, Growing };
  std::vector<double> terms;         // t_q = |c_q| q^{ell/2-1/4} sqrt(q!) (M-1)^{q/2}
  std::vector<double> partial_sums;  // running sums of terms
  Class classification = Class::Saturating;
};

// Growth diagnostic for the derivative-regularity series. The input is read
// as a truncation sample of an infinite expansion: the trace is Saturating
// when every ratio of consecutive nonzero terms among the last few observed
// is below 1 with margin, Growing otherwise. Requires M >= 3, ell >= 0.
CriterionTrace lemma33_criterion(const HermiteSeries& s, int ell, int M);

// Built-in functions: "H<q>" (e.g. "H2"), "x^2", "abs" (|x| - sqrt(2/pi)),
// "abspow:<p>" (|x|^p - E|Z|^p). abs/abspow use closed-form coefficients
// (Gauss-Hermite projection of kinked integrands converges too slowly to be a
// reference); Q_max caps the expansion order.
HermiteSeries catalog(const std::string& name, int Q_max);

std::string series_to_json(const HermiteSeries& s);
HermiteSeries series_from_json(const std::string& text);

}  // namespace bmlab::hermite
