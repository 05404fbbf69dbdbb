#include "bmlab/covariance.hpp"

#include <cmath>
#include <sstream>

#include "bmlab/errors.hpp"

namespace bmlab::paths {

CovarianceModel CovarianceModel::iid() {
  CovarianceModel m;
  m.family_ = Family::Iid;
  return m;
}

CovarianceModel CovarianceModel::ar1(double r) {
  if (!(std::fabs(r) < 1.0)) throw ConfigError("ar1 needs |r| < 1");
  CovarianceModel m;
  m.family_ = Family::Ar1;
  m.param_ = r;
  return m;
}

CovarianceModel CovarianceModel::fgn_increment(double H) {
  if (!(H > 0.0 && H < 1.0)) throw ConfigError("fgn_increment needs 0 < H < 1");
  CovarianceModel m;
  m.family_ = Family::FgnIncrement;
  m.param_ = H;
  return m;
}

CovarianceModel CovarianceModel::power_tail(double alpha, long long table_cutoff) {
  if (!(alpha > 0.0)) throw ConfigError("power_tail needs alpha > 0");
  if (table_cutoff < 0) throw ConfigError("power_tail cutoff must be >= 0");
  CovarianceModel m;
  m.family_ = Family::PowerTail;
  m.param_ = alpha;
  m.table_cutoff_ = table_cutoff;
  return m;
}

CovarianceModel CovarianceModel::custom(std::vector<double> table) {
  if (table.empty()) throw ConfigError("custom covariance table is empty");
  if (table[0] != 1.0) throw ConfigError("custom covariance table must start with rho(0) = 1");
  for (double v : table)
    if (!(std::fabs(v) <= 1.0)) throw ConfigError("custom covariance entries must satisfy |rho| <= 1");
  CovarianceModel m;
  m.family_ = Family::Custom;
  m.table_ = std::move(table);
  return m;
}

double CovarianceModel::rho(long long k) const {
  const long long a = k < 0 ? -k : k;
  switch (family_) {
    case Family::Iid:
      return a == 0 ? 1.0 : 0.0;
    case Family::Ar1:
      return a == 0 ? 1.0 : std::pow(param_, static_cast<double>(a));
    case Family::FgnIncrement: {
      if (a == 0) return 1.0;
      const double twoH = 2.0 * param_;
      const double ka = static_cast<double>(a);
      return 0.5 * (std::pow(ka + 1.0, twoH) - 2.0 * std::pow(ka, twoH) + std::pow(ka - 1.0, twoH));
    }
    case Family::PowerTail:
      if (table_cutoff_ > 0 && a > table_cutoff_) return 0.0;
      return std::pow(1.0 + static_cast<double>(a), -param_);
    case Family::Custom:
      return a < static_cast<long long>(table_.size()) ? table_[static_cast<std::size_t>(a)] : 0.0;
  }
  return 0.0;
}

std::string CovarianceModel::name() const {
  std::ostringstream os;
  switch (family_) {
    case Family::Iid:
      os << "iid";
      break;
    case Family::Ar1:
      os << "ar1(r=" << param_ << ")";
      break;
    case Family::FgnIncrement:
      os << "fgn_increment(H=" << param_ << ")";
      break;
    case Family::PowerTail:
      os << "power_tail(alpha=" << param_;
      if (table_cutoff_ > 0) os << ", cutoff=" << table_cutoff_;
      os << ")";
      break;
    case Family::Custom:
      os << "custom(" << table_.size() << " lags)";
      break;
  }
  return os.str();
}

double summability(const CovarianceModel& model, double p, long long n) {
  if (!(p > 0.0)) throw ConfigError("summability exponent must be positive");
  if (n < 0) throw ConfigError("summability range must be >= 0");
  double acc = 1.0;  // k = 0 shell, |rho(0)| = 1
  for (long long k = 1; k <= n; ++k) {
    const double r = std::fabs(model.rho(k));
    if (r == 0.0) continue;
    acc += 2.0 * std::pow(r, p);
  }
  return acc;
}

SummabilityDiag summability_diag(const CovarianceModel& model, double p, long long n, double tol) {
  SummabilityDiag d;
  d.value = summability(model, p, n);
  const double twice = summability(model, p, 2 * n);
  d.saturated = std::fabs(twice - d.value) <= tol * std::max(1.0, d.value);
  return d;
}

long long effective_lag_cutoff(const CovarianceModel& model, long long n_cap, double tol) {
  if (n_cap < 0) throw ConfigError("lag cap must be >= 0");
  // exact-support families first: the answer is the support edge
  if (model.family() == CovarianceModel::Family::Iid) return 0;
  if (model.family() == CovarianceModel::Family::Custom) {
    long long last = 0;
    const auto& t = model.table();
    for (long long k = 1; k < static_cast<long long>(t.size()); ++k)
      if (std::fabs(t[static_cast<std::size_t>(k)]) > tol) last = k;
    return std::min(last, n_cap);
  }
  // ar1 / fgn / power_tail all have |rho| nonincreasing on k >= 1, so the
  // crossing can be bisected
  if (n_cap == 0) return 0;
  if (std::fabs(model.rho(n_cap)) > tol) return n_cap;
  if (!(std::fabs(model.rho(1)) > tol)) return 0;
  long long lo = 1, hi = n_cap;  // |rho(lo)| > tol >= |rho(hi)|
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    if (std::fabs(model.rho(mid)) > tol)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace bmlab::paths
