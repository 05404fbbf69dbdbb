#include "bmlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

#include "bmlab/diagrams.hpp"
#include "bmlab/errors.hpp"
#include "bmlab/malliavin.hpp"
#include "bmlab/metrics.hpp"
#include "bmlab/paths.hpp"
#include "bmlab/report.hpp"
#include "bmlab/rng.hpp"
#include "bmlab/special.hpp"

namespace bmlab::experiment {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

bool is_int(const ordered_json& v) {
  return v.is_number_integer() || v.is_number_unsigned();
}

long long int_field(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !is_int(j.at(key)))
    bad(std::string(key) + " must be an integer");
  return j.at(key).get<long long>();
}

double num_field(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    bad(std::string("model.") + key + " must be a number");
  return j.at(key).get<double>();
}

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// per-n substream of the config seed; keeps grid points independent while
// staying a pure function of (seed, n)
std::uint64_t seed_for(std::uint64_t seed, long long n) {
  return mix64(seed ^ (static_cast<std::uint64_t>(n) * 0x9e3779b97f4a7c15ULL));
}

FunctionSpec parse_function(const ordered_json& j) {
  if (!j.contains("function") || !j.at("function").is_object())
    bad("function must be an object with one of catalog, coeffs, file");
  const auto& f = j.at("function");
  FunctionSpec spec;
  int picked = 0;
  if (f.contains("catalog")) {
    if (!f.at("catalog").is_string()) bad("function.catalog must be a string");
    spec.catalog = f.at("catalog").get<std::string>();
    ++picked;
  }
  if (f.contains("coeffs")) {
    if (!f.at("coeffs").is_array() || f.at("coeffs").empty())
      bad("function.coeffs must be a nonempty array");
    for (const auto& c : f.at("coeffs")) {
      if (!c.is_number()) bad("function.coeffs entries must be numbers");
      spec.coeffs.push_back(c.get<double>());
    }
    ++picked;
  }
  if (f.contains("file")) {
    if (!f.at("file").is_string()) bad("function.file must be a string");
    spec.file = f.at("file").get<std::string>();
    ++picked;
  }
  if (picked != 1) bad("function needs exactly one of catalog, coeffs, file");
  if (f.contains("qmax")) {
    if (!is_int(f.at("qmax"))) bad("function.qmax must be an integer");
    spec.qmax = f.at("qmax").get<int>();
    if (spec.qmax < 1 || spec.qmax > 64) bad("function.qmax must be in [1, 64]");
  }
  return spec;
}

ModelSpec parse_model(const ordered_json& j) {
  if (!j.contains("model") || !j.at("model").is_object())
    bad("model must be an object with a type");
  const auto& m = j.at("model");
  if (!m.contains("type") || !m.at("type").is_string())
    bad("model.type must be a string");
  ModelSpec spec;
  spec.type = m.at("type").get<std::string>();
  if (spec.type == "iid") {
  } else if (spec.type == "ar1") {
    spec.r = num_field(m, "r");
    if (!(std::abs(spec.r) < 1.0)) bad("model.r must satisfy |r| < 1");
  } else if (spec.type == "fgn") {
    spec.H = num_field(m, "H");
    if (!(spec.H > 0.0 && spec.H < 1.0)) bad("model.H must lie in (0, 1)");
  } else if (spec.type == "power_tail") {
    spec.alpha = num_field(m, "alpha");
    if (!(spec.alpha > 0.0)) bad("model.alpha must be positive");
    if (m.contains("table_cutoff")) {
      if (!is_int(m.at("table_cutoff")) || m.at("table_cutoff").get<long long>() < 0)
        bad("model.table_cutoff must be a nonnegative integer");
      spec.table_cutoff = m.at("table_cutoff").get<long>();
    }
  } else if (spec.type == "custom") {
    if (!m.contains("table") || !m.at("table").is_array() || m.at("table").empty())
      bad("model.table must be a nonempty array");
    for (const auto& v : m.at("table")) {
      if (!v.is_number()) bad("model.table entries must be numbers");
      spec.table.push_back(v.get<double>());
    }
  } else {
    bad("model.type must be one of iid, ar1, fgn, power_tail, custom");
  }
  return spec;
}

hermite::HermiteSeries truncate_series(const hermite::HermiteSeries& s, int N) {
  if (N <= 0 || s.qmax() <= N) return s;
  std::vector<double> c(s.coeffs.begin(),
                        s.coeffs.begin() + static_cast<std::size_t>(N) + 1);
  return hermite::HermiteSeries::from_coeffs(c);
}

hermite::HermiteSeries series_of(const ExperimentConfig& cfg) {
  return truncate_series(resolve_function(cfg.function), cfg.truncation_N);
}

// "d2" or "dge3"; rank 1 has no covering family and is refused
std::string family_of(const std::string& requested, int rank) {
  if (requested == "d2") {
    if (rank != 2)
      bad("bounds family d2 needs a rank 2 function, got rank " +
          std::to_string(rank));
    return "d2";
  }
  if (requested == "dge3") {
    if (rank < 3)
      bad("bounds family dge3 needs rank >= 3, got rank " +
          std::to_string(rank));
    return "dge3";
  }
  if (rank == 2) return "d2";
  if (rank >= 3) return "dge3";
  bad("no bound family covers rank " + std::to_string(rank) +
      "; a rank >= 2 function is required");
}

std::string s_label(double p) {
  // exponents used here are multiples of 1/12
  long long num = std::llround(p * 12.0);
  long long den = 12;
  long long g = std::gcd(num, den);
  num /= g;
  den /= g;
  std::string lab = "S_" + std::to_string(num);
  if (den != 1) lab += "_" + std::to_string(den);
  return lab;
}

std::vector<double> s_exponents(const std::string& family, int d) {
  std::vector<double> ps = {1.0, 4.0 / 3.0, 1.5, 2.0};
  if (family == "dge3") {
    ps.push_back(static_cast<double>(d - 1));
    ps.push_back(0.75 * d);
  }
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-12; }),
           ps.end());
  return ps;
}

std::vector<std::string> term_columns(const std::string& family) {
  if (family == "d2")
    return {"tv_term1", "tv_term2",    "w_term1",       "w_term2",
            "tv_optimal", "npy",       "hermite_term1", "hermite_term2"};
  return {"tv3_term1", "tv3_term2", "hermite_term1", "hermite_term2"};
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) bad("cannot write " + p.string());
  out << text;
}

ordered_json echo_of(const ExperimentConfig& cfg) {
  ordered_json e;
  ordered_json f;
  if (!cfg.function.catalog.empty()) f["catalog"] = cfg.function.catalog;
  if (!cfg.function.coeffs.empty()) f["coeffs"] = cfg.function.coeffs;
  if (!cfg.function.file.empty()) f["file"] = cfg.function.file;
  f["qmax"] = cfg.function.qmax;
  e["function"] = f;
  ordered_json m;
  m["type"] = cfg.model.type;
  if (cfg.model.type == "ar1") m["r"] = cfg.model.r;
  if (cfg.model.type == "fgn") m["H"] = cfg.model.H;
  if (cfg.model.type == "power_tail") {
    m["alpha"] = cfg.model.alpha;
    m["table_cutoff"] = cfg.model.table_cutoff;
  }
  if (cfg.model.type == "custom") m["table"] = cfg.model.table;
  e["model"] = m;
  e["n_grid"] = cfg.n_grid;
  e["R"] = cfg.R;
  e["seed"] = cfg.seed;
  e["truncation_N"] = cfg.truncation_N;
  e["bounds"] = cfg.bounds_family;
  e["distances"] = cfg.distances;
  e["functionals"] = cfg.functionals;
  e["out"] = cfg.out;
  return e;
}

struct GridPoint {
  long long n = 0;
  paths::PathEnsemble sim;
  double varF = 0.0;
  std::vector<double> y;  // F / sqrt(varF)
};

GridPoint grid_point(const ExperimentConfig& cfg,
                     const hermite::HermiteSeries& s,
                     const paths::CovarianceModel& model, long long n,
                     int threads) {
  GridPoint gp;
  gp.n = n;
  paths::SimulateOptions opt;
  opt.threads = threads;
  gp.sim = paths::simulate(model, n, cfg.R, seed_for(cfg.seed, n), opt);
  auto F = paths::statistic_F(gp.sim, s, threads);
  gp.varF = paths::variance_F_exact(s, model, n);
  gp.y = paths::normalize_Y(std::move(F), gp.varF);
  return gp;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
  double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace

ExperimentConfig config_from_json(const ordered_json& j) {
  if (!j.is_object()) bad("config root must be a JSON object");
  static const char* kKnown[] = {"function", "model",     "n_grid",
                                 "R",        "seed",      "truncation_N",
                                 "bounds",   "distances", "functionals",
                                 "out"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : kKnown) known = known || it.key() == k;
    if (!known) bad("unknown config key: " + it.key());
  }

  ExperimentConfig cfg;
  cfg.function = parse_function(j);
  cfg.model = parse_model(j);

  if (!j.contains("n_grid") || !j.at("n_grid").is_array() || j.at("n_grid").empty())
    bad("n_grid must be a nonempty array of integers");
  for (const auto& v : j.at("n_grid")) {
    if (!is_int(v)) bad("n_grid entries must be integers");
    long long n = v.get<long long>();
    if (n < 2) bad("n_grid entries must be at least 2");
    if (!cfg.n_grid.empty() && n <= cfg.n_grid.back())
      bad("n_grid must be strictly increasing");
    cfg.n_grid.push_back(static_cast<long>(n));
  }

  cfg.R = int_field(j, "R");
  if (cfg.R < 100) bad("R must be at least 100");

  if (!j.contains("seed"))
    bad("seed is required; runs never draw entropy from the host");
  if (!is_int(j.at("seed")) || j.at("seed").get<long long>() < 0)
    bad("seed must be a nonnegative integer");
  cfg.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("truncation_N")) {
    if (!is_int(j.at("truncation_N")) || j.at("truncation_N").get<long long>() < 0)
      bad("truncation_N must be a nonnegative integer");
    cfg.truncation_N = j.at("truncation_N").get<int>();
  }

  cfg.bounds_family = "auto";
  if (j.contains("bounds")) {
    if (!j.at("bounds").is_string()) bad("bounds must be a string");
    cfg.bounds_family = j.at("bounds").get<std::string>();
    if (cfg.bounds_family != "auto" && cfg.bounds_family != "d2" &&
        cfg.bounds_family != "dge3")
      bad("bounds must be one of auto, d2, dge3");
  }

  if (j.contains("distances")) {
    if (!j.at("distances").is_array()) bad("distances must be an array");
    std::vector<std::string> req;
    for (const auto& v : j.at("distances")) {
      if (!v.is_string()) bad("distances entries must be strings");
      auto s = v.get<std::string>();
      if (s != "w" && s != "k" && s != "tv")
        bad("distances entries must be w, k or tv");
      if (!has(req, s)) req.push_back(s);
    }
    // canonical order, independent of how the request was spelled
    for (const char* s : {"w", "k", "tv"})
      if (has(req, s)) cfg.distances.push_back(s);
  } else {
    cfg.distances = {"w", "k"};
    if (cfg.R >= 1000) cfg.distances.push_back("tv");
  }
  if (has(cfg.distances, "tv") && cfg.R < 1000)
    bad("the tv distance needs R >= 1000");

  if (j.contains("functionals")) {
    if (!j.at("functionals").is_array()) bad("functionals must be an array");
    for (const auto& v : j.at("functionals")) {
      if (!v.is_string()) bad("functionals entries must be strings");
      auto s = v.get<std::string>();
      if (s != "tv" && s != "w" && s != "tv_iterated")
        bad("functionals entries must be tv, w or tv_iterated");
      if (!has(cfg.functionals, s)) cfg.functionals.push_back(s);
    }
  } else {
    cfg.functionals = {"tv", "w"};
  }

  if (j.contains("out")) {
    if (!j.at("out").is_string()) bad("out must be a string");
    cfg.out = j.at("out").get<std::string>();
  }

  // function and model must actually resolve, and the rank must be covered
  auto s = truncate_series(resolve_function(cfg.function), cfg.truncation_N);
  if (s.rank < 1) bad("function rank must be at least 1");
  family_of(cfg.bounds_family, s.rank);
  resolve_model(cfg.model);

  cfg.echo = echo_of(cfg);
  return cfg;
}

ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot read config file: " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

hermite::HermiteSeries resolve_function(const FunctionSpec& spec) {
  if (!spec.catalog.empty()) return hermite::catalog(spec.catalog, spec.qmax);
  if (!spec.coeffs.empty())
    return hermite::HermiteSeries::from_coeffs(spec.coeffs);
  if (!spec.file.empty()) {
    std::ifstream in(spec.file, std::ios::binary);
    if (!in) bad("cannot read function file: " + spec.file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return hermite::series_from_json(ss.str());
  }
  bad("function spec is empty");
}

paths::CovarianceModel resolve_model(const ModelSpec& spec) {
  if (spec.type == "iid") return paths::CovarianceModel::iid();
  if (spec.type == "ar1") return paths::CovarianceModel::ar1(spec.r);
  if (spec.type == "fgn") return paths::CovarianceModel::fgn_increment(spec.H);
  if (spec.type == "power_tail")
    return paths::CovarianceModel::power_tail(spec.alpha, spec.table_cutoff);
  if (spec.type == "custom") return paths::CovarianceModel::custom(spec.table);
  bad("model.type must be one of iid, ar1, fgn, power_tail, custom");
}

bounds::BoundReport run_experiment(const ExperimentConfig& cfg, int threads) {
  auto s = series_of(cfg);
  auto model = resolve_model(cfg.model);
  const int d = s.rank;
  const std::string family = family_of(cfg.bounds_family, d);
  const auto ps = s_exponents(family, d);
  const bool want_w = has(cfg.distances, "w");
  const bool want_k = has(cfg.distances, "k");
  const bool want_tv = has(cfg.distances, "tv");
  const bool want_cum = cfg.R >= 1000;

  bounds::BoundReport rep;
  rep.columns.push_back("n");
  for (double p : ps) rep.columns.push_back(s_label(p));
  for (const auto& c : term_columns(family)) rep.columns.push_back(c);
  if (want_w) {
    rep.columns.push_back("d_w");
    rep.columns.push_back("d_w_se");
  }
  if (want_k) {
    rep.columns.push_back("d_k");
    rep.columns.push_back("d_k_se");
  }
  if (want_tv) {
    for (const auto& c : {"tv_lb", "tv_kde", "tv_kde_se", "tv_kde_half_bw",
                          "tv_kde_double_bw"})
      rep.columns.push_back(c);
  }
  if (want_cum) {
    for (const auto& c : {"k3", "k3_se", "k4", "k4_se"})
      rep.columns.push_back(c);
  }

  for (long long n : cfg.n_grid) {
    auto gp = grid_point(cfg, s, model, n, threads);
    std::vector<double> row;
    row.push_back(static_cast<double>(n));
    for (double p : ps) row.push_back(bounds::S_p(model, n, p));
    if (family == "d2") {
      auto tv = bounds::bound_tv_d2(model, n);
      auto w = bounds::bound_w_d2(model, n);
      auto h = bounds::bound_hermite_optimal(model, n, 2);
      row.insert(row.end(),
                 {tv.term1, tv.term2, w.term1, w.term2,
                  bounds::bound_tv_optimal_d2(model, n), bounds::bound_npy(model, n),
                  h.term1, h.term2});
    } else {
      auto tv = bounds::bound_tv_dge3(model, n, d);
      auto h = bounds::bound_hermite_optimal(model, n, d);
      row.insert(row.end(), {tv.term1, tv.term2, h.term1, h.term2});
    }
    if (want_w) {
      auto e = metrics::dist_wasserstein(gp.y);
      row.insert(row.end(), {e.value, e.se});
    }
    if (want_k) {
      auto e = metrics::dist_kolmogorov(gp.y);
      row.insert(row.end(), {e.value, e.se});
    }
    if (want_tv) {
      auto e = metrics::dist_tv(gp.y);
      row.insert(row.end(), {e.lower_bound_value, e.kde_value, e.se,
                             e.kde_half_bw, e.kde_double_bw});
    }
    if (want_cum) {
      auto e = metrics::cumulants(gp.y);
      row.insert(row.end(), {e.k3, e.k3_se, e.k4, e.k4_se});
    }
    rep.rows.push_back(std::move(row));
  }

  if (rep.rows.size() >= 4) {
    std::vector<std::string> fit_cols = term_columns(family);
    if (want_w) fit_cols.push_back("d_w");
    if (want_k) fit_cols.push_back("d_k");
    if (want_tv) {
      fit_cols.push_back("tv_lb");
      fit_cols.push_back("tv_kde");
    }
    for (const auto& col : fit_cols) {
      auto it = std::find(rep.columns.begin(), rep.columns.end(), col);
      auto ci = static_cast<std::size_t>(it - rep.columns.begin());
      std::vector<std::pair<double, double>> pts;
      bool ok = true;
      for (const auto& row : rep.rows) {
        if (!(row[ci] > 0.0)) ok = false;
        pts.emplace_back(row[0], row[ci]);
      }
      if (!ok) continue;
      auto fit = metrics::rate_fit(pts);
      rep.fits.push_back({col, fit.slope, fit.intercept, fit.ci_95});
    }
  }

  rep.config_echo = cfg.echo;
  return rep;
}

void write_artifacts(const bounds::BoundReport& rep,
                     const ExperimentConfig& cfg, const std::string& out_dir,
                     int threads,
                     const std::vector<std::pair<std::string, double>>& timings) {
  fs::path dir(out_dir);
  fs::create_directories(dir / "plots");

  write_text(dir / "report.csv", report::to_csv(rep));
  write_text(dir / "report.json", report::to_json(rep).dump(2) + "\n");

  auto series_for = [&](const std::vector<std::string>& cols) {
    std::vector<report::Series> out;
    for (const auto& col : cols) {
      auto it = std::find(rep.columns.begin(), rep.columns.end(), col);
      if (it == rep.columns.end()) continue;
      auto ci = static_cast<std::size_t>(it - rep.columns.begin());
      report::Series s;
      s.name = col;
      for (const auto& row : rep.rows) s.pts.emplace_back(row[0], row[ci]);
      out.push_back(std::move(s));
    }
    return out;
  };
  auto annotations_for = [&](const std::vector<std::string>& cols) {
    std::vector<std::string> out;
    for (const auto& f : rep.fits)
      if (has(cols, f.column)) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s slope %.2f", f.column.c_str(),
                      f.slope);
        out.emplace_back(buf);
      }
    return out;
  };

  std::vector<std::string> dist_cols = {"d_w", "d_k", "tv_lb", "tv_kde"};
  std::vector<std::string> term_cols;
  for (const auto& c : rep.columns)
    if (c.find("term") != std::string::npos || c == "tv_optimal" || c == "npy")
      term_cols.push_back(c);
  write_text(dir / "plots" / "distances.svg",
             report::svg_loglog("distance to the standard normal",
                                series_for(dist_cols),
                                annotations_for(dist_cols)));
  write_text(dir / "plots" / "bounds.svg",
             report::svg_loglog("bound terms", series_for(term_cols),
                                annotations_for(term_cols)));

  ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = cfg.seed;
  manifest["threads"] = threads;
  ordered_json tj;
  for (const auto& [name, ms] : timings) tj[name] = ms;
  manifest["timings_ms"] = tj;
  manifest["outputs"] = {"report.csv", "report.json", "plots/distances.svg",
                         "plots/bounds.svg"};
  manifest["config"] = cfg.echo;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

nlohmann::ordered_json project_summary(const ExperimentConfig& cfg) {
  auto s = series_of(cfg);
  auto model = resolve_model(cfg.model);
  ordered_json p;
  p["rank"] = s.rank;
  p["qmax"] = s.qmax();
  p["l2_norm_sq"] = s.l2_norm_sq();
  long long cutoff = paths::effective_lag_cutoff(model, 1'000'000);
  auto ss = hermite::sigma_sq(s, model, cutoff);
  p["sigma_sq"] = {{"value", ss.value},
                   {"tail_abs", ss.tail_abs},
                   {"summable", ss.summable},
                   {"lag_cutoff", cutoff}};
  p["series"] = ordered_json::parse(hermite::series_to_json(s));
  return p;
}

nlohmann::ordered_json simulate_summary(const ExperimentConfig& cfg,
                                        int threads) {
  auto s = series_of(cfg);
  auto model = resolve_model(cfg.model);
  ordered_json p;
  p["R"] = cfg.R;
  p["seed"] = cfg.seed;
  p["rows"] = ordered_json::array();
  for (long long n : cfg.n_grid) {
    paths::SimulateOptions opt;
    opt.threads = threads;
    auto sim = paths::simulate(model, n, cfg.R, seed_for(cfg.seed, n), opt);
    auto F = paths::statistic_F(sim, s, threads);
    ordered_json row;
    row["n"] = n;
    row["used_dense_fallback"] = sim.used_dense_fallback;
    row["clamped_spectrum"] = sim.clamped_spectrum;
    row["embedding_doublings"] = sim.embedding_doublings;
    row["F_mean"] = mean_of(F);
    row["F_var"] = var_of(F);
    row["F_var_exact"] = paths::variance_F_exact(s, model, n);
    std::vector<double> head(sim.row(0),
                             sim.row(0) + std::min<long long>(n, 8));
    row["head"] = head;
    p["rows"].push_back(row);
  }
  return p;
}

nlohmann::ordered_json functionals_summary(const ExperimentConfig& cfg,
                                           int threads) {
  auto s = series_of(cfg);
  auto model = resolve_model(cfg.model);
  ordered_json p;
  p["rows"] = ordered_json::array();
  for (long long n : cfg.n_grid) {
    paths::SimulateOptions opt;
    opt.threads = threads;
    auto sim = paths::simulate(model, n, cfg.R, seed_for(cfg.seed, n), opt);
    ordered_json row;
    row["n"] = n;
    ordered_json est;
    for (const auto& name : cfg.functionals) {
      malliavin::Prop which = malliavin::Prop::tv;
      if (name == "w") which = malliavin::Prop::w;
      if (name == "tv_iterated") which = malliavin::Prop::tv_iterated;
      est[name] =
          malliavin::stein_bound_estimates(sim, s, model, which, threads)
              .to_json();
    }
    row["estimates"] = est;
    p["rows"].push_back(row);
  }
  return p;
}

nlohmann::ordered_json distances_summary(const ExperimentConfig& cfg,
                                         int threads) {
  auto s = series_of(cfg);
  auto model = resolve_model(cfg.model);
  ordered_json p;
  p["rows"] = ordered_json::array();
  for (long long n : cfg.n_grid) {
    auto gp = grid_point(cfg, s, model, n, threads);
    ordered_json row;
    row["n"] = n;
    row["var_F"] = gp.varF;
    if (has(cfg.distances, "w")) {
      auto e = metrics::dist_wasserstein(gp.y);
      row["d_w"] = e.value;
      row["d_w_se"] = e.se;
    }
    if (has(cfg.distances, "k")) {
      auto e = metrics::dist_kolmogorov(gp.y);
      row["d_k"] = e.value;
      row["d_k_se"] = e.se;
    }
    if (has(cfg.distances, "tv")) {
      auto e = metrics::dist_tv(gp.y);
      row["tv_lb"] = e.lower_bound_value;
      row["tv_kde"] = e.kde_value;
      row["tv_kde_se"] = e.se;
    }
    p["rows"].push_back(row);
  }
  return p;
}

nlohmann::ordered_json bounds_summary(const ExperimentConfig& cfg) {
  auto s = series_of(cfg);
  auto model = resolve_model(cfg.model);
  const int d = s.rank;
  const std::string family = family_of(cfg.bounds_family, d);
  ordered_json p;
  p["family"] = family;
  if (cfg.model.type == "power_tail" && d == 2 && cfg.model.alpha > 0.5) {
    auto tv = bounds::rate_classifier(cfg.model.alpha, 2, bounds::Metric::tv);
    auto w = bounds::rate_classifier(cfg.model.alpha, 2, bounds::Metric::w);
    p["rate_class"] = {
        {"tv", {{"exponent", tv.exponent}, {"log_factor", tv.log_factor}}},
        {"w", {{"exponent", w.exponent}, {"log_factor", w.log_factor}}}};
  }
  p["rows"] = ordered_json::array();
  for (long long n : cfg.n_grid) {
    ordered_json row;
    row["n"] = n;
    for (double q : s_exponents(family, d))
      row[s_label(q)] = bounds::S_p(model, n, q);
    if (family == "d2") {
      auto tv = bounds::bound_tv_d2(model, n);
      auto w = bounds::bound_w_d2(model, n);
      auto h = bounds::bound_hermite_optimal(model, n, 2);
      row["tv_term1"] = tv.term1;
      row["tv_term2"] = tv.term2;
      row["w_term1"] = w.term1;
      row["w_term2"] = w.term2;
      row["tv_optimal"] = bounds::bound_tv_optimal_d2(model, n);
      row["npy"] = bounds::bound_npy(model, n);
      row["hermite_term1"] = h.term1;
      row["hermite_term2"] = h.term2;
    } else {
      auto tv = bounds::bound_tv_dge3(model, n, d);
      auto h = bounds::bound_hermite_optimal(model, n, d);
      row["tv3_term1"] = tv.term1;
      row["tv3_term2"] = tv.term2;
      row["hermite_term1"] = h.term1;
      row["hermite_term2"] = h.term2;
    }
    p["rows"].push_back(row);
  }
  return p;
}

nlohmann::ordered_json diagrams_summary(const ExperimentConfig& cfg) {
  auto s = series_of(cfg);
  auto model = resolve_model(cfg.model);
  const int d = s.rank;
  std::vector<int> q = {d, d, d};
  ordered_json p;
  p["q"] = q;
  p["moment_diagrams"] = diagrams::diagrams_to_json(
      diagrams::enumerate_diagrams(q), 3);
  diagrams::DiagramOptions ro;
  ro.allow_remainders = true;
  p["remainder_family"] =
      diagrams::diagrams_to_json(diagrams::enumerate_diagrams(q, ro), 3);
  p["exact"] = ordered_json::array();
  for (long long n : cfg.n_grid) {
    ordered_json row;
    row["n"] = n;
    row["var_DFu"] = diagrams::exact_var_DFu(s, model, n);
    row["third_moment"] = diagrams::exact_third_moment(s, model, n);
    p["exact"].push_back(row);
  }
  return p;
}

int verify_suite(const std::string& level, std::ostream& out,
                 bool corrupt_weights) {
  if (level != "fast" && level != "full")
    bad("level must be fast or full");
  int failures = 0;
  auto row = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!ok && !detail.empty()) out << "  (" << detail << ")";
    out << "\n";
    if (!ok) ++failures;
  };
  char detail[160];
  // applied to the diagram-sum side of the moment cross-check only, so a
  // deliberately corrupted weight table is caught by exactly that row
  const double fudge = corrupt_weights ? 1.0 + 1e-6 : 1.0;

  {
    // pair moments have the closed form q! rho^q, and the rank 2 triple
    // factorizes over the three correlations; both are independent of the
    // diagram enumeration
    bool ok = true;
    double worst = 0.0;
    const double rho = 0.37;
    for (int q = 2; q <= 4; ++q) {
      std::vector<double> corr = {1.0, rho, rho, 1.0};
      double got = diagrams::product_moment({q, q}, corr) * fudge;
      double want = factorial(q) * std::pow(rho, q);
      worst = std::max(worst, std::abs(got - want));
      ok = ok && std::abs(got - want) <= 1e-12;
    }
    std::vector<double> corr = {1.0, 0.5, -0.3, 0.5, 1.0, 0.2, -0.3, 0.2, 1.0};
    double got = diagrams::product_moment({2, 2, 2}, corr) * fudge;
    double want = 8.0 * 0.5 * -0.3 * 0.2;
    worst = std::max(worst, std::abs(got - want));
    ok = ok && std::abs(got - want) <= 1e-12;
    std::snprintf(detail, sizeof(detail), "max deviation %.3e", worst);
    row("moment weights against closed-form pair and triple moments", ok,
        detail);
  }

  auto h2 = hermite::catalog("H2", 8);
  auto ar = paths::CovarianceModel::ar1(0.5);

  {
    // for the pure quadratic the second-derivative inner product is a path
    // average of rho(i-j)^2 only, so every replicate equals Var(F) exactly
    auto sim = paths::simulate(ar, 64, 50, 271828);
    auto v = malliavin::inner_D2F_v(sim, h2, ar);
    double varF = paths::variance_F_exact(h2, ar, 64);
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x - varF));
    std::snprintf(detail, sizeof(detail), "max deviation %.3e", worst);
    row("deterministic variance identity for the pure quadratic", worst <= 1e-10,
        detail);
  }

  {
    auto sim = paths::simulate(ar, 64, 4000, 314159);
    auto v = malliavin::inner_DF_u(sim, h2, ar);
    double m = mean_of(v);
    double se = std::sqrt(var_of(v) / static_cast<double>(v.size()));
    double varF = paths::variance_F_exact(h2, ar, 64);
    std::snprintf(detail, sizeof(detail), "|%.6f - %.6f| vs 5 se = %.6f", m,
                  varF, 5.0 * se);
    row("duality: mean derivative inner product matches the exact variance",
        std::abs(m - varF) <= 5.0 * se, detail);
  }

  {
    auto mix = hermite::HermiteSeries::from_coeffs({0.0, 0.0, 1.0, 0.4});
    auto sim = paths::simulate(ar, 24, 6, 161803);
    auto fast = malliavin::inner_DF_u(sim, mix, ar);
    auto lit = malliavin::inner_DF_u(sim, mix, ar, true);
    double worst = 0.0;
    for (std::size_t i = 0; i < fast.size(); ++i)
      worst = std::max(worst, std::abs(fast[i] - lit[i]));
    std::snprintf(detail, sizeof(detail), "max deviation %.3e", worst);
    row("banded evaluation matches the literal double loop", worst <= 1e-9,
        detail);
  }

  {
    // the empirical W1 against the exact law concentrates near 2.9 / sqrt(R)
    std::vector<double> z(20000);
    auto rng = CounterRng::substream(424243, "verify_normals", 0);
    for (auto& x : z) x = rng.next_gaussian();
    auto dk = metrics::dist_kolmogorov(z);
    auto dw = metrics::dist_wasserstein(z);
    auto tv = metrics::dist_tv(z);
    bool ok = dk.value <= 0.02 && dw.value <= 0.04 &&
              tv.lower_bound_value <= 0.04 && tv.kde_value <= 0.06;
    std::snprintf(detail, sizeof(detail), "d_k %.4f d_w %.4f tv_lb %.4f kde %.4f",
                  dk.value, dw.value, tv.lower_bound_value, tv.kde_value);
    row("distance estimators vanish on exact gaussian samples", ok, detail);
  }

  {
    auto t = bounds::bound_tv_d2(paths::CovarianceModel::iid(), 100);
    auto rc = bounds::rate_classifier(0.75, 2, bounds::Metric::tv);
    auto rw = bounds::rate_classifier(1.0, 2, bounds::Metric::w);
    bool ok = std::abs(t.term1 - 0.1) <= 1e-14 &&
              std::abs(t.term2 - 0.1) <= 1e-14 &&
              rc.exponent == -0.375 && !rc.log_factor &&
              rw.exponent == -0.5 && rw.log_factor;
    row("bound anchors and rate table spot checks", ok, "");
  }

  if (level == "full") {
    auto mix = hermite::HermiteSeries::from_coeffs({0.0, 0.0, 1.0, 0.0, 0.5});
    auto sim = paths::simulate(ar, 32, 50000, 577215);
    auto F = paths::statistic_F(sim, mix);
    double varF = paths::variance_F_exact(mix, ar, 32);
    double sv = var_of(F);
    double m = mean_of(F);
    double m4 = 0.0;
    for (double x : F) m4 += std::pow(x - m, 4);
    m4 /= static_cast<double>(F.size());
    double R = static_cast<double>(F.size());
    double se = std::sqrt(
        std::max(0.0, (m4 - sv * sv * (R - 3.0) / (R - 1.0)) / R));
    std::snprintf(detail, sizeof(detail), "|%.6f - %.6f| vs 5 se = %.6f", sv,
                  varF, 5.0 * se);
    row("exact variance matches the simulated ensemble at n = 32",
        std::abs(sv - varF) <= 5.0 * se, detail);
  }

  return failures;
}

}  // namespace bmlab::experiment
