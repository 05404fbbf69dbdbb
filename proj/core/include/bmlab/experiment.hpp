#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmlab/bounds.hpp"
#include "bmlab/covariance.hpp"
#include "bmlab/hermite.hpp"

namespace bmlab::experiment {

// Exactly one of catalog / coeffs / file is set. `qmax` caps the chaos order
// when a catalog entry needs projection (abs, abspow).
struct FunctionSpec {
  std::string catalog;
  std::vector<double> coeffs;
  std::string file;
  int qmax = 24;
};

struct ModelSpec {
  std::string type;  // iid | ar1 | fgn | power_tail | custom
  double r = 0.0;
  double H = 0.0;
  double alpha = 0.0;
  long table_cutoff = 0;
  std::vector<double> table;
};

struct ExperimentConfig {
  FunctionSpec function;
  ModelSpec model;
  std::vector<long> n_grid;   // strictly increasing, each >= 2
  long R = 0;                 // >= 100; tv and cumulants also need >= 1000
  std::uint64_t seed = 0;     // mandatory, no entropy defaults
  int truncation_N = 0;       // 0 = no truncation of the shifted series
  std::string bounds_family;  // auto | d2 | dge3
  std::vector<std::string> distances;    // subset of {w, k, tv}
  std::vector<std::string> functionals;  // subset of {tv, w, tv_iterated}
  std::string out;
  nlohmann::ordered_json echo;  // the validated input, echoed into artifacts
};

// Throws ConfigError with a message naming the offending field.
ExperimentConfig config_from_json(const nlohmann::ordered_json& j);
ExperimentConfig config_from_file(const std::string& path);

hermite::HermiteSeries resolve_function(const FunctionSpec& spec);
paths::CovarianceModel resolve_model(const ModelSpec& spec);

// Full pipeline for one config: simulate the grid, evaluate distances,
// cumulants, covariance sums and the bound terms, then fit decay rates.
// Pure apart from the RNG driven by cfg.seed; the worker count never
// changes a reported number.
bounds::BoundReport run_experiment(const ExperimentConfig& cfg, int threads);

// Writes report.csv, report.json, manifest.json and plots/*.svg under
// out_dir. Timings (milliseconds) land only in the manifest.
void write_artifacts(const bounds::BoundReport& rep,
                     const ExperimentConfig& cfg, const std::string& out_dir,
                     int threads,
                     const std::vector<std::pair<std::string, double>>& timings);

// Pipeline-prefix summaries backing the single-stage subcommands. Each
// returns a JSON payload that the CLI prints and, with --out, also writes.
nlohmann::ordered_json project_summary(const ExperimentConfig& cfg);
nlohmann::ordered_json simulate_summary(const ExperimentConfig& cfg,
                                        int threads);
nlohmann::ordered_json functionals_summary(const ExperimentConfig& cfg,
                                           int threads);
nlohmann::ordered_json distances_summary(const ExperimentConfig& cfg,
                                         int threads);
nlohmann::ordered_json bounds_summary(const ExperimentConfig& cfg);
nlohmann::ordered_json diagrams_summary(const ExperimentConfig& cfg);

// Self-checks printed as a pass/fail matrix; returns the failure count.
// level is "fast" or "full". corrupt_weights flips an internal moment weight
// by a relative 1e-6 so the cross-checks demonstrably catch a wrong table;
// it exists for testing the suite itself.
int verify_suite(const std::string& level, std::ostream& out,
                 bool corrupt_weights = false);

}  // namespace bmlab::experiment
