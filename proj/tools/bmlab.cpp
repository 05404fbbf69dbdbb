#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bmlab/errors.hpp"
#include "bmlab/experiment.hpp"
#include "bmlab/report.hpp"

namespace fs = std::filesystem;
using bmlab::experiment::ExperimentConfig;

namespace {

struct CommonOpts {
  std::string config;
  std::string out;
  int threads = 1;
};

void add_common(CLI::App* sub, CommonOpts& opts, bool config_required) {
  auto* c = sub->add_option("--config", opts.config,
                            "experiment configuration (JSON)");
  if (config_required) c->required();
  sub->add_option("--out", opts.out,
                  "output directory (overrides the config's out field)");
  sub->add_option("--threads", opts.threads, "worker cap; never changes results")
      ->check(CLI::PositiveNumber);
}

ExperimentConfig load(const CommonOpts& opts) {
  auto cfg = bmlab::experiment::config_from_file(opts.config);
  if (!opts.out.empty()) cfg.out = opts.out;
  return cfg;
}

void emit(const nlohmann::ordered_json& payload, const ExperimentConfig& cfg,
          const std::string& name) {
  std::cout << payload.dump(2) << "\n";
  if (cfg.out.empty()) return;
  fs::create_directories(cfg.out);
  std::ofstream out(fs::path(cfg.out) / (name + ".json"), std::ios::binary);
  out << payload.dump(2) << "\n";
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

int run_rate_study(const ExperimentConfig& cfg, int threads) {
  if (cfg.out.empty())
    throw bmlab::ConfigError(
        "rate-study needs an output directory (--out or the config's out)");
  auto t0 = std::chrono::steady_clock::now();
  auto rep = bmlab::experiment::run_experiment(cfg, threads);
  double run_ms = ms_since(t0);
  bmlab::experiment::write_artifacts(rep, cfg, cfg.out, threads,
                                     {{"run_experiment", run_ms},
                                      {"total", ms_since(t0)}});
  nlohmann::ordered_json summary;
  summary["out"] = cfg.out;
  summary["rows"] = rep.rows.size();
  summary["fits"] = nlohmann::ordered_json::array();
  for (const auto& f : rep.fits)
    summary["fits"].push_back({{"column", f.column},
                               {"slope", f.slope},
                               {"ci_95", f.ci_95}});
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bmlab: chaos-expansion toolkit for normal approximation of partial "
      "sums of functionals of stationary gaussian sequences"};
  app.require_subcommand(1);

  CommonOpts project_o, simulate_o, functionals_o, distances_o, bounds_o,
      diagrams_o, rate_o, verify_o;
  std::string level = "fast";
  bool corrupt = false;

  auto* project = app.add_subcommand(
      "project", "hermite coefficients, rank and limit variance");
  add_common(project, project_o, true);
  auto* simulate = app.add_subcommand(
      "simulate", "path ensembles and the normalized partial-sum statistic");
  add_common(simulate, simulate_o, true);
  auto* functionals = app.add_subcommand(
      "functionals", "derivative inner products behind the distance bounds");
  add_common(functionals, functionals_o, true);
  auto* distances = app.add_subcommand(
      "distances", "monte carlo distances to the standard normal");
  add_common(distances, distances_o, true);
  auto* bounds = app.add_subcommand(
      "bounds", "deterministic bound terms on the n grid");
  add_common(bounds, bounds_o, true);
  auto* diagrams = app.add_subcommand(
      "diagrams", "pairing diagrams and exact moments for the rank");
  add_common(diagrams, diagrams_o, true);
  auto* rate = app.add_subcommand(
      "rate-study", "full pipeline: report.csv/json, manifest and plots");
  add_common(rate, rate_o, true);
  auto* verify = app.add_subcommand(
      "verify", "self-check matrix; exits nonzero on any failure");
  add_common(verify, verify_o, false);
  verify->add_option("--level", level, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}));
  verify
      ->add_flag("--corrupt-moment-weights", corrupt,
                 "perturb a moment weight to prove the checks can fail")
      ->group("");  // development only, hidden from help

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (project->parsed()) {
      auto cfg = load(project_o);
      emit(bmlab::experiment::project_summary(cfg), cfg, "project");
    } else if (simulate->parsed()) {
      auto cfg = load(simulate_o);
      emit(bmlab::experiment::simulate_summary(cfg, simulate_o.threads), cfg,
           "simulate");
    } else if (functionals->parsed()) {
      auto cfg = load(functionals_o);
      emit(bmlab::experiment::functionals_summary(cfg, functionals_o.threads),
           cfg, "functionals");
    } else if (distances->parsed()) {
      auto cfg = load(distances_o);
      emit(bmlab::experiment::distances_summary(cfg, distances_o.threads), cfg,
           "distances");
    } else if (bounds->parsed()) {
      auto cfg = load(bounds_o);
      emit(bmlab::experiment::bounds_summary(cfg), cfg, "bounds");
    } else if (diagrams->parsed()) {
      auto cfg = load(diagrams_o);
      emit(bmlab::experiment::diagrams_summary(cfg), cfg, "diagrams");
    } else if (rate->parsed()) {
      return run_rate_study(load(rate_o), rate_o.threads);
    } else if (verify->parsed()) {
      int failures = bmlab::experiment::verify_suite(level, std::cout, corrupt);
      if (failures > 0) {
        std::cerr << failures << " check(s) failed\n";
        return 3;
      }
      return 0;
    }
  } catch (const bmlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
