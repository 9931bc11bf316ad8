#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpsep/distances.hpp"
#include "cpsep/grid_distribution.hpp"
#include "cpsep/hard_instances.hpp"
#include "cpsep/packing.hpp"
#include "cpsep/parallel.hpp"
#include "cpsep/random_stream.hpp"
#include "cpsep/report.hpp"
#include "cpsep/sep_experiments.hpp"

namespace {

using cpsep::ExperimentReport;

struct CommonOpts {
  std::uint64_t seed = 1;
  std::string out = "-";
  std::string format = "auto";
  std::string config_path;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--seed", opts.seed, "Root seed for every stream in the run");
  cmd->add_option("--out", opts.out, "Report path; '-' prints to stdout");
  cmd->add_option("--format", opts.format, "Report format: auto, json or csv")
      ->check(CLI::IsMember({"auto", "json", "csv"}));
  cmd->add_option("--config", opts.config_path, "JSON file with defaults; flags win");
}

// Emits the report and logs a row-count line to stderr. Timing stays on
// stderr so report files are byte-stable under reruns.
void emit(const ExperimentReport& report, const CommonOpts& opts,
          std::chrono::steady_clock::time_point started) {
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  if (opts.out == "-") {
    if (opts.format == "csv") {
      std::cout << report.to_csv();
    } else {
      std::cout << report.to_json().dump(2) << "\n";
    }
  } else {
    report.write(opts.out, opts.format);
  }
  for (const std::string& note : report.notes()) std::cerr << "note: " << note << "\n";
  std::cerr << report.command() << ": " << report.rows().size() << " row(s), " << elapsed
            << " ms\n";
}

nlohmann::json catalog() {
  // name -> {params, measures}; measures names the construction each
  // experiment exercises.
  return nlohmann::json{
      {"cp-hardness",
       {{"params", {"d", "eps", "n-grid", "trials", "seed", "out", "format", "config"}},
        {"measures",
         "chi^2 and exact TV of the planted half-subset mixture against the uniform product, "
         "likelihood-ratio advantage, the 1/(c-1) ceiling and the d/(16 eps^2) threshold"}}},
      {"cp-learning",
       {{"params",
         {"d", "eps", "n-grid", "trials", "N-target", "seed", "out", "format", "config",
          "export-ensemble", "export-distributions"}},
        {"measures",
         "Fano packing of completely positive distributions: matched-pair code, closed-form "
         "TV/KL, plug-in learner error and the identification knee"}}},
      {"sep-farness",
       {{"params", {"d", "eps", "net-size", "trials", "seed", "out", "format", "config"}},
        {"measures",
         "net-relative farness certification of Haar-rotated spectral instances via the "
         "trace witness, with the concentration tail bound"}}},
      {"concentration",
       {{"params", {"k", "c", "trials", "seed", "out", "format", "config"}},
        {"measures",
         "balanced quadratic form concentration on random unit vectors against the "
         "4 exp(-sqrt(k) c^2 / 8) bound, cross-checked by the chi-square ratio sampler"}}},
      {"metrics",
       {{"params", {"p", "q", "out", "format", "config"}},
        {"measures", "total variation, chi^2 and KL divergence between two stored grid "
                     "distributions"}}},
      {"reduction-audit",
       {{"params", {"d", "eps", "frac-certified", "seed", "out", "format", "config"}},
        {"measures",
         "probability budget of the separability-to-mixedness reduction given a "
         "certification rate (error bound 1 - 2f/3)"}}}};
}

cpsep::GridDistribution load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    return cpsep::GridDistribution::from_csv(text);
  }
  return cpsep::GridDistribution::from_json(text);
}

// --config support: append "--key value" pairs for JSON keys that are not
// already present on the command line, then reparse. Flags always win and
// unknown keys fail the parse.
std::vector<std::string> merge_config_args(const std::vector<std::string>& args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config " + config_path);
  const auto config = nlohmann::json::parse(in);
  if (!config.is_object()) throw std::invalid_argument("config must be a JSON object");

  std::vector<std::string> merged = args;
  for (const auto& [key, value] : config.items()) {
    const std::string flag = "--" + key;
    bool present = false;
    for (const std::string& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
    }
    if (present) continue;
    merged.push_back(flag);
    if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!joined.empty()) joined += ',';
        joined += item.dump();
      }
      merged.push_back(joined);
    } else if (value.is_string()) {
      merged.push_back(value.get<std::string>());
    } else {
      merged.push_back(value.dump());
    }
  }
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cpsep-lab: numerical experiments on completely positive distributions and "
               "separable-state farness"};
  app.require_subcommand(0, 1);

  bool list_json = false;
  CLI::App* list_cmd = app.add_subcommand("list", "Print the experiment catalog");
  list_cmd->add_flag("--json", list_json, "Emit the catalog as JSON");

  // cp-hardness
  struct {
    int d = 4;
    double eps = 0.2;
    std::vector<std::int64_t> n_grid{1, 2, 4};
    std::int64_t trials = 200;
    CommonOpts common;
  } hardness;
  CLI::App* hardness_cmd =
      app.add_subcommand("cp-hardness", "Planted mixture vs uniform distinguishing sweep");
  hardness_cmd->add_option("--d", hardness.d, "Grid side length (even)");
  hardness_cmd->add_option("--eps", hardness.eps, "Planted bias in (0, 1/2]");
  hardness_cmd->add_option("--n-grid", hardness.n_grid, "Sample counts, comma separated")
      ->delimiter(',');
  hardness_cmd->add_option("--trials", hardness.trials, "Monte Carlo trials per n (0 = analytic only)");
  add_common(hardness_cmd, hardness.common);

  // cp-learning
  struct {
    int d = 4;
    double eps = 0.2;
    std::vector<std::int64_t> n_grid{0, 256, 1024, 4096};
    std::int64_t trials = 100;
    int n_target = 4;
    std::string export_ensemble;
    bool export_distributions = false;
    CommonOpts common;
  } learning;
  CLI::App* learning_cmd =
      app.add_subcommand("cp-learning", "Packing ensemble and plug-in learner sweep");
  learning_cmd->add_option("--d", learning.d, "Grid side length (multiple of 4)");
  learning_cmd->add_option("--eps", learning.eps, "Packing bias in (0, 1/2)");
  learning_cmd->add_option("--n-grid", learning.n_grid, "Sample counts, comma separated")
      ->delimiter(',');
  learning_cmd->add_option("--trials", learning.trials, "Trials per sample count");
  learning_cmd->add_option("--N-target", learning.n_target, "Requested code size");
  learning_cmd->add_option("--export-ensemble", learning.export_ensemble,
                           "Also write the ensemble JSON here");
  learning_cmd->add_flag("--export-distributions", learning.export_distributions,
                         "Include materialized distributions in the export");
  add_common(learning_cmd, learning.common);

  // sep-farness
  struct {
    int d = 8;
    double eps = 0.35;
    int net_size = 4096;
    int trials = 100;
    CommonOpts common;
  } farness;
  CLI::App* farness_cmd =
      app.add_subcommand("sep-farness", "Net-relative farness certification experiment");
  farness_cmd->add_option("--d", farness.d, "Local dimension (even)");
  farness_cmd->add_option("--eps", farness.eps, "Spectral bias in [0, 1/2]");
  farness_cmd->add_option("--net-size", farness.net_size, "Product states in the net");
  farness_cmd->add_option("--trials", farness.trials, "Instance draws");
  add_common(farness_cmd, farness.common);

  // concentration
  struct {
    int k = 256;
    double c = 2.0;
    std::int64_t trials = 100000;
    CommonOpts common;
  } conc;
  CLI::App* conc_cmd =
      app.add_subcommand("concentration", "Balanced quadratic form concentration experiment");
  conc_cmd->add_option("--k", conc.k, "Ambient dimension (even)");
  conc_cmd->add_option("--c", conc.c, "Deviation constant (> 0)");
  conc_cmd->add_option("--trials", conc.trials, "Unit-vector draws");
  add_common(conc_cmd, conc.common);

  // metrics
  struct {
    std::string p;
    std::string q;
    CommonOpts common;
  } metrics;
  CLI::App* metrics_cmd =
      app.add_subcommand("metrics", "Distances between two stored grid distributions");
  metrics_cmd->add_option("--p", metrics.p, "First distribution (.json or .csv)")->required();
  metrics_cmd->add_option("--q", metrics.q, "Second distribution (.json or .csv)")->required();
  add_common(metrics_cmd, metrics.common);

  // reduction-audit
  struct {
    int d = 8;
    double eps = 0.45;
    double frac_certified = -1.0;
    CommonOpts common;
  } audit;
  CLI::App* audit_cmd =
      app.add_subcommand("reduction-audit", "Probability budget of the reduction");
  audit_cmd->add_option("--d", audit.d, "Local dimension (even)");
  audit_cmd->add_option("--eps", audit.eps, "Spectral bias in [0, 1/2]");
  audit_cmd->add_option("--frac-certified", audit.frac_certified,
                        "Certification rate in [0, 1]; omit to measure a small run");
  add_common(audit_cmd, audit.common);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config_args(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    if (list_cmd->parsed()) {
      const auto cat = catalog();
      if (list_json) {
        std::cout << cat.dump(2) << "\n";
      } else {
        for (const auto& [name, entry] : cat.items()) {
          std::cout << name << "\n  measures: " << entry.at("measures").get<std::string>()
                    << "\n  params:";
          for (const auto& p : entry.at("params")) std::cout << " --" << p.get<std::string>();
          std::cout << "\n";
        }
      }
      return 0;
    }
    if (hardness_cmd->parsed()) {
      cpsep::RandomStream rng(hardness.common.seed);
      const ExperimentReport report = cpsep::distinguishing_experiment(
          hardness.d, hardness.eps, hardness.n_grid, hardness.trials, rng);
      emit(report, hardness.common, started);
      return 0;
    }
    if (learning_cmd->parsed()) {
      cpsep::RandomStream rng(learning.common.seed);
      cpsep::PackingEnsemble ensemble =
          cpsep::PackingEnsemble::build(learning.d, learning.eps, learning.n_target, rng);
      if (!learning.export_ensemble.empty()) {
        std::ofstream out(learning.export_ensemble, std::ios::binary | std::ios::trunc);
        out << ensemble.to_json(learning.export_distributions) << "\n";
      }
      ExperimentReport report =
          cpsep::plugin_learner_experiment(ensemble, learning.n_grid, learning.trials, rng);
      if (!ensemble.reached_target()) {
        report.add_note("code size target " + std::to_string(learning.n_target) +
                        " not reached; achieved " + std::to_string(ensemble.code().size()));
      }
      emit(report, learning.common, started);
      return 0;
    }
    if (farness_cmd->parsed()) {
      cpsep::RandomStream rng(farness.common.seed);
      const ExperimentReport report = cpsep::farness_certification_experiment(
          farness.d, farness.eps, farness.net_size, farness.trials, rng);
      emit(report, farness.common, started);
      return 0;
    }
    if (conc_cmd->parsed()) {
      cpsep::RandomStream rng(conc.common.seed);
      const ExperimentReport report =
          cpsep::concentration_experiment(conc.k, conc.c, conc.trials, rng);
      emit(report, conc.common, started);
      return 0;
    }
    if (metrics_cmd->parsed()) {
      const cpsep::GridDistribution p = load_grid(metrics.p);
      const cpsep::GridDistribution q = load_grid(metrics.q);
      ExperimentReport report("metrics",
                              nlohmann::json{{"p", metrics.p}, {"q", metrics.q}},
                              {"tv", "chi2", "kl"});
      report.add_row({cpsep::tv_distance(p, q), cpsep::chi2_distance(p, q),
                      cpsep::kl_divergence(p, q)});
      emit(report, metrics.common, started);
      return 0;
    }
    if (audit_cmd->parsed()) {
      cpsep::RandomStream rng(audit.common.seed);
      std::optional<double> frac;
      if (audit.frac_certified >= 0.0) frac = audit.frac_certified;
      const ExperimentReport report =
          cpsep::reduction_protocol_trace(audit.d, audit.eps, frac, rng);
      emit(report, audit.common, started);
      return 0;
    }
    std::cerr << app.help();
    return 2;
  } catch (const cpsep::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
