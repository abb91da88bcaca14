// Copyright 2026 The RandONet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// randonet command line: run, sweep, gen-data, verify.
//
// Every subcommand accepts --config <file.toml>; keys mirror the long flag
// names inside a [run] / [sweep] / [gen-data] / [verify] section, and flags
// given on the command line win over the file. On failure a JSON error
// record {"error": {"kind": ..., "message": ...}} is written to stderr.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acceptance/acceptance.hpp"
#include "json.hpp"
#include "randonet/error.hpp"
#include "randonet/harness.hpp"
#include "randonet/problems.hpp"

namespace {

using randonet::Error;
using randonet::ErrorKind;
using randonet::harness::ExperimentConfig;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::vector<randonet::linalg::Index> kDefaultSweep{10,  20,  40,  80,   100,
                                                    150, 300, 500, 1000, 2000};

void print_error(std::string_view kind, const std::string& message) {
  nlohmann::json j = {{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << j.dump() << std::endl;
}

struct ExperimentFlags {
  int case_id = 1;
  std::vector<std::string> branch{"jl"};
  std::vector<randonet::linalg::Index> m;
  randonet::linalg::Index n = 200;
  double train_frac = 0.8;
  std::string solver = "cod";
  std::string tol = "auto";
  double lambda = 0.0;
  std::uint64_t seed_data = 0;
  std::uint64_t seed_embed = 0;
  std::uint64_t seed_split = 0;
  randonet::linalg::Index size = 0;
  double trunk_bound = 0.0;
  double rffn_input_scale = 0.0;
  bool rffn_no_inverse_m = false;
  bool growing_exponent = false;
  double ode_atol = 1e-12;
  double ode_rtol = 1e-10;
  std::string out;
  bool json = false;
};

void add_experiment_flags(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--case", f.case_id, "Case study 1..5")->check(CLI::Range(1, 5));
  app->add_option("--branch", f.branch, "Branch embedding(s): jl, rffn")
      ->delimiter(',');
  app->add_option("--m", f.m, "Branch size M, or a comma-separated list")
      ->delimiter(',');
  app->add_option("--n", f.n, "Trunk size N");
  app->add_option("--train-frac", f.train_frac, "Training fraction in (0, 1)");
  app->add_option("--solver", f.solver, "cod | tsvd | tikhonov")
      ->check(CLI::IsMember({"cod", "tsvd", "tikhonov"}));
  app->add_option("--tol", f.tol, "Rank tolerance: auto or an absolute value");
  app->add_option("--lambda", f.lambda, "Tikhonov parameter");
  app->add_option("--seed-data", f.seed_data, "Dataset seed");
  app->add_option("--seed-embed", f.seed_embed, "Embedding seed");
  app->add_option("--seed-split", f.seed_split, "Split seed");
  app->add_option("--size", f.size, "Override the number of functions");
  app->add_option("--trunk-bound", f.trunk_bound,
                  "Trunk weight bound a_U (default 25 / half-width)");
  app->add_option("--rffn-input-scale", f.rffn_input_scale,
                  "RFFN scale inside the cosine (default 1/m)");
  app->add_flag("--rffn-no-inverse-m", f.rffn_no_inverse_m,
                "Drop the 1/m factor in front of the RFFN cosine");
  app->add_flag("--growing-exponent", f.growing_exponent,
                "Audit: input functions with exp(+s (x - c)^2)");
  app->add_option("--ode-atol", f.ode_atol, "Pendulum absolute tolerance");
  app->add_option("--ode-rtol", f.ode_rtol, "Pendulum relative tolerance");
  app->add_option("--out", f.out, "Output path (stdout when omitted)");
  app->add_flag("--json", f.json, "Emit JSON instead of CSV");
}

ExperimentConfig to_config(const ExperimentFlags& f,
                           const std::vector<randonet::linalg::Index>& default_m) {
  ExperimentConfig cfg;
  cfg.case_id = f.case_id;
  cfg.branch_kinds.clear();
  for (const auto& b : f.branch) cfg.branch_kinds.push_back(randonet::embeddings::parse_kind(b));
  cfg.branch_sizes = f.m.empty() ? default_m : f.m;
  cfg.trunk_size = f.n;
  cfg.train_fraction = f.train_frac;
  cfg.solver.kind = randonet::model::parse_solver(f.solver);
  cfg.solver.lambda = f.lambda;
  if (f.tol != "auto") {
    double v = 0.0;
    try {
      v = std::stod(f.tol);
    } catch (const std::exception&) {
      randonet::fail(ErrorKind::kInvalidArgument,
                     "--tol must be 'auto' or a number, got '" + f.tol + "'");
    }
    cfg.solver.tolerance = randonet::linalg::RankTolerance::absolute(v);
  }
  cfg.seed_data = f.seed_data;
  cfg.seed_embed = f.seed_embed;
  cfg.seed_split = f.seed_split;
  cfg.dataset_size = f.size;
  cfg.trunk_weight_bound = f.trunk_bound;
  cfg.rffn_input_scale = f.rffn_input_scale;
  cfg.rffn_inverse_m = !f.rffn_no_inverse_m;
  cfg.growing_exponent = f.growing_exponent;
  cfg.ode.abs_tol = f.ode_atol;
  cfg.ode.rel_tol = f.ode_rtol;
  cfg.out_path = f.out;
  cfg.json = f.json;
  cfg.validate();
  return cfg;
}

template <typename Writer>
void emit(const std::string& path, Writer write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) randonet::fail(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  write(os);
  if (!os) randonet::fail(ErrorKind::kIo, "failed writing '" + path + "'");
}

void log_events(const randonet::harness::BenchmarkReport& rep) {
  for (const auto& e : rep.dataset_events) std::cerr << "event: " << e << "\n";
}

int cmd_run(const ExperimentFlags& f) {
  const ExperimentConfig cfg = to_config(f, {100});
  const auto rep = randonet::harness::run_experiment(cfg);
  log_events(rep);
  emit(cfg.out_path, [&](std::ostream& os) {
    if (cfg.json) {
      os << randonet::harness::report_to_json(rep).dump(2) << "\n";
    } else {
      randonet::harness::write_report_csv(os, rep);
    }
  });
  return EXIT_SUCCESS;
}

std::string kind_path(const std::string& path, randonet::embeddings::EmbeddingKind kind,
                      bool several) {
  if (path.empty() || !several) return path;
  std::filesystem::path p(path);
  const std::string stem = p.stem().string() + "_" +
                           std::string(randonet::embeddings::kind_name(kind));
  return (p.parent_path() / (stem + p.extension().string())).string();
}

int cmd_sweep(const ExperimentFlags& f) {
  const ExperimentConfig cfg = to_config(f, kDefaultSweep);
  const auto rep = randonet::harness::sweep(cfg);
  log_events(rep);
  if (cfg.json) {
    emit(cfg.out_path, [&](std::ostream& os) {
      os << randonet::harness::report_to_json(rep).dump(2) << "\n";
    });
    return EXIT_SUCCESS;
  }
  const bool several = cfg.branch_kinds.size() > 1;
  for (auto kind : cfg.branch_kinds) {
    emit(kind_path(cfg.out_path, kind, several), [&](std::ostream& os) {
      randonet::harness::write_convergence_csv(os, rep, kind);
    });
  }
  return EXIT_SUCCESS;
}

int cmd_gen_data(const ExperimentFlags& f) {
  const ExperimentConfig cfg = to_config(f, {100});
  const auto cs = cfg.case_study();
  const auto data = randonet::problems::build_case(cs, cfg.ode);
  for (const auto& e : data.events) std::cerr << "event: " << e << "\n";
  emit(cfg.out_path, [&](std::ostream& os) {
    randonet::problems::write_case_csv(os, cs, data);
  });
  return EXIT_SUCCESS;
}

int cmd_verify(const std::vector<int>& ids, const std::string& out) {
  std::vector<randonet::acceptance::CriterionResult> results;
  emit(out, [&](std::ostream& os) {
    results = randonet::acceptance::run_criteria(ids, os);
  });
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  if (failed > 0) {
    print_error("acceptance", std::to_string(failed) + " of " +
                                  std::to_string(results.size()) +
                                  " criteria failed");
    return kExitFailure;
  }
  return EXIT_SUCCESS;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random projection operator networks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file whose keys mirror the flags");

  ExperimentFlags run_flags, sweep_flags, data_flags;
  auto* run = app.add_subcommand("run", "Train and evaluate one configuration");
  add_experiment_flags(run, run_flags);
  auto* sweep = app.add_subcommand("sweep", "Convergence sweep over branch sizes M");
  add_experiment_flags(sweep, sweep_flags);
  auto* gen = app.add_subcommand("gen-data", "Export a case-study dataset as CSV");
  gen->add_option("--case", data_flags.case_id, "Case study 1..5")
      ->check(CLI::Range(1, 5));
  gen->add_option("--seed-data", data_flags.seed_data, "Dataset seed");
  gen->add_option("--size", data_flags.size, "Override the number of functions");
  gen->add_flag("--growing-exponent", data_flags.growing_exponent,
                "Audit: input functions with exp(+s (x - c)^2)");
  gen->add_option("--ode-atol", data_flags.ode_atol, "Pendulum absolute tolerance");
  gen->add_option("--ode-rtol", data_flags.ode_rtol, "Pendulum relative tolerance");
  gen->add_option("--out", data_flags.out, "Output path (stdout when omitted)");
  std::vector<int> criteria;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--criterion", criteria, "Criteria to run (default all)")
      ->delimiter(',');
  verify->add_option("--out", verify_out, "Write the result lines to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*sweep) return cmd_sweep(sweep_flags);
    if (*gen) return cmd_gen_data(data_flags);
    if (*verify) return cmd_verify(criteria, verify_out);
  } catch (const Error& e) {
    print_error(randonet::error_kind_name(e.kind()), e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
