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

// Experiment orchestration: dataset construction (cached), random splits,
// training per (branch kind, M), test metrics and reports.
//
// Metrics over the test set, with E = prediction - truth (n x s_test):
//   mse         mean of E_ij^2 over all entries
//   L2 error    ||E_:,j||_2 per test function, not normalized by n
//   percentiles linear interpolation between order statistics: for sorted
//               e_0 <= ... <= e_{s-1} and q in [0, 1], at position
//               q (s - 1) between its two neighbours.

#ifndef RANDONET_HARNESS_HPP_
#define RANDONET_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "randonet/embeddings.hpp"
#include "randonet/model.hpp"
#include "randonet/problems.hpp"

namespace randonet::harness {

using embeddings::EmbeddingKind;
using embeddings::EmbeddingSpec;
using linalg::Index;
using linalg::Matrix;
using linalg::Vector;
using model::AlignedDataset;
using model::RandONetModel;
using model::SolverOptions;

struct ExperimentConfig {
  int case_id = 1;
  std::vector<EmbeddingKind> branch_kinds{EmbeddingKind::kJL};
  std::vector<Index> branch_sizes{100};
  Index trunk_size = 200;
  double train_fraction = 0.8;
  SolverOptions solver;
  std::uint64_t seed_data = 0;
  std::uint64_t seed_embed = 0;
  std::uint64_t seed_split = 0;
  // Positive values override the case's number of functions.
  Index dataset_size = 0;
  // Non-positive selects the default 25 / ((b - a) / 2).
  double trunk_weight_bound = 0.0;
  // Non-positive selects 1 / m.
  double rffn_input_scale = 0.0;
  bool rffn_inverse_m = true;
  // Audit only: input functions with exp(+s (x - c)^2) terms.
  bool growing_exponent = false;
  ode::OdeSolverConfig ode;
  std::string out_path;
  bool json = false;

  void validate() const;
  problems::CaseStudy case_study() const;
  EmbeddingSpec trunk_spec(const problems::CaseStudy& cs) const;
  EmbeddingSpec branch_spec(EmbeddingKind kind, Index m, Index size) const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct ReportRow {
  int case_id = 0;
  EmbeddingKind kind = EmbeddingKind::kJL;
  Index branch_size = 0;
  Index trunk_size = 0;
  Index train_size = 0;
  Index test_size = 0;
  double mse = 0.0;
  double l2_p5 = 0.0;
  double l2_median = 0.0;
  double l2_p95 = 0.0;
  double train_seconds = 0.0;
  Index trunk_rank = 0;
  Index branch_rank = 0;
};

struct BenchmarkReport {
  ExperimentConfig config;
  std::string dataset_fingerprint;
  std::vector<std::string> dataset_events;
  std::vector<ReportRow> rows;
};

/// Random column partition; the training part has round(fraction * s)
/// columns. Columns keep their original relative order within each part.
std::pair<AlignedDataset, AlignedDataset> split(const AlignedDataset& ds,
                                                double fraction,
                                                std::uint64_t seed);

/// Indices assigned to the training part by split(), in increasing order.
std::vector<Index> split_indices(Index size, double fraction, std::uint64_t seed);

double mse(const Matrix& pred, const Matrix& truth);

struct L2Percentiles {
  double p5 = 0.0;
  double median = 0.0;
  double p95 = 0.0;
};

/// Per-column Euclidean error norms.
Vector l2_errors(const Matrix& pred, const Matrix& truth);
L2Percentiles l2_percentiles(const Matrix& pred, const Matrix& truth);
/// q in [0, 1]; linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

/// FNV-1a 64 over dimensions, grids and matrix entries; 16 hex digits.
std::string fingerprint(const AlignedDataset& ds);

/// Datasets keyed by the full case configuration. Thread-safe.
class DatasetCache {
 public:
  struct Entry {
    problems::CaseData data;
    std::string fingerprint;
  };

  std::shared_ptr<const Entry> get(const problems::CaseStudy& cs,
                                   const ode::OdeSolverConfig& ode);
  std::size_t size() const;
  void clear();

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Entry>> entries_;
};

DatasetCache& default_cache();

/// Replaceable training step. Only the call to this hook is timed.
using TrainHook = std::function<RandONetModel(
    const AlignedDataset& train, const EmbeddingSpec& trunk,
    const EmbeddingSpec& branch, const SolverOptions& solver)>;

BenchmarkReport run_experiment(const ExperimentConfig& cfg,
                               const TrainHook& hook = {},
                               DatasetCache* cache = nullptr);

/// run_experiment over every (kind, M); rows ordered by kind, then M as given.
BenchmarkReport sweep(const ExperimentConfig& cfg, const TrainHook& hook = {},
                      DatasetCache* cache = nullptr);

/// Version 1 report CSV, one row per (kind, M), with a header comment block
/// stating the metric conventions and the dataset fingerprint.
void write_report_csv(std::ostream& os, const BenchmarkReport& report);

/// Version 1 convergence CSV for one branch kind:
///   M,mse,l2_p5,l2_median,l2_p95,train_seconds
void write_convergence_csv(std::ostream& os, const BenchmarkReport& report,
                           EmbeddingKind kind);

nlohmann::json report_to_json(const BenchmarkReport& report);

}  // namespace randonet::harness

#endif  // RANDONET_HARNESS_HPP_
