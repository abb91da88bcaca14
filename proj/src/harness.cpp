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

#include "randonet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "randonet/error.hpp"
#include "randonet/rng.hpp"

namespace randonet::harness {
namespace {

constexpr std::uint64_t kSplitStream = 0x53504c4954;

constexpr const char* kL2Convention =
    "l2=absolute euclidean norm of the error over the output grid "
    "(not normalized)";
constexpr const char* kPercentileConvention =
    "percentiles=linear interpolation between order statistics";

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  void integer(std::int64_t v) { bytes(&v, sizeof v); }
  void matrix(const Matrix& m) {
    integer(m.rows());
    integer(m.cols());
    bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string cache_key(const problems::CaseStudy& cs,
                      const ode::OdeSolverConfig& ode) {
  std::ostringstream os;
  os.precision(17);
  const auto& s = cs.sampling;
  os << cs.id << '|' << cs.domain_lo << '|' << cs.domain_hi << '|' << cs.m
     << '|' << cs.n << '|' << cs.k << '|' << cs.nu << '|' << cs.gamma << '|'
     << cs.zeta << '|' << s.w.lo << '|' << s.w.hi << '|' << s.s.lo << '|'
     << s.s.hi << '|' << s.c.lo << '|' << s.c.hi << '|' << s.a.lo << '|'
     << s.a.hi << '|' << s.size << '|' << s.seed << '|' << s.num_terms << '|'
     << static_cast<int>(s.sign);
  if (cs.id == 2) {
    os << '|' << ode.abs_tol << '|' << ode.rel_tol << '|' << ode.max_steps
       << '|' << ode.initial_step;
  }
  return os.str();
}

void require_same_shape(const Matrix& pred, const Matrix& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
    fail(ErrorKind::kShapeMismatch,
         "prediction is " + std::to_string(pred.rows()) + "x" +
             std::to_string(pred.cols()) + " but truth is " +
             std::to_string(truth.rows()) + "x" + std::to_string(truth.cols()));
  }
}

std::string context(const ExperimentConfig& cfg, EmbeddingKind kind, Index m) {
  return "case " + std::to_string(cfg.case_id) + ", " +
         std::string(embeddings::kind_name(kind)) + " M=" + std::to_string(m) +
         ": ";
}

}  // namespace

void ExperimentConfig::validate() const {
  require(case_id >= 1 && case_id <= 5, ErrorKind::kInvalidArgument,
          "case id must be in 1..5");
  require(!branch_kinds.empty(), ErrorKind::kInvalidArgument,
          "at least one branch kind is required");
  for (auto k : branch_kinds) {
    require(k != EmbeddingKind::kTanhRP, ErrorKind::kInvalidArgument,
            "branch kind must be jl or rffn");
  }
  require(!branch_sizes.empty(), ErrorKind::kInvalidArgument,
          "at least one branch size M is required");
  for (auto m : branch_sizes) {
    require(m >= 1, ErrorKind::kInvalidArgument, "branch size M must be >= 1");
  }
  require(trunk_size >= 1, ErrorKind::kInvalidArgument,
          "trunk size N must be >= 1");
  require(train_fraction > 0.0 && train_fraction < 1.0,
          ErrorKind::kInvalidArgument, "train fraction must lie in (0, 1)");
  require(dataset_size >= 0, ErrorKind::kInvalidArgument,
          "dataset size override must be non-negative");
  solver.validate();
  ode.validate();
}

problems::CaseStudy ExperimentConfig::case_study() const {
  problems::CaseStudy cs = problems::case_study(case_id, seed_data, dataset_size);
  if (growing_exponent) cs.sampling.sign = funcgen::ExponentSign::kGrowing;
  return cs;
}

EmbeddingSpec ExperimentConfig::trunk_spec(const problems::CaseStudy& cs) const {
  EmbeddingSpec s = embeddings::tanh_trunk_spec(cs.domain_lo, cs.domain_hi,
                                                trunk_size, 0.0, seed_embed);
  s.weight_bound = trunk_weight_bound;
  return s;
}

EmbeddingSpec ExperimentConfig::branch_spec(EmbeddingKind kind, Index m,
                                            Index size) const {
  if (kind == EmbeddingKind::kJL) return embeddings::jl_spec(m, size, seed_embed);
  EmbeddingSpec s = embeddings::rffn_spec(m, size, seed_embed);
  s.input_scale = rffn_input_scale;
  s.output_inverse_m = rffn_inverse_m;
  return s;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json kinds = nlohmann::json::array();
  for (auto k : cfg.branch_kinds) kinds.push_back(std::string(embeddings::kind_name(k)));
  return {
      {"case", cfg.case_id},
      {"branch", kinds},
      {"m", cfg.branch_sizes},
      {"n", cfg.trunk_size},
      {"train_frac", cfg.train_fraction},
      {"solver", std::string(model::solver_name(cfg.solver.kind))},
      {"tolerance", cfg.solver.tolerance.to_string()},
      {"lambda", cfg.solver.lambda},
      {"seed_data", cfg.seed_data},
      {"seed_embed", cfg.seed_embed},
      {"seed_split", cfg.seed_split},
      {"dataset_size", cfg.dataset_size},
      {"trunk_weight_bound", cfg.trunk_weight_bound},
      {"rffn_input_scale", cfg.rffn_input_scale},
      {"rffn_inverse_m", cfg.rffn_inverse_m},
      {"growing_exponent", cfg.growing_exponent},
      {"ode_abs_tol", cfg.ode.abs_tol},
      {"ode_rel_tol", cfg.ode.rel_tol},
  };
}

std::vector<Index> split_indices(Index size, double fraction, std::uint64_t seed) {
  require(fraction > 0.0 && fraction < 1.0, ErrorKind::kInvalidArgument,
          "split fraction must lie in (0, 1)");
  const auto n_train =
      static_cast<Index>(std::llround(fraction * static_cast<double>(size)));
  require(n_train >= 1 && n_train < size, ErrorKind::kInvalidArgument,
          "split of " + std::to_string(size) + " columns at fraction " +
              std::to_string(fraction) + " leaves an empty part");
  std::vector<Index> perm(static_cast<std::size_t>(size));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng = Rng::for_stream(seed, kSplitStream);
  for (Index i = size - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> train(perm.begin(), perm.begin() + n_train);
  std::sort(train.begin(), train.end());
  return train;
}

std::pair<AlignedDataset, AlignedDataset> split(const AlignedDataset& ds,
                                                double fraction,
                                                std::uint64_t seed) {
  ds.validate();
  const std::vector<Index> train = split_indices(ds.size(), fraction, seed);
  std::vector<char> in_train(static_cast<std::size_t>(ds.size()), 0);
  for (Index i : train) in_train[static_cast<std::size_t>(i)] = 1;
  std::vector<Index> test;
  for (Index i = 0; i < ds.size(); ++i) {
    if (!in_train[static_cast<std::size_t>(i)]) test.push_back(i);
  }
  return {ds.select(train), ds.select(test)};
}

double mse(const Matrix& pred, const Matrix& truth) {
  require_same_shape(pred, truth);
  require(pred.size() > 0, ErrorKind::kShapeMismatch, "mse of empty matrices");
  double sum = 0.0;
  for (Index j = 0; j < pred.cols(); ++j) {
    for (Index i = 0; i < pred.rows(); ++i) {
      const double e = pred(i, j) - truth(i, j);
      sum += e * e;
    }
  }
  return sum / static_cast<double>(pred.size());
}

Vector l2_errors(const Matrix& pred, const Matrix& truth) {
  require_same_shape(pred, truth);
  return (pred - truth).colwise().norm().transpose();
}

double percentile(std::vector<double> values, double q) {
  require(!values.empty(), ErrorKind::kInvalidArgument,
          "percentile of an empty set");
  require(q >= 0.0 && q <= 1.0, ErrorKind::kInvalidArgument,
          "percentile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

L2Percentiles l2_percentiles(const Matrix& pred, const Matrix& truth) {
  const Vector e = l2_errors(pred, truth);
  require(e.size() >= 1, ErrorKind::kShapeMismatch,
          "L2 percentiles need at least one column");
  std::vector<double> v(e.data(), e.data() + e.size());
  return {percentile(v, 0.05), percentile(v, 0.5), percentile(v, 0.95)};
}

std::string fingerprint(const AlignedDataset& ds) {
  Fnv1a h;
  h.matrix(ds.input_grid);
  h.matrix(ds.output_grid);
  h.matrix(ds.inputs);
  h.matrix(ds.outputs);
  return hex64(h.value());
}

std::shared_ptr<const DatasetCache::Entry> DatasetCache::get(
    const problems::CaseStudy& cs, const ode::OdeSolverConfig& ode) {
  const std::string key = cache_key(cs, ode);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  auto entry = std::make_shared<Entry>();
  entry->data = problems::build_case(cs, ode);
  entry->fingerprint = fingerprint(entry->data.dataset);
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = entries_.emplace(key, std::move(entry));
  return it->second;
}

std::size_t DatasetCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

void DatasetCache::clear() {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.clear();
}

DatasetCache& default_cache() {
  static DatasetCache cache;
  return cache;
}

BenchmarkReport run_experiment(const ExperimentConfig& cfg,
                               const TrainHook& hook, DatasetCache* cache) {
  cfg.validate();
  DatasetCache& dc = cache ? *cache : default_cache();
  const problems::CaseStudy cs = cfg.case_study();
  const auto entry = dc.get(cs, cfg.ode);
  const AlignedDataset& ds = entry->data.dataset;
  auto [train, test] = split(ds, cfg.train_fraction, cfg.seed_split);

  const TrainHook train_fn =
      hook ? hook
           : TrainHook([](const AlignedDataset& d, const EmbeddingSpec& t,
                          const EmbeddingSpec& b, const SolverOptions& s) {
               return model::train_aligned(d, t, b, s);
             });

  BenchmarkReport report;
  report.config = cfg;
  report.dataset_fingerprint = entry->fingerprint;
  report.dataset_events = entry->data.events;
  const EmbeddingSpec trunk = cfg.trunk_spec(cs);
  for (EmbeddingKind kind : cfg.branch_kinds) {
    for (Index m_feat : cfg.branch_sizes) {
      const EmbeddingSpec branch = cfg.branch_spec(kind, cs.m, m_feat);
      try {
        const auto start = std::chrono::steady_clock::now();
        RandONetModel model = train_fn(train, trunk, branch, cfg.solver);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        const Matrix pred = model.evaluate_batch(test.inputs, test.output_grid);
        const L2Percentiles pct = l2_percentiles(pred, test.outputs);
        ReportRow row;
        row.case_id = cfg.case_id;
        row.kind = kind;
        row.branch_size = m_feat;
        row.trunk_size = cfg.trunk_size;
        row.train_size = train.size();
        row.test_size = test.size();
        row.mse = mse(pred, test.outputs);
        row.l2_p5 = pct.p5;
        row.l2_median = pct.median;
        row.l2_p95 = pct.p95;
        row.train_seconds = seconds;
        row.trunk_rank = model.metadata().trunk_rank;
        row.branch_rank = model.metadata().branch_rank;
        report.rows.push_back(row);
      } catch (const Error& e) {
        fail(e.kind(), context(cfg, kind, m_feat) + e.what());
      }
    }
  }
  return report;
}

BenchmarkReport sweep(const ExperimentConfig& cfg, const TrainHook& hook,
                      DatasetCache* cache) {
  require(!cfg.branch_sizes.empty(), ErrorKind::kInvalidArgument,
          "sweep needs a nonempty list of branch sizes");
  return run_experiment(cfg, hook, cache);
}

void write_report_csv(std::ostream& os, const BenchmarkReport& report) {
  os << "# randonet-report v1\n";
  os << "# " << kL2Convention << "\n";
  os << "# " << kPercentileConvention << "\n";
  os << "# dataset_fingerprint=" << report.dataset_fingerprint << "\n";
  os << "# config=" << config_to_json(report.config).dump() << "\n";
  os << "case,kind,M,N,train_size,test_size,mse,l2_p5,l2_median,l2_p95,"
        "train_seconds\n";
  const auto old = os.precision(17);
  for (const auto& r : report.rows) {
    os << r.case_id << ',' << embeddings::kind_name(r.kind) << ','
       << r.branch_size << ',' << r.trunk_size << ',' << r.train_size << ','
       << r.test_size << ',' << r.mse << ',' << r.l2_p5 << ',' << r.l2_median
       << ',' << r.l2_p95 << ',' << r.train_seconds << "\n";
  }
  os.precision(old);
}

void write_convergence_csv(std::ostream& os, const BenchmarkReport& report,
                           EmbeddingKind kind) {
  os << "# randonet-convergence v1 case=" << report.config.case_id
     << " kind=" << embeddings::kind_name(kind)
     << " dataset_fingerprint=" << report.dataset_fingerprint << "\n";
  os << "# " << kL2Convention << "\n";
  os << "M,mse,l2_p5,l2_median,l2_p95,train_seconds\n";
  const auto old = os.precision(17);
  for (const auto& r : report.rows) {
    if (r.kind != kind) continue;
    os << r.branch_size << ',' << r.mse << ',' << r.l2_p5 << ',' << r.l2_median
       << ',' << r.l2_p95 << ',' << r.train_seconds << "\n";
  }
  os.precision(old);
}

nlohmann::json report_to_json(const BenchmarkReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({
        {"case", r.case_id},
        {"kind", std::string(embeddings::kind_name(r.kind))},
        {"M", r.branch_size},
        {"N", r.trunk_size},
        {"train_size", r.train_size},
        {"test_size", r.test_size},
        {"mse", r.mse},
        {"l2_p5", r.l2_p5},
        {"l2_median", r.l2_median},
        {"l2_p95", r.l2_p95},
        {"train_seconds", r.train_seconds},
        {"trunk_rank", r.trunk_rank},
        {"branch_rank", r.branch_rank},
    });
  }
  return {
      {"format", "randonet-report"},
      {"version", 1},
      {"l2_convention", kL2Convention},
      {"percentile_convention", kPercentileConvention},
      {"dataset_fingerprint", report.dataset_fingerprint},
      {"dataset_events", report.dataset_events},
      {"config", config_to_json(report.config)},
      {"rows", rows},
  };
}

}  // namespace randonet::harness
