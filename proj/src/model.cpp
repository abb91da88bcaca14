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

#include "randonet/model.hpp"

#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "randonet/error.hpp"

namespace randonet::model {
namespace {

using linalg::Side;

constexpr const char* kModelFormat = "randonet-model";
constexpr int kModelVersion = 1;

// Pseudo-inverse action with the rank information of the factorization.
struct PinvResult {
  Matrix value;
  Index rank = -1;
  double tolerance = 0.0;
  double condition = 0.0;
};

double core_condition(const linalg::CodFactors& f) {
  if (f.numerical_rank == 0) return 0.0;
  const auto d = f.middle_triangular.diagonal().cwiseAbs();
  return d.maxCoeff() / d.minCoeff();
}

double svd_condition(const linalg::TruncatedSvd& f) {
  if (f.rank() == 0) return 0.0;
  return f.singular_values(0) / f.singular_values(f.rank() - 1);
}

// A^+ X.
PinvResult pinv_left(const Matrix& a, const Matrix& x, const SolverOptions& opt) {
  PinvResult r;
  switch (opt.kind) {
    case SolverKind::kCod: {
      const auto f = linalg::cod_factorize(a, opt.tolerance);
      r.value = linalg::cod_pinv_apply(f, x, Side::kLeft);
      r.rank = f.numerical_rank;
      r.tolerance = f.rank_tolerance;
      r.condition = core_condition(f);
      break;
    }
    case SolverKind::kTsvd: {
      const auto f = linalg::tsvd_factorize(a, opt.tolerance);
      r.value = linalg::tsvd_pinv_apply(f, x, Side::kLeft);
      r.rank = f.rank();
      r.tolerance = f.rank_tolerance;
      r.condition = svd_condition(f);
      break;
    }
    case SolverKind::kTikhonov:
      r.value = linalg::tikhonov_solve(a.transpose(), x.transpose(), opt.lambda)
                    .transpose();
      break;
  }
  return r;
}

// X A^+. The COD route factorizes A^T, i.e. a column-pivoted LQ of A.
PinvResult pinv_right(const Matrix& a, const Matrix& x, const SolverOptions& opt) {
  PinvResult r;
  switch (opt.kind) {
    case SolverKind::kCod: {
      const auto f = linalg::cod_factorize(a.transpose(), opt.tolerance);
      r.value = linalg::cod_pinv_apply(f, x.transpose(), Side::kLeft).transpose();
      r.rank = f.numerical_rank;
      r.tolerance = f.rank_tolerance;
      r.condition = core_condition(f);
      break;
    }
    case SolverKind::kTsvd: {
      const auto f = linalg::tsvd_factorize(a, opt.tolerance);
      r.value = linalg::tsvd_pinv_apply(f, x, Side::kRight);
      r.rank = f.rank();
      r.tolerance = f.rank_tolerance;
      r.condition = svd_condition(f);
      break;
    }
    case SolverKind::kTikhonov:
      r.value = linalg::tikhonov_solve(a, x, opt.lambda);
      break;
  }
  return r;
}

std::string diagnostics(const char* what, const Matrix& a, const PinvResult& r) {
  std::ostringstream os;
  os << what << " " << a.rows() << "x" << a.cols() << " rank " << r.rank
     << " tolerance " << r.tolerance << " condition " << r.condition
     << " max|entry| " << a.cwiseAbs().maxCoeff();
  return os.str();
}

Matrix trunk_features(const FeatureMap& trunk, const Matrix& locations) {
  return trunk.apply(locations);
}

Matrix grid_row(const Vector& y) { return y.transpose(); }

void check_grid(const Vector& g, const char* name) {
  require(g.size() >= 1, ErrorKind::kShapeMismatch,
          std::string(name) + " must not be empty");
  require(g.allFinite(), ErrorKind::kNonFinite,
          std::string(name) + " must be finite");
  for (Index i = 1; i < g.size(); ++i) {
    require(g(i) > g(i - 1), ErrorKind::kInvalidArgument,
            std::string(name) + " must be strictly increasing");
  }
}

void check_specs(const EmbeddingSpec& trunk_spec, const EmbeddingSpec& branch_spec,
                 Index m, Index d) {
  require(trunk_spec.input_dim == d, ErrorKind::kShapeMismatch,
          "trunk input dimension " + std::to_string(trunk_spec.input_dim) +
              " does not match output location dimension " + std::to_string(d));
  require(branch_spec.input_dim == m, ErrorKind::kShapeMismatch,
          "branch input dimension " + std::to_string(branch_spec.input_dim) +
              " does not match sensor count " + std::to_string(m));
}

TrainMetadata base_metadata(const char* route, const SolverOptions& opt,
                            const EmbeddingSpec& trunk_spec,
                            const EmbeddingSpec& branch_spec, Index size) {
  TrainMetadata meta;
  meta.route = route;
  meta.solver = opt.kind;
  meta.lambda = opt.lambda;
  meta.tolerance = opt.tolerance.to_string();
  meta.trunk_seed = trunk_spec.seed;
  meta.branch_seed = branch_spec.seed;
  meta.train_size = size;
  return meta;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

void AlignedDataset::validate() const {
  check_grid(input_grid, "input grid");
  check_grid(output_grid, "output grid");
  require(inputs.rows() == input_grid.size(), ErrorKind::kShapeMismatch,
          "input matrix rows must equal the input grid size");
  require(outputs.rows() == output_grid.size(), ErrorKind::kShapeMismatch,
          "output matrix rows must equal the output grid size");
  require(inputs.cols() == outputs.cols(), ErrorKind::kShapeMismatch,
          "input and output matrices must have the same number of columns");
  require(inputs.cols() >= 1, ErrorKind::kShapeMismatch,
          "dataset must contain at least one function");
  require(inputs.allFinite() && outputs.allFinite(), ErrorKind::kNonFinite,
          "dataset contains NaN or Inf entries");
}

AlignedDataset AlignedDataset::select(const std::vector<Index>& columns) const {
  AlignedDataset out;
  out.input_grid = input_grid;
  out.output_grid = output_grid;
  out.inputs.resize(inputs.rows(), static_cast<Index>(columns.size()));
  out.outputs.resize(outputs.rows(), static_cast<Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const Index c = columns[j];
    require(c >= 0 && c < size(), ErrorKind::kInvalidArgument,
            "column index out of range");
    out.inputs.col(static_cast<Index>(j)) = inputs.col(c);
    out.outputs.col(static_cast<Index>(j)) = outputs.col(c);
  }
  return out;
}

void UnalignedDataset::validate() const {
  require(inputs.cols() == locations.cols() && inputs.cols() == outputs.size(),
          ErrorKind::kShapeMismatch,
          "inputs, locations and outputs must have equal column counts");
  require(inputs.cols() >= 1 && inputs.rows() >= 1 && locations.rows() >= 1,
          ErrorKind::kShapeMismatch, "unaligned dataset must not be empty");
  require(inputs.allFinite() && locations.allFinite() && outputs.allFinite(),
          ErrorKind::kNonFinite, "dataset contains NaN or Inf entries");
}

std::string_view solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::kCod:
      return "cod";
    case SolverKind::kTsvd:
      return "tsvd";
    case SolverKind::kTikhonov:
      return "tikhonov";
  }
  return "unknown";
}

SolverKind parse_solver(std::string_view name) {
  if (name == "cod") return SolverKind::kCod;
  if (name == "tsvd") return SolverKind::kTsvd;
  if (name == "tikhonov") return SolverKind::kTikhonov;
  fail(ErrorKind::kInvalidArgument, "unknown solver '" + std::string(name) + "'");
}

void SolverOptions::validate() const {
  require(std::isfinite(lambda) && lambda >= 0.0, ErrorKind::kInvalidArgument,
          "lambda must be finite and non-negative");
}

RandONetModel::RandONetModel(FeatureMap trunk, FeatureMap branch, Matrix readout,
                             TrainMetadata meta)
    : trunk_(std::move(trunk)),
      branch_(std::move(branch)),
      readout_(std::move(readout)),
      meta_(std::move(meta)) {
  require(readout_.rows() == trunk_.feature_dim() &&
              readout_.cols() == branch_.feature_dim(),
          ErrorKind::kShapeMismatch,
          "readout must be trunk features x branch features");
  require(readout_.allFinite(), ErrorKind::kNonFinite,
          "readout contains NaN or Inf entries");
}

RandONetModel RandONetModel::with_readout(Matrix readout) const {
  return RandONetModel(trunk_, branch_, std::move(readout), meta_);
}

Vector RandONetModel::evaluate(const Vector& u_samples,
                               const Vector& y_points) const {
  return evaluate_batch(Matrix(u_samples), y_points).col(0);
}

Matrix RandONetModel::evaluate_batch(const Matrix& u,
                                     const Vector& y_points) const {
  require(u.rows() == branch_.input_dim(), ErrorKind::kShapeMismatch,
          "input function has " + std::to_string(u.rows()) +
              " samples, branch expects " +
              std::to_string(branch_.input_dim()));
  const Matrix t = trunk_features(trunk_, grid_row(y_points));  // N x q
  const Matrix b = branch_.apply(u);                              // M x k
  Matrix out(y_points.size(), u.cols());
  Vector wb(readout_.rows());
  for (Index j = 0; j < u.cols(); ++j) {
    wb.noalias() = readout_ * b.col(j);
    out.col(j).noalias() = t.transpose() * wb;
  }
  return out;
}

ReadoutSolve solve_readout(const Matrix& t, const Matrix& v, const Matrix& b,
                           const SolverOptions& solver, Association order) {
  solver.validate();
  linalg::require_finite(t, "trunk features");
  linalg::require_finite(b, "branch features");
  linalg::require_finite(v, "targets");
  require(t.rows() == v.rows() && b.cols() == v.cols(),
          ErrorKind::kShapeMismatch,
          "readout solve needs T (n x N), V (n x s), B (M x s); got T " +
              std::to_string(t.rows()) + "x" + std::to_string(t.cols()) +
              ", V " + std::to_string(v.rows()) + "x" +
              std::to_string(v.cols()) + ", B " + std::to_string(b.rows()) +
              "x" + std::to_string(b.cols()));
  const bool trunk_first = order == Association::kAuto
                               ? v.rows() <= v.cols()
                               : order == Association::kTrunkFirst;
  PinvResult tr;
  PinvResult br;
  ReadoutSolve out;
  if (trunk_first) {
    tr = pinv_left(t, v, solver);
    br = pinv_right(b, tr.value, solver);
    out.readout = std::move(br.value);
  } else {
    br = pinv_right(b, v, solver);
    tr = pinv_left(t, br.value, solver);
    out.readout = std::move(tr.value);
  }
  if (!out.readout.allFinite()) {
    fail(ErrorKind::kSolverFailure,
         "readout is not finite; " + diagnostics("trunk", t, tr) + "; " +
             diagnostics("branch", b, br));
  }
  out.trunk_rank = tr.rank;
  out.branch_rank = br.rank;
  out.trunk_rank_tolerance = tr.tolerance;
  out.branch_rank_tolerance = br.tolerance;
  out.trunk_first = trunk_first;
  return out;
}

RandONetModel train_aligned(const AlignedDataset& ds,
                            const EmbeddingSpec& trunk_spec,
                            const EmbeddingSpec& branch_spec,
                            const SolverOptions& solver, Association order) {
  const auto start = std::chrono::steady_clock::now();
  ds.validate();
  solver.validate();
  check_specs(trunk_spec, branch_spec, ds.input_grid.size(), 1);

  FeatureMap trunk = embeddings::sample(trunk_spec);
  FeatureMap branch = embeddings::sample(branch_spec);
  const Matrix t = trunk_features(trunk, grid_row(ds.output_grid)).transpose();
  const Matrix b = branch.apply(ds.inputs);
  ReadoutSolve sol = solve_readout(t, ds.outputs, b, solver, order);

  TrainMetadata meta =
      base_metadata("aligned", solver, trunk_spec, branch_spec, ds.size());
  meta.trunk_rank = sol.trunk_rank;
  meta.branch_rank = sol.branch_rank;
  meta.trunk_rank_tolerance = sol.trunk_rank_tolerance;
  meta.branch_rank_tolerance = sol.branch_rank_tolerance;
  meta.trunk_first = sol.trunk_first;
  meta.train_seconds = seconds_since(start);
  return RandONetModel(std::move(trunk), std::move(branch),
                       std::move(sol.readout), std::move(meta));
}

RandONetModel train_unaligned(const UnalignedDataset& ds,
                              const EmbeddingSpec& trunk_spec,
                              const EmbeddingSpec& branch_spec,
                              const SolverOptions& solver,
                              std::uint64_t max_entries) {
  const auto start = std::chrono::steady_clock::now();
  ds.validate();
  solver.validate();
  check_specs(trunk_spec, branch_spec, ds.inputs.rows(), ds.locations.rows());

  const auto nn = static_cast<std::uint64_t>(trunk_spec.feature_dim);
  const auto mm = static_cast<std::uint64_t>(branch_spec.feature_dim);
  const auto ss = static_cast<std::uint64_t>(ds.size());
  const long double entries = static_cast<long double>(nn) * mm * ss;
  if (entries > static_cast<long double>(max_entries)) {
    std::ostringstream os;
    os << "unaligned collocation matrix needs N*M*S = " << nn << "*" << mm
       << "*" << ss << " entries, budget is " << max_entries
       << "; the solve costs O((N S)^2 M N + (M N)^2 N S)";
    fail(ErrorKind::kBudgetExceeded, os.str());
  }

  FeatureMap trunk = embeddings::sample(trunk_spec);
  FeatureMap branch = embeddings::sample(branch_spec);
  const Matrix t = trunk_features(trunk, ds.locations);  // N x S
  const Matrix b = branch.apply(ds.inputs);              // M x S
  linalg::require_finite(t, "trunk features");
  linalg::require_finite(b, "branch features");

  const Index n_feat = trunk.feature_dim();
  const Index m_feat = branch.feature_dim();
  Matrix z(n_feat * m_feat, ds.size());
  for (Index i = 0; i < m_feat; ++i) {
    for (Index k = 0; k < n_feat; ++k) {
      z.row(k + i * n_feat) = t.row(k).cwiseProduct(b.row(i));
    }
  }

  PinvResult zr = pinv_right(z, ds.outputs.transpose(), solver);
  if (!zr.value.allFinite()) {
    fail(ErrorKind::kSolverFailure,
         "readout is not finite; " + diagnostics("collocation", z, zr));
  }
  Matrix w(n_feat, m_feat);
  for (Index i = 0; i < m_feat; ++i) {
    for (Index k = 0; k < n_feat; ++k) w(k, i) = zr.value(0, k + i * n_feat);
  }

  TrainMetadata meta =
      base_metadata("unaligned", solver, trunk_spec, branch_spec, ds.size());
  meta.trunk_rank = zr.rank;
  meta.branch_rank = zr.rank;
  meta.trunk_rank_tolerance = zr.tolerance;
  meta.branch_rank_tolerance = zr.tolerance;
  meta.train_seconds = seconds_since(start);
  return RandONetModel(std::move(trunk), std::move(branch), std::move(w),
                       std::move(meta));
}

UnalignedDataset explode_aligned(const AlignedDataset& ds) {
  ds.validate();
  const Index n = ds.output_grid.size();
  const Index s = ds.size();
  UnalignedDataset out;
  out.inputs.resize(ds.inputs.rows(), n * s);
  out.locations.resize(1, n * s);
  out.outputs.resize(n * s);
  for (Index j = 0; j < s; ++j) {
    for (Index k = 0; k < n; ++k) {
      const Index q = k + j * n;
      out.inputs.col(q) = ds.inputs.col(j);
      out.locations(0, q) = ds.output_grid(k);
      out.outputs(q) = ds.outputs(k, j);
    }
  }
  return out;
}

void save_model(std::ostream& os, const RandONetModel& model) {
  const auto& meta = model.metadata();
  const Matrix& w = model.readout();
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["trunk"] = embeddings::spec_to_json(model.trunk().spec());
  j["branch"] = embeddings::spec_to_json(model.branch().spec());
  j["solver"] = {
      {"kind", std::string(solver_name(meta.solver))},
      {"lambda", meta.lambda},
      {"tolerance", meta.tolerance},
      {"route", meta.route},
      {"trunk_rank", meta.trunk_rank},
      {"branch_rank", meta.branch_rank},
      {"trunk_rank_tolerance", meta.trunk_rank_tolerance},
      {"branch_rank_tolerance", meta.branch_rank_tolerance},
      {"trunk_first", meta.trunk_first},
      {"train_size", meta.train_size},
      {"train_seconds", meta.train_seconds},
  };
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(w.size()));
  for (Index r = 0; r < w.rows(); ++r)
    for (Index c = 0; c < w.cols(); ++c) data.push_back(w(r, c));
  j["readout"] = {{"rows", w.rows()}, {"cols", w.cols()}, {"data", data}};
  os << j.dump() << "\n";
}

RandONetModel load_model(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIo, std::string("cannot parse model: ") + e.what());
  }
  require(j.value("format", "") == kModelFormat, ErrorKind::kIo,
          "not a randonet model file");
  require(j.value("version", 0) == kModelVersion, ErrorKind::kIo,
          "unsupported model version");
  try {
    FeatureMap trunk = embeddings::sample(embeddings::spec_from_json(j.at("trunk")));
    FeatureMap branch =
        embeddings::sample(embeddings::spec_from_json(j.at("branch")));
    const auto& r = j.at("readout");
    const Index rows = r.at("rows").get<Index>();
    const Index cols = r.at("cols").get<Index>();
    const auto data = r.at("data").get<std::vector<double>>();
    require(static_cast<Index>(data.size()) == rows * cols, ErrorKind::kIo,
            "readout data length does not match its shape");
    Matrix w(rows, cols);
    for (Index a = 0; a < rows; ++a)
      for (Index c = 0; c < cols; ++c) w(a, c) = data[a * cols + c];

    const auto& s = j.at("solver");
    TrainMetadata meta;
    meta.solver = parse_solver(s.at("kind").get<std::string>());
    meta.lambda = s.at("lambda").get<double>();
    meta.tolerance = s.at("tolerance").get<std::string>();
    meta.route = s.at("route").get<std::string>();
    meta.trunk_rank = s.at("trunk_rank").get<Index>();
    meta.branch_rank = s.at("branch_rank").get<Index>();
    meta.trunk_rank_tolerance = s.at("trunk_rank_tolerance").get<double>();
    meta.branch_rank_tolerance = s.at("branch_rank_tolerance").get<double>();
    meta.trunk_first = s.at("trunk_first").get<bool>();
    meta.train_size = s.at("train_size").get<Index>();
    meta.train_seconds = s.at("train_seconds").get<double>();
    meta.trunk_seed = trunk.spec().seed;
    meta.branch_seed = branch.spec().seed;
    return RandONetModel(std::move(trunk), std::move(branch), std::move(w),
                         std::move(meta));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIo, std::string("malformed model file: ") + e.what());
  }
}

}  // namespace randonet::model
