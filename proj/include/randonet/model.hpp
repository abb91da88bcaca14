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

// Random projection operator network
//
//   F[u](y) = T(y)^T W B(u) = sum_k sum_i w_ki T_k(y) B_i(u)
//
// T is a frozen tanh trunk over output locations, B a frozen branch map over
// sampled input functions. W is the only trained quantity:
//
//   aligned:    W = T(Y)^+ V B(U)^+
//   unaligned:  vec(W) = V Z^+,  row q of Z is T_k .* B_i, q = k + i N.

#ifndef RANDONET_MODEL_HPP_
#define RANDONET_MODEL_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "randonet/embeddings.hpp"
#include "randonet/linalg.hpp"

namespace randonet::model {

using embeddings::EmbeddingSpec;
using embeddings::FeatureMap;
using linalg::Index;
using linalg::Matrix;
using linalg::RankTolerance;
using linalg::Vector;

/// Input functions sampled on a shared sensor grid, outputs on a shared
/// output grid. Column j of `inputs` and `outputs` is one function pair.
struct AlignedDataset {
  Vector input_grid;   // m
  Vector output_grid;  // n
  Matrix inputs;       // m x s
  Matrix outputs;      // n x s

  Index size() const { return inputs.cols(); }
  void validate() const;
  AlignedDataset select(const std::vector<Index>& columns) const;
};

/// One scalar observation per column: v = F[u](y).
struct UnalignedDataset {
  Matrix inputs;     // m x S
  Matrix locations;  // d x S
  Vector outputs;    // S

  Index size() const { return inputs.cols(); }
  void validate() const;
};

enum class SolverKind { kCod, kTsvd, kTikhonov };

std::string_view solver_name(SolverKind kind);
SolverKind parse_solver(std::string_view name);

struct SolverOptions {
  SolverKind kind = SolverKind::kCod;
  RankTolerance tolerance = RankTolerance::automatic();
  double lambda = 0.0;

  void validate() const;
};

enum class Association { kAuto, kTrunkFirst, kBranchFirst };

struct TrainMetadata {
  std::string route;  // "aligned" | "unaligned"
  SolverKind solver = SolverKind::kCod;
  double lambda = 0.0;
  std::string tolerance;  // "auto" or the absolute value
  std::uint64_t trunk_seed = 0;
  std::uint64_t branch_seed = 0;
  Index trunk_rank = 0;
  Index branch_rank = 0;
  double trunk_rank_tolerance = 0.0;
  double branch_rank_tolerance = 0.0;
  bool trunk_first = true;
  Index train_size = 0;
  double train_seconds = 0.0;
};

class RandONetModel {
 public:
  RandONetModel(FeatureMap trunk, FeatureMap branch, Matrix readout,
                TrainMetadata meta = {});

  const FeatureMap& trunk() const { return trunk_; }
  const FeatureMap& branch() const { return branch_; }
  const Matrix& readout() const { return readout_; }
  const TrainMetadata& metadata() const { return meta_; }
  TrainMetadata& mutable_metadata() { return meta_; }

  /// Output at each query point for one sampled input function.
  Vector evaluate(const Vector& u_samples, const Vector& y_points) const;
  /// Column j is evaluate(u.col(j), y_points).
  Matrix evaluate_batch(const Matrix& u, const Vector& y_points) const;

  RandONetModel with_readout(Matrix readout) const;

 private:
  FeatureMap trunk_;
  FeatureMap branch_;
  Matrix readout_;
  TrainMetadata meta_;
};

/// Ranks and tolerances reported by solve_readout.
struct ReadoutSolve {
  Matrix readout;
  Index trunk_rank = -1;
  Index branch_rank = -1;
  double trunk_rank_tolerance = 0.0;
  double branch_rank_tolerance = 0.0;
  bool trunk_first = true;
};

/// W = T^+ V B^+ for trunk features T (n x N), targets V (n x s) and branch
/// features B (M x s). No ordering requirement on the rows of T and V.
ReadoutSolve solve_readout(const Matrix& t, const Matrix& v, const Matrix& b,
                           const SolverOptions& solver = {},
                           Association order = Association::kAuto);

RandONetModel train_aligned(const AlignedDataset& ds,
                            const EmbeddingSpec& trunk_spec,
                            const EmbeddingSpec& branch_spec,
                            const SolverOptions& solver = {},
                            Association order = Association::kAuto);

/// Default cap on N * M * S, the number of entries of the collocation matrix.
inline constexpr std::uint64_t kDefaultUnalignedBudget = 50'000'000;

RandONetModel train_unaligned(
    const UnalignedDataset& ds, const EmbeddingSpec& trunk_spec,
    const EmbeddingSpec& branch_spec, const SolverOptions& solver = {},
    std::uint64_t max_entries = kDefaultUnalignedBudget);

/// Column q = k + j n holds function j observed at output point k.
UnalignedDataset explode_aligned(const AlignedDataset& ds);

/// Versioned JSON with both embedding specs, solver metadata and W.
/// Doubles are written in shortest round-trip form.
void save_model(std::ostream& os, const RandONetModel& model);
RandONetModel load_model(std::istream& is);

}  // namespace randonet::model

#endif  // RANDONET_MODEL_HPP_
